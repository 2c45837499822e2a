#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "rbsde/solver.hpp"

namespace rbsde {

// Parse/validation failure with the JSON field path that caused it.
class ScenarioParseError : public InvalidParameter {
public:
    ScenarioParseError(const std::string& path, const std::string& message)
        : InvalidParameter(path + ": " + message), path_(path) {}
    const std::string& field_path() const { return path_; }

private:
    std::string path_;
};

struct OutputTolerances {
    double identity_residual = 1e-10;
    double oracle_gap = 0.05;
};

struct ParsedScenario {
    Scenario scenario;
    SchemeOptions scheme;
    OutputTolerances tolerances;
    std::uint64_t hash = 0;
    nlohmann::json raw;
};

// Schema (version 1):
//   { "schema_version": 1, "T": .., "N": ..,
//     "terminal":  { "name": state|constant|tanh|affine|call|put|square, ... },
//     "barrier":   { same shape; "constant" is the common case },
//     "generator": { "name": f0|fmono|fquad|fdrift, ... },
//     "transforms": [ { "kind": truncate|lipschitz|monotone-shift|
//                                exp-quadratic|clip|barrier-shift, ... } ],
//     "scheme":    { "mode": implicit|explicit, "root_tol", "max_root_iters",
//                    "contraction_guard" },          (optional)
//     "output":    { "identity_residual_tol", "oracle_gap_tol" } (optional) }
ParsedScenario parse_scenario_json(const nlohmann::json& doc);
ParsedScenario load_scenario_file(const std::string& path);

// Builtin function-of-state spec shared by terminal and barrier entries.
std::function<double(double)> parse_state_function(const nlohmann::json& spec,
                                                   const std::string& path);

// FNV-1a over the canonical (sorted-key) serialization; any semantic change
// to the document changes the hash.
std::uint64_t scenario_hash(const nlohmann::json& doc);
std::string hash_hex(std::uint64_t h);

}  // namespace rbsde
