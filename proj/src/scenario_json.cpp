#include "rbsde/scenario_json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "rbsde/transforms.hpp"

namespace rbsde {

namespace {

using nlohmann::json;

const json& require(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object()) throw ScenarioParseError(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw ScenarioParseError(path + "/" + key, "missing field");
    return *it;
}

double require_number(const json& obj, const std::string& key, const std::string& path) {
    const json& v = require(obj, key, path);
    if (!v.is_number()) throw ScenarioParseError(path + "/" + key, "expected a number");
    return v.get<double>();
}

double number_or(const json& obj, const std::string& key, double fallback) {
    auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    return it->get<double>();
}

int require_int(const json& obj, const std::string& key, const std::string& path) {
    const json& v = require(obj, key, path);
    if (!v.is_number_integer()) throw ScenarioParseError(path + "/" + key, "expected an integer");
    return v.get<int>();
}

std::string require_string(const json& obj, const std::string& key, const std::string& path) {
    const json& v = require(obj, key, path);
    if (!v.is_string()) throw ScenarioParseError(path + "/" + key, "expected a string");
    return v.get<std::string>();
}

Generator parse_generator(const json& spec, const std::string& path) {
    const std::string name = require_string(spec, "name", path);
    if (name == "f0") return make_f0();
    if (name == "fmono")
        return make_fmono(number_or(spec, "c0", 0.0), number_or(spec, "beta", 0.5));
    if (name == "fquad") return make_fquad(number_or(spec, "A", 1.0));
    if (name == "fdrift") return make_fdrift(number_or(spec, "mu", 0.0));
    throw ScenarioParseError(path + "/name", "unknown generator '" + name +
                                                 "' (builtins: f0, fmono, fquad, fdrift)");
}

Scenario apply_transform(const Scenario& scenario, const json& spec, const std::string& path) {
    const std::string kind = require_string(spec, "kind", path);
    if (kind == "truncate") {
        Scenario out = scenario;
        out.generator = truncate(scenario.generator, require_number(spec, "C", path));
        return out;
    }
    if (kind == "lipschitz") {
        Scenario out = scenario;
        out.generator = lipschitz_approx(scenario.generator, require_number(spec, "n", path),
                                         number_or(spec, "q_radius", 0.0),
                                         number_or(spec, "q_step", 0.0));
        return out;
    }
    if (kind == "monotone-shift")
        return monotone_shift(scenario, require_number(spec, "lambda", path));
    if (kind == "exp-quadratic")
        return exp_quadratic_transform(scenario, require_number(spec, "A", path));
    if (kind == "clip")
        return clip(scenario, require_int(spec, "m", path), require_int(spec, "p", path));
    if (kind == "barrier-shift")
        return barrier_shift(scenario, require_number(spec, "b", path));
    throw ScenarioParseError(path + "/kind", "unknown transform '" + kind + "'");
}

}  // namespace

std::function<double(double)> parse_state_function(const json& spec, const std::string& path) {
    const std::string name = require_string(spec, "name", path);
    if (name == "state") return [](double x) { return x; };
    if (name == "constant") {
        const double v = require_number(spec, "value", path);
        return [v](double) { return v; };
    }
    if (name == "tanh") {
        const double scale = number_or(spec, "scale", 1.0);
        const double slope = number_or(spec, "slope", 1.0);
        return [scale, slope](double x) { return scale * std::tanh(slope * x); };
    }
    if (name == "affine") {
        const double slope = require_number(spec, "slope", path);
        const double icept = number_or(spec, "intercept", 0.0);
        const double lo = number_or(spec, "min", -std::numeric_limits<double>::infinity());
        const double hi = number_or(spec, "max", std::numeric_limits<double>::infinity());
        if (lo > hi) throw ScenarioParseError(path, "min exceeds max");
        return [slope, icept, lo, hi](double x) { return std::clamp(slope * x + icept, lo, hi); };
    }
    if (name == "call") {
        const double k = require_number(spec, "strike", path);
        return [k](double x) { return std::max(x - k, 0.0); };
    }
    if (name == "put") {
        const double k = require_number(spec, "strike", path);
        return [k](double x) { return std::max(k - x, 0.0); };
    }
    if (name == "square") return [](double x) { return x * x; };
    throw ScenarioParseError(path + "/name", "unknown function '" + name +
                                                 "' (builtins: state, constant, tanh, affine, "
                                                 "call, put, square)");
}

ParsedScenario parse_scenario_json(const json& doc) {
    if (!doc.is_object()) throw ScenarioParseError("/", "scenario file must be a JSON object");
    const int version = require_int(doc, "schema_version", "");
    if (version != 1)
        throw ScenarioParseError("/schema_version", "unsupported version " + std::to_string(version));

    const double horizon = require_number(doc, "T", "");
    const int steps = require_int(doc, "N", "");
    if (horizon <= 0.0) throw ScenarioParseError("/T", "horizon must be positive");
    if (steps < 1) throw ScenarioParseError("/N", "step count must be >= 1");

    const BinomialLattice lattice = build_lattice(horizon, steps);
    auto terminal = parse_state_function(require(doc, "terminal", ""), "/terminal");
    auto barrier_fn = parse_state_function(require(doc, "barrier", ""), "/barrier");
    Generator gen = parse_generator(require(doc, "generator", ""), "/generator");

    ParsedScenario parsed{
        make_scenario(lattice, std::move(terminal), make_state_field(lattice, barrier_fn),
                      std::move(gen)),
        {},
        {},
        scenario_hash(doc),
        doc,
    };

    if (auto it = doc.find("transforms"); it != doc.end()) {
        if (!it->is_array()) throw ScenarioParseError("/transforms", "expected an array");
        int k = 0;
        for (const json& t : *it) {
            parsed.scenario =
                apply_transform(parsed.scenario, t, "/transforms/" + std::to_string(k));
            ++k;
        }
    }

    if (auto it = doc.find("scheme"); it != doc.end()) {
        const json& s = *it;
        if (auto m = s.find("mode"); m != s.end()) {
            const std::string mode = m->get<std::string>();
            if (mode == "implicit")
                parsed.scheme.y_evaluation = YEvaluation::Implicit;
            else if (mode == "explicit")
                parsed.scheme.y_evaluation = YEvaluation::Explicit;
            else
                throw ScenarioParseError("/scheme/mode", "expected 'implicit' or 'explicit'");
        }
        parsed.scheme.root_tol = number_or(s, "root_tol", parsed.scheme.root_tol);
        if (parsed.scheme.root_tol <= 0.0)
            throw ScenarioParseError("/scheme/root_tol", "must be positive");
        if (auto m = s.find("max_root_iters"); m != s.end())
            parsed.scheme.max_root_iters = m->get<int>();
        if (auto m = s.find("contraction_guard"); m != s.end())
            parsed.scheme.contraction_guard = m->get<bool>();
    }

    if (auto it = doc.find("output"); it != doc.end()) {
        parsed.tolerances.identity_residual =
            number_or(*it, "identity_residual_tol", parsed.tolerances.identity_residual);
        parsed.tolerances.oracle_gap = number_or(*it, "oracle_gap_tol", parsed.tolerances.oracle_gap);
    }

    return parsed;
}

ParsedScenario load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioParseError("/", "cannot open scenario file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& err) {
        throw ScenarioParseError("/", std::string("JSON parse error: ") + err.what());
    }
    return parse_scenario_json(doc);
}

std::uint64_t scenario_hash(const json& doc) {
    // nlohmann::json keeps object keys sorted, so dump() is canonical.
    const std::string canonical = doc.dump();
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : canonical) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hash_hex(std::uint64_t h) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int k = 15; k >= 0; --k) {
        out[k] = digits[h & 0xf];
        h >>= 4;
    }
    return out;
}

}  // namespace rbsde
