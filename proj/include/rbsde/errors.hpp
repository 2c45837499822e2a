#pragma once

#include <stdexcept>
#include <string>

namespace rbsde {

// Bad sizes, bad parameters, violated preconditions.
struct InvalidParameter : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A slice-level operation received a field of the wrong length.
struct SliceMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Two objects built on different lattices were combined.
struct LatticeMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// An operation requires a generator of a different growth class.
struct WrongClass : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Exhaustive enumeration refused (exponential cost cap).
struct TooLarge : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Evaluation outside the mathematical domain (log of nonpositive, ...).
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// Numerical failure inside the backward sweep; carries the failing node.
class SolverFailure : public std::runtime_error {
public:
    enum class Kind {
        RootNotBracketed,
        MaxIterations,
        ContractionViolated,
        NonfiniteValue,
    };

    SolverFailure(Kind kind, int step, int node, const std::string& message)
        : std::runtime_error(message), kind_(kind), step_(step), node_(node) {}

    Kind kind() const { return kind_; }
    int step() const { return step_; }
    int node() const { return node_; }

    static const char* kind_name(Kind k) {
        switch (k) {
            case Kind::RootNotBracketed: return "root-not-bracketed";
            case Kind::MaxIterations: return "max-iterations";
            case Kind::ContractionViolated: return "contraction-violated";
            case Kind::NonfiniteValue: return "nonfinite-value";
        }
        return "unknown";
    }

private:
    Kind kind_;
    int step_;
    int node_;
};

}  // namespace rbsde
