#pragma once

#include <cstdint>
#include <utility>

#include "rbsde/snell.hpp"
#include "rbsde/transforms.hpp"

namespace rbsde {

// Which orderings the caller claims about the pair (used to select clauses;
// the orderings themselves are validated elsewhere, e.g. by the CLI).
struct ComparisonHypotheses {
    bool terminal_ordered = false;  // xi1 <= xi2
    bool generator_ordered = false; // f1 <= f2
    bool barrier_ordered = false;   // L1 <= L2 (weaker regime: only Y is compared)
    bool barriers_equal = false;    // enables the K clauses
};

struct ClauseCheck {
    bool checked = false;
    bool ok = true;
    double worst = 0.0;  // largest violation found, >= 0
    int step = -1;
    int node = -1;
};

struct ComparisonReport {
    ClauseCheck y_ordered;   // Y1 <= Y2 nodewise
    ClauseCheck dk_ordered;  // dK1 >= dK2 nodewise (equal barriers only)
    ClauseCheck k_ordered;   // cumulative K1 >= K2 along paths (equal barriers only)
    double tolerance = 1e-10;
    bool all_ok() const { return y_ordered.ok && dk_ordered.ok && k_ordered.ok; }
};

// Nodewise verification of the comparison conclusions. The cumulative-K
// clause walks every path for N <= 12 and 256 seeded paths above that.
ComparisonReport check_comparison(const DiscreteSolution& sol1, const DiscreteSolution& sol2,
                                  const ComparisonHypotheses& hypotheses, double tol = 1e-10);

struct AprioriBoundReport {
    double bound = 0.0;      // (e^{(phi(0)+mu) T} v 1)(||xi||_inf + 1)
    double max_abs_y = 0.0;
    bool satisfied = false;
};

// Uniform bound check for bounded-terminal quadratic-class scenarios with a
// nonpositive barrier (shift the barrier first otherwise).
AprioriBoundReport apriori_bound(const Scenario& scenario, const SchemeOptions& options = {});

struct NormEstimates {
    double e_sup_y2 = 0.0;      // E[max_i Y_i^2] along paths
    bool sup_exact = false;     // exact enumeration (N <= 20) vs sampled
    double sup_std_error = 0.0; // standard error when sampled
    double e_int_z2 = 0.0;      // E[sum Z^2 dt], exact
    double e_int_abs_z = 0.0;   // E[sum |Z| dt], exact (reported alongside)
    double e_kt = 0.0;          // E[K_T], exact
    double e_kt2 = 0.0;         // E[K_T^2], exact via tail-sum recursion
};

NormEstimates norm_estimates(const DiscreteSolution& solution, const BinomialLattice& lattice,
                             std::uint64_t seed = 0);

// Nodewise bound field M for linear-z class scenarios,
//   M(i,j) = sqrt( 2 e^{2 alpha T} E[ xi^2 + int_t^T g_s^2 ds | node ]
//                  + e^{alpha T}(phi(e^{alpha T} b) + phi(2T))
//                  + c_beta e^{2 alpha T} b^2 + alpha (e^{alpha T} b + 2T) + 1 ),
// with alpha = 1 + 2 beta^2 and the constant c_beta supplied by the caller
// (default 1.0).
AdaptedField pointwise_bound_field(const Scenario& scenario, double c_beta = 1.0);

enum class SweepKind { LipschitzN, TruncationC };

struct SweepResult {
    std::vector<std::string> labels;
    std::vector<double> y0;
    std::vector<double> diffs;    // successive differences, diffs[0] = 0
    bool monotone = false;        // nondecreasing within 1e-10 slack
    bool stabilized = false;      // |last diff| < stab_tol
};

// Solves the transformed scenario per parameter value (values ascending).
SweepResult approximation_sweep(const Scenario& scenario, SweepKind kind,
                                std::span<const double> values, const SchemeOptions& options = {},
                                double stab_tol = 1e-10);

// Clip sweep over (m, p) pairs.
SweepResult approximation_sweep(const Scenario& scenario,
                                std::span<const std::pair<int, int>> values,
                                const SchemeOptions& options = {}, double stab_tol = 1e-10);

// ---- randomized comparison suite machinery ----

enum class ComparisonRegime {
    OrderedGenerators,          // f1 <= f2, xi1 <= xi2, equal barrier (linear-z catalog)
    OrderedGeneratorsQuadratic, // same, quadratic-z catalog
    OrderedBarriers,            // L1 <= L2, same f and xi (only Y compared)
};

struct ScenarioPair {
    Scenario first;
    Scenario second;
    ComparisonHypotheses hypotheses;
};

// Deterministic function of the seed. Terminals are bounded slope-<=1
// functions of the terminal state, barriers are constants or clamped affine
// functions of state kept below the terminal, and coefficients stay inside
// the monotone-scheme regime (beta <= 1, A <= 0.25, dt max(mu,0) < 1).
ScenarioPair random_comparison_pair(ComparisonRegime regime, std::uint64_t seed, double horizon = 1.0,
                                    int steps = 12);

}  // namespace rbsde
