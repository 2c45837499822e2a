#pragma once

#include "rbsde/scenario.hpp"

namespace rbsde {

enum class YEvaluation { Implicit, Explicit };

struct SchemeOptions {
    YEvaluation y_evaluation = YEvaluation::Implicit;
    double root_tol = 1e-12;
    int max_root_iters = 200;
    // Require dt * max(mu, 0) < 1 before sweeping (implicit-step uniqueness).
    bool contraction_guard = true;
};

struct ClauseResidual {
    double value = 0.0;
    int step = -1;
    int node = -1;
};

// Max nodewise violation of each solution clause:
//   barrier_violation  : (L - Y)^+
//   skorokhod_product  : |dK * (Y - L)|
//   backward_identity  : per-branch error of Y_i = Y_{i+1} + f dt + dK - Z dB
//   dk_negative        : (-dK)^+
struct ResidualReport {
    ClauseResidual barrier_violation;
    ClauseResidual skorokhod_product;
    ClauseResidual backward_identity;
    ClauseResidual dk_negative;
    double max_of_all() const;
};

// Adapted triple (Y, Z, dK). Z and dK live on slices 0..N-1 (slice N is
// zero-filled); dK(i,j) is the increment assigned over [t_i, t_{i+1}), so the
// cumulative increasing process along a path is the running sum of visited
// increments, starting at 0.
struct DiscreteSolution {
    AdaptedField y;
    AdaptedField z;
    AdaptedField dk;
    SchemeOptions options;
    ResidualReport residual_report;

    double y0() const { return y(0, 0); }
};

// Backward dynamic programming pass:
//   Y(N,.) = xi;  Z(i,j) from the exact martingale representation of Y_{i+1};
//   ytilde = E_i[Y_{i+1}] + dt f(t_i, ., Z)  (implicit in the second slot, or
//   evaluated at E_i[Y_{i+1}] in explicit mode);
//   Y(i,j) = max(ytilde, L(i,j)),  dK(i,j) = Y(i,j) - ytilde.
// By construction the barrier, Skorokhod and positivity clauses hold exactly
// and the backward identity holds to root tolerance on both branches.
DiscreteSolution solve_rbsde(const Scenario& scenario, const SchemeOptions& options = {});

// Solves y = a + dt f(t, y, z) by bracketed bisection. The bracket starts at
// a +- dt*Phi with Phi = phi(|a|+1) + A z^2 + |g| + beta|z| + 1 and doubles
// until it straddles a sign change (at most 60 expansions); bisection then
// runs to bracket collapse, so the result is independent of the initial
// bracket up to one ulp.
double implicit_y_step(double a, double t, double z, const Generator& gen, double dt,
                       const SchemeOptions& options = {});

// Recomputes the residual report of a solution against its scenario.
ResidualReport residuals(const DiscreteSolution& solution, const Scenario& scenario);

// Running sum of dK along a sampled path: entry i is K at t_i (entry 0 is 0).
std::vector<double> cumulative_k_along(const DiscreteSolution& solution, const LatticePath& path);

// E[K_T] via an exact backward tail-sum recursion.
double expected_terminal_k(const DiscreteSolution& solution);

}  // namespace rbsde
