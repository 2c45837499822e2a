#pragma once

#include "rbsde/solver.hpp"

namespace rbsde {

// f^C(t,y,z) = ramp_C(y) * f(t,y,z), where ramp_C is 1 on [-C,C], 0 outside
// [-2C,2C] and linear in between. The result carries a one-sided growth
// declaration (SuperlinearY): |f^C| <= phi(2C) + A z^2.
Generator truncate(const Generator& gen, double cutoff);

// Piecewise-linear truncation ramp itself (exposed for tests).
double truncation_ramp(double y, double cutoff);

// Lipschitz regularization by inf-convolution over a finite grid centered at
// z: f_n(t,y,z) = min_q { f(t,y,q) + n |z - q| }.
//
// q_radius/q_step <= 0 selects the adaptive defaults
//   radius = 2 (phi(|y|) + |g_t| + beta |z|) / n + |z|,  step = radius / 512,
// under which the grid infimum is within n*step of the true infimum whenever
// the declared envelope is valid. The grid always contains q = z, so
// f_n <= f pointwise; z -> f_n is n-Lipschitz up to grid error.
Generator lipschitz_approx(const Generator& gen, double n, double q_radius = 0.0,
                           double q_step = 0.0);

// Exponential drift change: xi -> e^{lambda T} xi, L -> e^{lambda t} L,
// f -> e^{lambda t} f(t, e^{-lambda t} y, e^{-lambda t} z) - lambda y.
// With lambda = mu the transformed driver is non-increasing in y.
Scenario monotone_shift(const Scenario& scenario, double lambda);

// Field-level companion maps of monotone_shift: (Y,Z,dK) -> (e^{lambda t} Y,
// e^{lambda t} Z, e^{lambda t} dK) and back. Exact inverses of each other.
DiscreteSolution monotone_shift_map(const DiscreteSolution& sol, const BinomialLattice& lattice,
                                    double lambda);
DiscreteSolution monotone_shift_unmap(const DiscreteSolution& sol, const BinomialLattice& lattice,
                                      double lambda);

// Exponential change of scale for quadratic drivers:
// eta = e^{2A xi}, Lbar = e^{2A L},
// F(t,x,l) = 2Ax [ f(t, log(x)/(2A), l/(2Ax)) - l^2/(4Ax^2) ].
// F is only defined for x > 0 (DomainError otherwise).
Scenario exp_quadratic_transform(const Scenario& scenario, double a);

// Field-level companion maps: (Y,Z,dK) -> (e^{2AY}, 2AZe^{2AY}, 2Ae^{2AY}dK)
// and the exact inverse (Y = log(theta)/(2A), ...).
DiscreteSolution exp_quadratic_map(const DiscreteSolution& sol, double a);
DiscreteSolution exp_quadratic_unmap(const DiscreteSolution& sol, double a);

// Terminal/driver clipping: xi -> (xi v (-p)) ^ m and
// f -> f - g_t + ((g_t v (-p)) ^ m). Idempotent.
Scenario clip(const Scenario& scenario, int upper_m, int lower_p);

// Shift by a constant: (xi - b, f(t, y+b, z), L - b). The solution of the
// shifted problem maps back by adding b to Y.
Scenario barrier_shift(const Scenario& scenario, double b);
DiscreteSolution barrier_shift_unmap(const DiscreteSolution& sol, double b);

}  // namespace rbsde
