#pragma once

#include <functional>
#include <optional>
#include <string>

#include "rbsde/errors.hpp"

namespace rbsde {

// Structural classes of the driver f(t,y,z).
//
//   QuadraticZ   : |f| <= phi(|y|) + A z^2, one-sided monotone in y.
//   LinearZ      : |f| <= |g_t| + phi(|y|) + beta |z| with phi(0) = 0,
//                  one-sided monotone in y.
//   SuperlinearY : f <= phi(y) + A z^2 one-sided only; no monotonicity
//                  declared (covers truncated and exponential-transformed
//                  drivers whose lower growth is unconstrained).
enum class GrowthClass { QuadraticZ, LinearZ, SuperlinearY };

const char* growth_class_name(GrowthClass c);

// Driver f(t,y,z) together with the structural constants a scenario author
// declares for it. The metadata is validated by sampling (see
// validate_generator), never proven.
struct Generator {
    std::string name;
    std::function<double(double t, double y, double z)> eval;
    GrowthClass growth_class = GrowthClass::LinearZ;

    // One-sided monotonicity constant: (y-y')(f(t,y,z)-f(t,y',z)) <= mu (y-y')^2.
    double mu = 0.0;
    // Growth envelope in |y| (the l-function for SuperlinearY).
    std::function<double(double)> phi = [](double) { return 0.0; };
    // Quadratic z-growth constant A (QuadraticZ / SuperlinearY).
    std::optional<double> quad_coeff;
    // Linear z-growth constant beta (LinearZ).
    std::optional<double> lin_coeff;
    // |g_t| bound process of the LinearZ class, deterministic in t.
    std::function<double(double)> g_of_t = [](double) { return 0.0; };
    // Lipschitz constant in z, when known.
    std::optional<double> lipschitz_z;

    double operator()(double t, double y, double z) const { return eval(t, y, z); }

    double quad_coeff_or_zero() const { return quad_coeff.value_or(0.0); }
    double lin_coeff_or_zero() const { return lin_coeff.value_or(0.0); }
};

// Sampling box for metadata validation probes.
struct ProbeBox {
    double t_max = 1.0;
    double y_lo = -2.0;
    double y_hi = 2.0;
    double z_max = 2.0;
};

struct GeneratorProbeReport {
    bool monotonicity_ok = true;      // skipped (true) for SuperlinearY
    double worst_monotonicity = 0.0;  // max of (y-y')(f-f') - mu (y-y')^2
    bool growth_ok = true;
    double worst_growth = 0.0;        // max of |f| - envelope (one-sided for SuperlinearY)
    bool phi_at_zero_ok = true;       // phi(0) = 0, required for LinearZ only
    bool ok() const { return monotonicity_ok && growth_ok && phi_at_zero_ok; }
};

// Probes the declared class constraints on quasi-random points (Halton
// sequence, deterministic). Tolerance 1e-9 on every inequality.
GeneratorProbeReport validate_generator(const Generator& gen, const ProbeBox& box,
                                        int points = 1000);

// Builtin catalog. Each entry exercises exactly one assumption class.
Generator make_f0();                              // f = 0
Generator make_fmono(double c0, double beta);     // c0 - y^3 + beta|z|   (LinearZ, mu = 0)
Generator make_fquad(double a);                   // a z^2                (QuadraticZ, mu = 0)
Generator make_fdrift(double mu);                 // mu y                 (QuadraticZ)

// f + c with the growth envelope widened accordingly (used by comparison
// suites to build ordered generator pairs).
Generator offset_generator(const Generator& gen, double c);

}  // namespace rbsde
