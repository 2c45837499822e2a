#include "rbsde/generator.hpp"

#include <algorithm>
#include <cmath>

namespace rbsde {

const char* growth_class_name(GrowthClass c) {
    switch (c) {
        case GrowthClass::QuadraticZ: return "quadratic-z";
        case GrowthClass::LinearZ: return "linear-z";
        case GrowthClass::SuperlinearY: return "superlinear-y";
    }
    return "unknown";
}

namespace {

// Van der Corput radical inverse, the workhorse of the Halton probe grid.
double radical_inverse(unsigned base, unsigned long long n) {
    double inv = 1.0 / base, f = inv, x = 0.0;
    while (n > 0) {
        x += f * static_cast<double>(n % base);
        n /= base;
        f *= inv;
    }
    return x;
}

}  // namespace

GeneratorProbeReport validate_generator(const Generator& gen, const ProbeBox& box, int points) {
    GeneratorProbeReport report;
    constexpr double tol = 1e-9;

    if (gen.growth_class == GrowthClass::LinearZ) {
        double phi0 = gen.phi(0.0);
        report.phi_at_zero_ok = std::abs(phi0) <= 1e-12;
    }

    for (int k = 1; k <= points; ++k) {
        const double t = box.t_max * radical_inverse(2, k);
        const double y = box.y_lo + (box.y_hi - box.y_lo) * radical_inverse(3, k);
        const double y2 = box.y_lo + (box.y_hi - box.y_lo) * radical_inverse(5, k);
        const double z = box.z_max * (2.0 * radical_inverse(7, k) - 1.0);

        const double f = gen.eval(t, y, z);

        if (gen.growth_class != GrowthClass::SuperlinearY) {
            const double f2 = gen.eval(t, y2, z);
            const double lhs = (y - y2) * (f - f2) - gen.mu * (y - y2) * (y - y2);
            report.worst_monotonicity = std::max(report.worst_monotonicity, lhs);
        }

        double excess = 0.0;
        switch (gen.growth_class) {
            case GrowthClass::QuadraticZ:
                excess = std::abs(f) - (gen.phi(std::abs(y)) + gen.quad_coeff_or_zero() * z * z);
                break;
            case GrowthClass::LinearZ:
                excess = std::abs(f) - (std::abs(gen.g_of_t(t)) + gen.phi(std::abs(y)) +
                                        gen.lin_coeff_or_zero() * std::abs(z));
                break;
            case GrowthClass::SuperlinearY:
                // One-sided: only the upper bound is declared.
                excess = f - (gen.phi(std::abs(y)) + gen.quad_coeff_or_zero() * z * z);
                break;
        }
        report.worst_growth = std::max(report.worst_growth, excess);
    }

    report.monotonicity_ok = report.worst_monotonicity <= tol;
    report.growth_ok = report.worst_growth <= tol;
    return report;
}

Generator make_f0() {
    Generator g;
    g.name = "f0";
    g.eval = [](double, double, double) { return 0.0; };
    g.growth_class = GrowthClass::LinearZ;
    g.mu = 0.0;
    g.lin_coeff = 0.0;
    g.lipschitz_z = 0.0;
    return g;
}

Generator make_fmono(double c0, double beta) {
    if (beta < 0.0) throw InvalidParameter("fmono: beta must be nonnegative");
    Generator g;
    g.name = "fmono";
    g.eval = [c0, beta](double, double y, double z) { return c0 - y * y * y + beta * std::abs(z); };
    g.growth_class = GrowthClass::LinearZ;
    g.mu = 0.0;
    g.phi = [](double r) { return r * r * r; };
    g.lin_coeff = beta;
    g.g_of_t = [c0](double) { return std::abs(c0); };
    g.lipschitz_z = beta;
    return g;
}

Generator make_fquad(double a) {
    if (a < 0.0) throw InvalidParameter("fquad: quadratic coefficient must be nonnegative");
    Generator g;
    g.name = "fquad";
    g.eval = [a](double, double, double z) { return a * z * z; };
    g.growth_class = GrowthClass::QuadraticZ;
    g.mu = 0.0;
    g.quad_coeff = a;
    return g;
}

Generator make_fdrift(double mu) {
    Generator g;
    g.name = "fdrift";
    g.eval = [mu](double, double y, double) { return mu * y; };
    g.growth_class = GrowthClass::QuadraticZ;
    g.mu = mu;
    g.phi = [mu](double r) { return std::abs(mu) * r; };
    g.quad_coeff = 0.0;
    g.lipschitz_z = 0.0;
    return g;
}

Generator offset_generator(const Generator& gen, double c) {
    Generator out = gen;
    out.name = gen.name + "+offset";
    auto base = gen.eval;
    out.eval = [base, c](double t, double y, double z) { return base(t, y, z) + c; };
    switch (gen.growth_class) {
        case GrowthClass::QuadraticZ:
        case GrowthClass::SuperlinearY: {
            auto phi = gen.phi;
            double ac = std::abs(c);
            out.phi = [phi, ac](double r) { return phi(r) + ac; };
            break;
        }
        case GrowthClass::LinearZ: {
            auto g_of_t = gen.g_of_t;
            double ac = std::abs(c);
            out.g_of_t = [g_of_t, ac](double t) { return std::abs(g_of_t(t)) + ac; };
            break;
        }
    }
    return out;
}

}  // namespace rbsde
