#include "rbsde/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rbsde {

double truncation_ramp(double y, double cutoff) {
    const double a = std::abs(y);
    if (a <= cutoff) return 1.0;
    if (a >= 2.0 * cutoff) return 0.0;
    return (2.0 * cutoff - a) / cutoff;
}

Generator truncate(const Generator& gen, double cutoff) {
    if (cutoff <= 0.0) throw InvalidParameter("truncate: cutoff must be positive");
    Generator out = gen;
    out.name = gen.name + "^" + std::to_string(cutoff);
    auto base = gen.eval;
    out.eval = [base, cutoff](double t, double y, double z) {
        const double ramp = truncation_ramp(y, cutoff);
        return ramp == 0.0 ? 0.0 : ramp * base(t, y, z);
    };
    // Growth flattens outside the support; monotonicity in y is no longer
    // declared (the ramp breaks it), which is the superlinear class.
    out.growth_class = GrowthClass::SuperlinearY;
    auto phi = gen.phi;
    out.phi = [phi, cutoff](double r) { return phi(std::min(r, 2.0 * cutoff)); };
    return out;
}

Generator lipschitz_approx(const Generator& gen, double n, double q_radius, double q_step) {
    if (n <= 0.0) throw InvalidParameter("lipschitz_approx: n must be positive");
    if (gen.lin_coeff && n < *gen.lin_coeff)
        throw InvalidParameter("lipschitz_approx: n below the linear z-growth constant; "
                               "the infimum may be -inf");
    Generator out = gen;
    out.name = gen.name + "_n" + std::to_string(n);
    out.lipschitz_z = n;
    auto base = gen.eval;
    auto phi = gen.phi;
    auto g_of_t = gen.g_of_t;
    const double beta = gen.lin_coeff_or_zero();
    out.eval = [base, phi, g_of_t, beta, n, q_radius, q_step](double t, double y, double z) {
        double radius = q_radius > 0.0
                            ? q_radius
                            : 2.0 * (phi(std::abs(y)) + std::abs(g_of_t(t)) + beta * std::abs(z)) / n +
                                  std::abs(z);
        if (radius <= 0.0) return base(t, y, z);
        double step = q_step > 0.0 ? q_step : radius / 512.0;
        if (radius / step > 4e6)
            throw InvalidParameter("lipschitz_approx: more than 4e6 grid points per evaluation; "
                                   "raise q_step or shrink q_radius");
        const int m_max = static_cast<int>(std::ceil(radius / step));
        double best = base(t, y, z);  // q = z term, guarantees f_n <= f
        for (int m = 1; m <= m_max; ++m) {
            const double off = m * step;
            const double penal = n * off;
            best = std::min(best, base(t, y, z + off) + penal);
            best = std::min(best, base(t, y, z - off) + penal);
        }
        return best;
    };
    return out;
}

Scenario monotone_shift(const Scenario& scenario, double lambda) {
    const double horizon = scenario.lattice.horizon();
    Scenario out = scenario;

    const double scale_t = std::exp(lambda * horizon);
    auto terminal = scenario.terminal;
    out.terminal = [terminal, scale_t](double x) { return scale_t * terminal(x); };

    for (int i = 0; i <= scenario.lattice.steps(); ++i) {
        const double s = std::exp(lambda * scenario.lattice.t(i));
        for (int j = 0; j <= i; ++j) out.barrier(i, j) = s * scenario.barrier(i, j);
    }

    Generator g = scenario.generator;
    g.name = scenario.generator.name + "_shift" + std::to_string(lambda);
    auto base = scenario.generator.eval;
    g.eval = [base, lambda](double t, double y, double z) {
        const double e = std::exp(lambda * t);
        return e * base(t, y / e, z / e) - lambda * y;
    };
    g.mu = scenario.generator.mu - lambda;
    {
        auto phi = scenario.generator.phi;
        const double grow = std::exp(std::abs(lambda) * horizon);
        const double arg_scale = std::exp(std::max(0.0, -lambda) * horizon);
        const double al = std::abs(lambda);
        g.phi = [phi, grow, arg_scale, al](double r) { return grow * phi(arg_scale * r) + al * r; };
    }
    if (scenario.generator.quad_coeff)
        g.quad_coeff = *scenario.generator.quad_coeff * std::exp(std::max(0.0, -lambda) * horizon);
    {
        auto base_g = scenario.generator.g_of_t;
        g.g_of_t = [base_g, lambda](double t) { return std::exp(lambda * t) * std::abs(base_g(t)); };
    }
    out.generator = std::move(g);
    return out;
}

namespace {

DiscreteSolution scale_by_time(const DiscreteSolution& sol, const BinomialLattice& lattice,
                               double lambda, bool inverse) {
    if (sol.y.steps() != lattice.steps())
        throw LatticeMismatch("monotone shift map: solution does not match the lattice");
    DiscreteSolution out = sol;
    for (int i = 0; i <= lattice.steps(); ++i) {
        double s = std::exp(lambda * lattice.t(i));
        if (inverse) s = 1.0 / s;
        for (int j = 0; j <= i; ++j) {
            out.y(i, j) = s * sol.y(i, j);
            out.z(i, j) = s * sol.z(i, j);
            out.dk(i, j) = s * sol.dk(i, j);
        }
    }
    return out;
}

}  // namespace

DiscreteSolution monotone_shift_map(const DiscreteSolution& sol, const BinomialLattice& lattice,
                                    double lambda) {
    return scale_by_time(sol, lattice, lambda, false);
}

DiscreteSolution monotone_shift_unmap(const DiscreteSolution& sol, const BinomialLattice& lattice,
                                      double lambda) {
    return scale_by_time(sol, lattice, lambda, true);
}

Scenario exp_quadratic_transform(const Scenario& scenario, double a) {
    if (a <= 0.0) throw InvalidParameter("exp_quadratic_transform: A must be positive");
    if (scenario.generator.growth_class == GrowthClass::LinearZ)
        throw WrongClass("exp_quadratic_transform: driver must be in a quadratic-z class");

    Scenario out = scenario;
    auto terminal = scenario.terminal;
    out.terminal = [terminal, a](double x) { return std::exp(2.0 * a * terminal(x)); };
    for (int i = 0; i <= scenario.lattice.steps(); ++i)
        for (int j = 0; j <= i; ++j) out.barrier(i, j) = std::exp(2.0 * a * scenario.barrier(i, j));

    Generator g;
    g.name = scenario.generator.name + "_exp" + std::to_string(a);
    auto base = scenario.generator.eval;
    g.eval = [base, a](double t, double x, double l) {
        if (x <= 0.0)
            throw DomainError("exp-transformed driver evaluated at nonpositive state");
        const double y = std::log(x) / (2.0 * a);
        const double z = l / (2.0 * a * x);
        return 2.0 * a * x * (base(t, y, z) - l * l / (4.0 * a * x * x));
    };
    g.growth_class = GrowthClass::SuperlinearY;
    g.mu = 0.0;
    {
        auto phi = scenario.generator.phi;
        g.phi = [phi, a](double x) {
            const double xa = std::max(std::abs(x), 1e-300);
            return 2.0 * a * xa * phi(std::abs(std::log(xa)) / (2.0 * a));
        };
    }
    g.quad_coeff = 0.0;  // the quadratic part cancels into the envelope when A >= A_f
    out.generator = std::move(g);
    return out;
}

DiscreteSolution exp_quadratic_map(const DiscreteSolution& sol, double a) {
    if (a <= 0.0) throw InvalidParameter("exp_quadratic_map: A must be positive");
    DiscreteSolution out = sol;
    const int n = sol.y.steps();
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= i; ++j) {
            const double theta = std::exp(2.0 * a * sol.y(i, j));
            out.y(i, j) = theta;
            out.z(i, j) = 2.0 * a * sol.z(i, j) * theta;
            out.dk(i, j) = 2.0 * a * theta * sol.dk(i, j);
        }
    return out;
}

DiscreteSolution exp_quadratic_unmap(const DiscreteSolution& sol, double a) {
    if (a <= 0.0) throw InvalidParameter("exp_quadratic_unmap: A must be positive");
    DiscreteSolution out = sol;
    const int n = sol.y.steps();
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= i; ++j) {
            const double theta = sol.y(i, j);
            if (theta <= 0.0)
                throw DomainError("exp_quadratic_unmap: nonpositive envelope value");
            out.y(i, j) = std::log(theta) / (2.0 * a);
            out.z(i, j) = sol.z(i, j) / (2.0 * a * theta);
            out.dk(i, j) = sol.dk(i, j) / (2.0 * a * theta);
        }
    return out;
}

Scenario clip(const Scenario& scenario, int upper_m, int lower_p) {
    if (upper_m <= 0 || lower_p <= 0)
        throw InvalidParameter("clip: m and p must be positive integers");
    const double m = static_cast<double>(upper_m);
    const double p = static_cast<double>(lower_p);
    const auto clamp = [m, p](double v) { return std::min(std::max(v, -p), m); };

    Scenario out = scenario;
    auto terminal = scenario.terminal;
    out.terminal = [terminal, clamp](double x) { return clamp(terminal(x)); };

    Generator g = scenario.generator;
    g.name = scenario.generator.name + "_clip";
    auto base = scenario.generator.eval;
    auto g_of_t = scenario.generator.g_of_t;
    g.eval = [base, g_of_t, clamp](double t, double y, double z) {
        const double gt = g_of_t(t);
        return base(t, y, z) - gt + clamp(gt);
    };
    g.g_of_t = [g_of_t, clamp](double t) { return clamp(g_of_t(t)); };
    out.generator = std::move(g);
    return out;
}

Scenario barrier_shift(const Scenario& scenario, double b) {
    Scenario out = scenario;
    auto terminal = scenario.terminal;
    out.terminal = [terminal, b](double x) { return terminal(x) - b; };
    for (int i = 0; i <= scenario.lattice.steps(); ++i)
        for (int j = 0; j <= i; ++j) out.barrier(i, j) = scenario.barrier(i, j) - b;

    Generator g = scenario.generator;
    g.name = scenario.generator.name + "_b" + std::to_string(b);
    auto base = scenario.generator.eval;
    g.eval = [base, b](double t, double y, double z) { return base(t, y + b, z); };
    {
        auto phi = scenario.generator.phi;
        const double ab = std::abs(b);
        g.phi = [phi, ab](double r) { return phi(r + ab); };
    }
    out.generator = std::move(g);
    return out;
}

DiscreteSolution barrier_shift_unmap(const DiscreteSolution& sol, double b) {
    DiscreteSolution out = sol;
    const int n = sol.y.steps();
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= i; ++j) out.y(i, j) = sol.y(i, j) + b;
    return out;
}

}  // namespace rbsde
