#include "rbsde/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <string>

namespace rbsde {

namespace {

void track_violation(ClauseCheck& clause, double violation, int i, int j) {
    if (violation > clause.worst) {
        clause.worst = violation;
        clause.step = i;
        clause.node = j;
    }
}

}  // namespace

ComparisonReport check_comparison(const DiscreteSolution& sol1, const DiscreteSolution& sol2,
                                  const ComparisonHypotheses& hypotheses, double tol) {
    if (sol1.y.steps() != sol2.y.steps())
        throw LatticeMismatch("check_comparison: solutions live on different lattices");
    const int n = sol1.y.steps();

    ComparisonReport report;
    report.tolerance = tol;

    report.y_ordered.checked = true;
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= i; ++j)
            track_violation(report.y_ordered, sol1.y(i, j) - sol2.y(i, j), i, j);
    report.y_ordered.ok = report.y_ordered.worst <= tol;

    if (hypotheses.barriers_equal) {
        report.dk_ordered.checked = true;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j <= i; ++j)
                track_violation(report.dk_ordered, sol2.dk(i, j) - sol1.dk(i, j), i, j);
        report.dk_ordered.ok = report.dk_ordered.worst <= tol;

        // Cumulative K along paths; exhaustive when the path count is small.
        report.k_ordered.checked = true;
        const auto check_path = [&](const LatticePath& path) {
            double k1 = 0.0, k2 = 0.0;
            for (int i = 0; i < n; ++i) {
                k1 += sol1.dk(i, path.node[i]);
                k2 += sol2.dk(i, path.node[i]);
                track_violation(report.k_ordered, k2 - k1, i + 1, path.node[i + 1]);
            }
        };
        if (n <= 12) {
            LatticePath path;
            path.up.assign(n, 0);
            path.node.assign(n + 1, 0);
            path.state.assign(n + 1, 0.0);
            const std::uint64_t count = 1ull << n;
            for (std::uint64_t bits = 0; bits < count; ++bits) {
                int j = 0;
                for (int i = 0; i < n; ++i) {
                    path.node[i] = j;
                    j += static_cast<int>(bits >> i & 1ull);
                }
                path.node[n] = j;
                check_path(path);
            }
        } else {
            for (std::uint64_t seed = 0; seed < 256; ++seed) {
                // Path geometry only depends on the solution shape here.
                LatticePath path = sample_path(build_lattice(1.0, n), seed);
                check_path(path);
            }
        }
        report.k_ordered.ok = report.k_ordered.worst <= tol;
    }

    return report;
}

AprioriBoundReport apriori_bound(const Scenario& scenario, const SchemeOptions& options) {
    if (scenario.generator.growth_class != GrowthClass::QuadraticZ)
        throw WrongClass("apriori_bound: requires a quadratic-z class driver, got " +
                         std::string(growth_class_name(scenario.generator.growth_class)));
    if (scenario.barrier.max_value() > 0.0)
        throw InvalidParameter("apriori_bound: barrier must be nonpositive; apply barrier_shift "
                               "by sup|L| first");

    const double xi_inf = terminal_sup_norm(scenario);
    const double rate = scenario.generator.phi(0.0) + scenario.generator.mu;
    const double growth = std::max(std::exp(rate * scenario.lattice.horizon()), 1.0);

    AprioriBoundReport report;
    report.bound = growth * (xi_inf + 1.0);
    const DiscreteSolution sol = solve_rbsde(scenario, options);
    report.max_abs_y = sol.y.max_abs();
    report.satisfied = report.max_abs_y <= report.bound + 1e-9;
    return report;
}

NormEstimates norm_estimates(const DiscreteSolution& solution, const BinomialLattice& lattice,
                             std::uint64_t seed) {
    if (solution.y.steps() != lattice.steps())
        throw LatticeMismatch("norm_estimates: solution does not match the lattice");
    const int n = lattice.steps();
    const double dt = lattice.dt();

    NormEstimates est;

    // E[sum Z^2 dt] and E[sum |Z| dt]: exact via slice weights.
    for (int i = 0; i < n; ++i) {
        const std::vector<double> w = node_weights(lattice, i);
        double z2 = 0.0, az = 0.0;
        for (int j = 0; j <= i; ++j) {
            z2 += w[j] * solution.z(i, j) * solution.z(i, j);
            az += w[j] * std::abs(solution.z(i, j));
        }
        est.e_int_z2 += z2 * dt;
        est.e_int_abs_z += az * dt;
    }

    // E[K_T] and E[K_T^2] via exact backward tail-sum recursions:
    // m1(i,j) = E[S_i | node], m2(i,j) = E[S_i^2 | node], S_i the tail sum.
    {
        std::vector<double> m1(static_cast<std::size_t>(n) + 1, 0.0);
        std::vector<double> m2(static_cast<std::size_t>(n) + 1, 0.0);
        std::vector<double> m1_next, m2_next;
        for (int i = n - 1; i >= 0; --i) {
            m1_next.assign(static_cast<std::size_t>(i) + 1, 0.0);
            m2_next.assign(static_cast<std::size_t>(i) + 1, 0.0);
            for (int j = 0; j <= i; ++j) {
                const double dk = solution.dk(i, j);
                const double a1 = 0.5 * (m1[j] + m1[j + 1]);
                const double a2 = 0.5 * (m2[j] + m2[j + 1]);
                m1_next[j] = dk + a1;
                m2_next[j] = dk * dk + 2.0 * dk * a1 + a2;
            }
            m1.swap(m1_next);
            m2.swap(m2_next);
        }
        est.e_kt = m1[0];
        est.e_kt2 = m2[0];
    }

    // E[max_i Y_i^2]: exact path enumeration for N <= 20, seeded sampling above.
    const auto path_sup_y2 = [&](const std::vector<int>& nodes) {
        double m = 0.0;
        for (int i = 0; i <= n; ++i) m = std::max(m, solution.y(i, nodes[i]) * solution.y(i, nodes[i]));
        return m;
    };
    if (n <= 20) {
        est.sup_exact = true;
        std::vector<int> nodes(static_cast<std::size_t>(n) + 1, 0);
        const std::uint64_t count = 1ull << n;
        const double p = 1.0 / static_cast<double>(count);
        double acc = 0.0;
        for (std::uint64_t bits = 0; bits < count; ++bits) {
            int j = 0;
            nodes[0] = 0;
            for (int i = 0; i < n; ++i) {
                j += static_cast<int>(bits >> i & 1ull);
                nodes[i + 1] = j;
            }
            acc += p * path_sup_y2(nodes);
        }
        est.e_sup_y2 = acc;
    } else {
        const int samples = 100000;
        double acc = 0.0, acc2 = 0.0;
        for (int s = 0; s < samples; ++s) {
            const LatticePath path = sample_path(lattice, seed + static_cast<std::uint64_t>(s));
            const double v = path_sup_y2(path.node);
            acc += v;
            acc2 += v * v;
        }
        const double mean = acc / samples;
        const double var = std::max(acc2 / samples - mean * mean, 0.0);
        est.e_sup_y2 = mean;
        est.sup_std_error = std::sqrt(var / samples);
    }
    return est;
}

AdaptedField pointwise_bound_field(const Scenario& scenario, double c_beta) {
    const Generator& gen = scenario.generator;
    if (gen.growth_class != GrowthClass::LinearZ)
        throw WrongClass("pointwise_bound_field: requires a linear-z class driver, got " +
                         std::string(growth_class_name(gen.growth_class)));
    const BinomialLattice& lat = scenario.lattice;
    const int n = lat.steps();
    const double horizon = lat.horizon();
    const double dt = lat.dt();
    const double beta = gen.lin_coeff_or_zero();
    const double alpha = 1.0 + 2.0 * beta * beta;
    const double b = barrier_bound(scenario);
    const double e_at = std::exp(alpha * horizon);
    const double e_2at = std::exp(2.0 * alpha * horizon);

    // E[xi^2 | node] by backward averaging of the terminal field.
    AdaptedField xi2 = make_field(lat);
    {
        const std::vector<double> xi = terminal_slice(scenario);
        for (int j = 0; j <= n; ++j) xi2(n, j) = xi[j] * xi[j];
        for (int i = n - 1; i >= 0; --i)
            for (int j = 0; j <= i; ++j) xi2(i, j) = 0.5 * (xi2(i + 1, j) + xi2(i + 1, j + 1));
    }

    // Deterministic tail integral of g^2 (left endpoints).
    std::vector<double> g2_tail(static_cast<std::size_t>(n) + 1, 0.0);
    for (int i = n - 1; i >= 0; --i) {
        const double g = gen.g_of_t(lat.t(i));
        g2_tail[i] = g2_tail[i + 1] + g * g * dt;
    }

    const double additive = e_at * (gen.phi(e_at * b) + gen.phi(2.0 * horizon)) +
                            c_beta * e_2at * b * b + alpha * (e_at * b + 2.0 * horizon) + 1.0;

    AdaptedField m = make_field(lat);
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= i; ++j)
            m(i, j) = std::sqrt(2.0 * e_2at * (xi2(i, j) + g2_tail[i]) + additive);
    return m;
}

namespace {

SweepResult finish_sweep(SweepResult result, double stab_tol) {
    result.diffs.assign(result.y0.size(), 0.0);
    for (std::size_t k = 1; k < result.y0.size(); ++k)
        result.diffs[k] = result.y0[k] - result.y0[k - 1];
    result.monotone = true;
    for (std::size_t k = 1; k < result.y0.size(); ++k)
        if (result.diffs[k] < -1e-10) result.monotone = false;
    result.stabilized =
        result.y0.size() >= 2 && std::abs(result.diffs.back()) < stab_tol;
    return result;
}

std::string trimmed_number(double v) {
    std::string s = std::to_string(v);
    while (s.find('.') != std::string::npos && (s.back() == '0' || s.back() == '.')) {
        const bool dot = s.back() == '.';
        s.pop_back();
        if (dot) break;
    }
    return s;
}

}  // namespace

SweepResult approximation_sweep(const Scenario& scenario, SweepKind kind,
                                std::span<const double> values, const SchemeOptions& options,
                                double stab_tol) {
    if (values.empty()) throw InvalidParameter("approximation_sweep: empty value list");
    for (std::size_t k = 1; k < values.size(); ++k)
        if (values[k] <= values[k - 1])
            throw InvalidParameter("approximation_sweep: values must be strictly ascending");
    if (kind == SweepKind::LipschitzN) {
        const double beta = scenario.generator.lin_coeff_or_zero();
        for (double v : values)
            if (v < beta)
                throw InvalidParameter("approximation_sweep: lipschitz value below the linear "
                                       "z-growth constant");
    } else {
        for (double v : values)
            if (v <= 0.0) throw InvalidParameter("approximation_sweep: truncation level must be positive");
    }

    SweepResult result;
    for (double v : values) {
        Scenario member = scenario;
        member.generator = kind == SweepKind::LipschitzN ? lipschitz_approx(scenario.generator, v)
                                                         : truncate(scenario.generator, v);
        const DiscreteSolution sol = solve_rbsde(member, options);
        result.labels.push_back(trimmed_number(v));
        result.y0.push_back(sol.y0());
    }
    return finish_sweep(std::move(result), stab_tol);
}

SweepResult approximation_sweep(const Scenario& scenario,
                                std::span<const std::pair<int, int>> values,
                                const SchemeOptions& options, double stab_tol) {
    if (values.empty()) throw InvalidParameter("approximation_sweep: empty value list");
    for (std::size_t k = 1; k < values.size(); ++k)
        if (values[k].first < values[k - 1].first || values[k].second < values[k - 1].second)
            throw InvalidParameter("approximation_sweep: clip pairs must be ascending");

    SweepResult result;
    for (auto [m, p] : values) {
        const Scenario member = clip(scenario, m, p);
        const DiscreteSolution sol = solve_rbsde(member, options);
        result.labels.push_back(std::to_string(m) + ":" + std::to_string(p));
        result.y0.push_back(sol.y0());
    }
    return finish_sweep(std::move(result), stab_tol);
}

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
    // 53-bit mantissa draw; deterministic across platforms.
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
}

std::function<double(double)> random_terminal(std::mt19937_64& rng) {
    // Bounded, slope <= 1 functions of the terminal state.
    switch (rng() % 3) {
        case 0: {
            const double a = uniform(rng, 0.5, 1.5);
            const double s = uniform(rng, 0.3, 1.0 / std::max(a, 1.0));
            const double c = uniform(rng, -0.5, 0.5);
            return [a, s, c](double x) { return a * std::tanh(s * x) + c; };
        }
        case 1: {
            const double slope = uniform(rng, -1.0, 1.0);
            const double icept = uniform(rng, -0.5, 0.5);
            const double lo = uniform(rng, -1.5, -0.5);
            const double hi = uniform(rng, 0.5, 1.5);
            return [slope, icept, lo, hi](double x) {
                return std::clamp(slope * x + icept, lo, hi);
            };
        }
        default: {
            const double k = uniform(rng, -0.5, 0.5);
            const double cap = uniform(rng, 0.5, 1.5);
            return [k, cap](double x) { return std::min(std::max(x - k, 0.0), cap); };
        }
    }
}

}  // namespace

ScenarioPair random_comparison_pair(ComparisonRegime regime, std::uint64_t seed, double horizon,
                                    int steps) {
    std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ull + 0x2545f4914f6cdd1dull);
    const BinomialLattice lattice = build_lattice(horizon, steps);

    const auto terminal1 = random_terminal(rng);

    Generator gen1;
    switch (regime) {
        case ComparisonRegime::OrderedGeneratorsQuadratic:
            gen1 = rng() % 2 ? make_fquad(uniform(rng, 0.05, 0.25))
                             : make_fdrift(uniform(rng, -1.0, 1.0));
            break;
        default:
            gen1 = rng() % 2 ? make_fmono(uniform(rng, -1.0, 1.0), uniform(rng, 0.0, 1.0))
                             : make_f0();
            break;
    }

    // A constant barrier strictly below the terminal minimum keeps the data
    // admissible; backward drift can still bring Y down to it.
    double xi_min = std::numeric_limits<double>::infinity();
    for (int j = 0; j <= steps; ++j)
        xi_min = std::min(xi_min, terminal1(lattice.state(steps, j)));
    const double gap = uniform(rng, 0.05, 1.0);
    const double level1 = xi_min - gap;

    ScenarioPair pair{
        make_scenario(lattice, terminal1, make_field(lattice, level1), gen1),
        make_scenario(lattice, terminal1, make_field(lattice, level1), gen1),
        {},
    };

    switch (regime) {
        case ComparisonRegime::OrderedGenerators:
        case ComparisonRegime::OrderedGeneratorsQuadratic: {
            const double df = uniform(rng, 0.0, 0.5);
            pair.second.generator = offset_generator(gen1, df);
            const double dxi = uniform(rng, 0.0, 0.5);
            const bool positive_part = rng() % 2 == 0;
            pair.second.terminal = [terminal1, dxi, positive_part](double x) {
                return terminal1(x) + (positive_part ? dxi * std::max(x, 0.0) : dxi);
            };
            pair.hypotheses.terminal_ordered = true;
            pair.hypotheses.generator_ordered = true;
            pair.hypotheses.barriers_equal = true;
            break;
        }
        case ComparisonRegime::OrderedBarriers: {
            // Same data, lower first barrier: L1 = L2 - u <= L2 < min xi.
            const double u = uniform(rng, 0.0, 0.75);
            pair.first.barrier = make_field(lattice, level1 - u);
            pair.hypotheses.barrier_ordered = true;
            break;
        }
    }
    return pair;
}

}  // namespace rbsde
