#include "rbsde/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rbsde {

namespace {

std::string node_str(int i, int j) {
    return "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

void track(ClauseResidual& clause, double value, int i, int j) {
    if (value > clause.value) {
        clause.value = value;
        clause.step = i;
        clause.node = j;
    }
}

}  // namespace

double ResidualReport::max_of_all() const {
    return std::max(std::max(barrier_violation.value, skorokhod_product.value),
                    std::max(backward_identity.value, dk_negative.value));
}

double implicit_y_step(double a, double t, double z, const Generator& gen, double dt,
                       const SchemeOptions& options) {
    const auto h = [&](double y) { return y - a - dt * gen.eval(t, y, z); };

    // Growth-envelope scale of the right-hand side around a.
    const double scale = gen.phi(std::abs(a) + 1.0) + gen.quad_coeff_or_zero() * z * z +
                         std::abs(gen.g_of_t(t)) + gen.lin_coeff_or_zero() * std::abs(z) + 1.0;
    double lo = a - dt * scale;
    double hi = a + dt * scale;
    double h_lo = h(lo);
    double h_hi = h(hi);
    if (!std::isfinite(h_lo) || !std::isfinite(h_hi))
        throw SolverFailure(SolverFailure::Kind::NonfiniteValue, -1, -1,
                            "implicit step: driver returned a nonfinite value");

    int expansions = 0;
    while (h_lo > 0.0 || h_hi < 0.0) {
        if (++expansions > 60)
            throw SolverFailure(SolverFailure::Kind::RootNotBracketed, -1, -1,
                                "implicit step: no sign change after 60 bracket expansions; "
                                "declared generator metadata is likely wrong");
        const double width = hi - lo;
        if (h_lo > 0.0) {
            lo -= width;
            h_lo = h(lo);
        }
        if (h_hi < 0.0) {
            hi += width;
            h_hi = h(hi);
        }
        if (!std::isfinite(h_lo) || !std::isfinite(h_hi))
            throw SolverFailure(SolverFailure::Kind::NonfiniteValue, -1, -1,
                                "implicit step: driver returned a nonfinite value");
    }
    if (h_lo == 0.0) return lo;
    if (h_hi == 0.0) return hi;

    // Bisect to bracket collapse; track the iterate with the smallest |h| so
    // the returned root does not depend on which endpoint survives.
    double best_y = std::abs(h_lo) <= std::abs(h_hi) ? lo : hi;
    double best_h = std::min(std::abs(h_lo), std::abs(h_hi));
    for (int iter = 0; iter < options.max_root_iters; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;  // adjacent floats
        const double h_mid = h(mid);
        if (!std::isfinite(h_mid))
            throw SolverFailure(SolverFailure::Kind::NonfiniteValue, -1, -1,
                                "implicit step: driver returned a nonfinite value");
        if (std::abs(h_mid) < best_h) {
            best_h = std::abs(h_mid);
            best_y = mid;
        }
        if (h_mid == 0.0) return mid;
        if (h_mid < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    if (best_h > options.root_tol)
        throw SolverFailure(SolverFailure::Kind::MaxIterations, -1, -1,
                            "implicit step: residual " + std::to_string(best_h) +
                                " above tolerance after " + std::to_string(options.max_root_iters) +
                                " iterations");
    return best_y;
}

DiscreteSolution solve_rbsde(const Scenario& scenario, const SchemeOptions& options) {
    validate_scenario(scenario);
    const BinomialLattice& lat = scenario.lattice;
    const int n = lat.steps();
    const double dt = lat.dt();
    const double sdt = lat.sqrt_dt();

    if (options.contraction_guard && dt * std::max(scenario.generator.mu, 0.0) >= 1.0)
        throw SolverFailure(SolverFailure::Kind::ContractionViolated, -1, -1,
                            "contraction guard: dt * max(mu,0) = " +
                                std::to_string(dt * std::max(scenario.generator.mu, 0.0)) +
                                " >= 1; refine the grid or disable the guard");

    DiscreteSolution sol;
    sol.y = make_field(lat);
    sol.z = make_field(lat);
    sol.dk = make_field(lat);
    sol.options = options;

    const std::vector<double> xi = terminal_slice(scenario);
    for (int j = 0; j <= n; ++j) sol.y(n, j) = xi[j];

    const Generator& f = scenario.generator;
    for (int i = n - 1; i >= 0; --i) {
        const double t = lat.t(i);
        for (int j = 0; j <= i; ++j) {
            const double y_up = sol.y(i + 1, j + 1);
            const double y_dn = sol.y(i + 1, j);
            const double e = 0.5 * (y_up + y_dn);
            const double z = (y_up - y_dn) / (2.0 * sdt);
            double ytilde;
            try {
                if (options.y_evaluation == YEvaluation::Implicit)
                    ytilde = implicit_y_step(e, t, z, f, dt, options);
                else
                    ytilde = e + dt * f.eval(t, e, z);
            } catch (const SolverFailure& err) {
                throw SolverFailure(err.kind(), i, j,
                                    std::string(err.what()) + " at node " + node_str(i, j));
            }
            if (!std::isfinite(ytilde) || !std::isfinite(z))
                throw SolverFailure(SolverFailure::Kind::NonfiniteValue, i, j,
                                    "nonfinite value at node " + node_str(i, j));
            const double reflected = std::max(ytilde, scenario.barrier(i, j));
            sol.y(i, j) = reflected;
            sol.z(i, j) = z;
            sol.dk(i, j) = reflected - ytilde;
        }
    }

    sol.residual_report = residuals(sol, scenario);
    return sol;
}

ResidualReport residuals(const DiscreteSolution& solution, const Scenario& scenario) {
    const BinomialLattice& lat = scenario.lattice;
    if (solution.y.steps() != lat.steps())
        throw LatticeMismatch("residuals: solution does not match the scenario lattice");
    const int n = lat.steps();
    const double dt = lat.dt();
    const double sdt = lat.sqrt_dt();
    const Generator& f = scenario.generator;

    ResidualReport report;
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= i; ++j) {
            track(report.barrier_violation, scenario.barrier(i, j) - solution.y(i, j), i, j);
            if (i == n) continue;
            const double dk = solution.dk(i, j);
            track(report.dk_negative, -dk, i, j);
            track(report.skorokhod_product, std::abs(dk * (solution.y(i, j) - scenario.barrier(i, j))),
                  i, j);

            // The driver is evaluated where the scheme evaluated it.
            const double ytilde = solution.y(i, j) - dk;
            const double y_eval = solution.options.y_evaluation == YEvaluation::Implicit
                                      ? ytilde
                                      : 0.5 * (solution.y(i + 1, j + 1) + solution.y(i + 1, j));
            const double fv = f.eval(lat.t(i), y_eval, solution.z(i, j));
            const double up = solution.y(i + 1, j + 1) + fv * dt + dk - solution.z(i, j) * sdt;
            const double dn = solution.y(i + 1, j) + fv * dt + dk + solution.z(i, j) * sdt;
            track(report.backward_identity, std::abs(solution.y(i, j) - up), i, j);
            track(report.backward_identity, std::abs(solution.y(i, j) - dn), i, j);
        }
    }
    // Clamp the signed trackers at zero: no violation means 0, not a negative slack.
    report.barrier_violation.value = std::max(report.barrier_violation.value, 0.0);
    report.dk_negative.value = std::max(report.dk_negative.value, 0.0);
    return report;
}

std::vector<double> cumulative_k_along(const DiscreteSolution& solution, const LatticePath& path) {
    const int n = solution.y.steps();
    if (static_cast<int>(path.node.size()) != n + 1)
        throw LatticeMismatch("cumulative_k_along: path does not match the solution lattice");
    std::vector<double> k(static_cast<std::size_t>(n) + 1, 0.0);
    for (int i = 0; i < n; ++i) k[i + 1] = k[i] + solution.dk(i, path.node[i]);
    return k;
}

double expected_terminal_k(const DiscreteSolution& solution) {
    const int n = solution.y.steps();
    // tail(i,j) = E[sum of dK from step i on | node (i,j)], zero at the terminal.
    std::vector<double> next(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<double> cur;
    for (int i = n - 1; i >= 0; --i) {
        cur.assign(static_cast<std::size_t>(i) + 1, 0.0);
        for (int j = 0; j <= i; ++j)
            cur[j] = solution.dk(i, j) + 0.5 * (next[j] + next[j + 1]);
        next.swap(cur);
    }
    return next[0];
}

}  // namespace rbsde
