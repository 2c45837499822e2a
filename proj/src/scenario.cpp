#include "rbsde/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rbsde {

Scenario make_scenario(BinomialLattice lattice, std::function<double(double)> terminal,
                       AdaptedField barrier, Generator generator) {
    if (barrier.steps() != lattice.steps())
        throw LatticeMismatch("scenario: barrier field does not match the lattice");
    Scenario s{std::move(lattice), std::move(terminal), std::move(barrier), std::move(generator)};
    return s;
}

std::vector<double> terminal_slice(const Scenario& scenario) {
    const int n = scenario.lattice.steps();
    std::vector<double> xi(static_cast<std::size_t>(n) + 1);
    for (int j = 0; j <= n; ++j) xi[j] = scenario.terminal(scenario.lattice.state(n, j));
    return xi;
}

double terminal_sup_norm(const Scenario& scenario) {
    double m = 0.0;
    for (double v : terminal_slice(scenario)) m = std::max(m, std::abs(v));
    return m;
}

double barrier_bound(const Scenario& scenario) { return scenario.barrier.max_abs(); }

void validate_scenario(const Scenario& scenario) {
    if (scenario.barrier.steps() != scenario.lattice.steps())
        throw LatticeMismatch("scenario: barrier field does not match the lattice");
    if (!scenario.barrier.all_finite())
        throw InvalidParameter("scenario: barrier contains nonfinite values");
    const int n = scenario.lattice.steps();
    const std::vector<double> xi = terminal_slice(scenario);
    for (int j = 0; j <= n; ++j) {
        if (!std::isfinite(xi[j]))
            throw InvalidParameter("scenario: terminal value nonfinite at node (" +
                                   std::to_string(n) + "," + std::to_string(j) + ")");
        if (scenario.barrier(n, j) > xi[j])
            throw InvalidParameter("scenario: barrier exceeds terminal value at node (" +
                                   std::to_string(n) + "," + std::to_string(j) + ")");
    }
}

}  // namespace rbsde
