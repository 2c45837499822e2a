#include "rbsde/snell.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

namespace rbsde {

SnellDecomposition snell_envelope(const BinomialLattice& lattice, const AdaptedField& payoff) {
    if (payoff.steps() != lattice.steps())
        throw LatticeMismatch("snell_envelope: payoff field does not match the lattice");
    const int n = lattice.steps();
    const double sdt = lattice.sqrt_dt();

    SnellDecomposition dec;
    dec.envelope = make_field(lattice);
    dec.zbar = make_field(lattice);
    dec.dkbar = make_field(lattice);

    for (int j = 0; j <= n; ++j) dec.envelope(n, j) = payoff(n, j);
    for (int i = n - 1; i >= 0; --i) {
        for (int j = 0; j <= i; ++j) {
            const double up = dec.envelope(i + 1, j + 1);
            const double dn = dec.envelope(i + 1, j);
            const double cont = 0.5 * (up + dn);
            const double env = std::max(payoff(i, j), cont);
            dec.envelope(i, j) = env;
            dec.zbar(i, j) = (up - dn) / (2.0 * sdt);
            dec.dkbar(i, j) = env - cont;  // > 0 only where the obstacle binds
        }
    }
    return dec;
}

double brute_force_snell(const BinomialLattice& lattice, const AdaptedField& payoff) {
    const int n = lattice.steps();
    if (n > 6)
        throw TooLarge("brute_force_snell: enumeration limited to N <= 6, got N = " +
                       std::to_string(n));
    if (payoff.steps() != n)
        throw LatticeMismatch("brute_force_snell: payoff field does not match the lattice");

    // A stopping rule is a stop/continue bit per interior node; terminal
    // nodes always stop. Rules whose bits sit on unreachable nodes just
    // duplicate values, which a max does not mind.
    const int interior = n * (n + 1) / 2;
    const std::uint64_t rules = 1ull << interior;
    const auto bit_index = [](int i, int j) { return i * (i + 1) / 2 + j; };

    double best = -std::numeric_limits<double>::infinity();
    std::vector<double> prob(static_cast<std::size_t>(n) + 1);
    std::vector<double> next(static_cast<std::size_t>(n) + 1);
    for (std::uint64_t rule = 0; rule < rules; ++rule) {
        double value = 0.0;
        std::fill(prob.begin(), prob.end(), 0.0);
        prob[0] = 1.0;
        for (int i = 0; i < n; ++i) {
            std::fill(next.begin(), next.end(), 0.0);
            for (int j = 0; j <= i; ++j) {
                const double p = prob[j];
                if (p == 0.0) continue;
                if (rule >> bit_index(i, j) & 1ull) {
                    value += p * payoff(i, j);
                } else {
                    next[j] += 0.5 * p;
                    next[j + 1] += 0.5 * p;
                }
            }
            prob.swap(next);
        }
        for (int j = 0; j <= n; ++j) value += prob[j] * payoff(n, j);
        best = std::max(best, value);
    }
    return best;
}

DiscreteSolution explicit_quadratic(const BinomialLattice& lattice,
                                    const std::function<double(double)>& terminal,
                                    const AdaptedField& barrier) {
    if (barrier.steps() != lattice.steps())
        throw LatticeMismatch("explicit_quadratic: barrier field does not match the lattice");
    const int n = lattice.steps();
    for (int j = 0; j <= n; ++j)
        if (barrier(n, j) > terminal(lattice.state(n, j)))
            throw InvalidParameter("explicit_quadratic: barrier exceeds terminal value at node (" +
                                   std::to_string(n) + "," + std::to_string(j) + ")");

    AdaptedField payoff = make_field(lattice);
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= i; ++j) {
            const double v = i == n ? terminal(lattice.state(n, j)) : barrier(i, j);
            const double p = std::exp(2.0 * v);
            if (!(p > 0.0))
                throw DomainError("explicit_quadratic: payoff e^{2L} underflowed to zero at node (" +
                                  std::to_string(i) + "," + std::to_string(j) +
                                  "); barrier too negative for double precision");
            payoff(i, j) = p;
        }

    const SnellDecomposition dec = snell_envelope(lattice, payoff);

    DiscreteSolution sol;
    sol.y = make_field(lattice);
    sol.z = make_field(lattice);
    sol.dk = make_field(lattice);
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= i; ++j) {
            const double env = dec.envelope(i, j);
            sol.y(i, j) = 0.5 * std::log(env);
            sol.z(i, j) = dec.zbar(i, j) / (2.0 * env);
            sol.dk(i, j) = dec.dkbar(i, j) / (2.0 * env);
        }
    return sol;
}

IntegrabilityDiagnostic check_integrability(const BinomialLattice& lattice,
                                            const std::function<double(double)>& terminal,
                                            const AdaptedField* barrier) {
    const int n = lattice.steps();
    std::vector<double> slice(static_cast<std::size_t>(n) + 1);
    for (int j = 0; j <= n; ++j) slice[j] = std::exp(2.0 * terminal(lattice.state(n, j)));
    IntegrabilityDiagnostic diag;
    diag.e_exp_2xi = expectation_at_root(lattice, n, slice);
    if (barrier) {
        if (barrier->steps() != n)
            throw LatticeMismatch("check_integrability: barrier does not match the lattice");
        diag.barrier_proxy = std::exp(2.0 * barrier->max_value());
    }
    return diag;
}

IntegrabilityGrowthProbe integrability_growth_probe(double horizon, std::span<const int> step_counts,
                                                    const std::function<double(double)>& terminal) {
    IntegrabilityGrowthProbe probe;
    for (int n : step_counts) {
        const BinomialLattice lat = build_lattice(horizon, n);
        probe.steps.push_back(n);
        probe.values.push_back(check_integrability(lat, terminal).e_exp_2xi);
    }
    probe.growing = probe.values.size() >= 2;
    for (std::size_t k = 1; k < probe.values.size(); ++k)
        if (probe.values[k] <= probe.values[k - 1]) probe.growing = false;
    // A convergent sequence also increases toward its limit; call it diverging
    // only while refinement still multiplies the value.
    probe.diverging = probe.growing &&
                      probe.values.back() >= 1.5 * probe.values[probe.values.size() - 2];
    return probe;
}

}  // namespace rbsde
