#include <doctest.h>

#include <cmath>
#include <random>

#include "rbsde/snell.hpp"

using namespace rbsde;

namespace {

AdaptedField random_payoff(const BinomialLattice& lat, std::uint64_t seed, double lo = -1.0,
                           double hi = 2.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    AdaptedField f = make_field(lat);
    for (int i = 0; i <= lat.steps(); ++i)
        for (int j = 0; j <= i; ++j) f(i, j) = dist(rng);
    return f;
}

void check_decomposition_invariants(const BinomialLattice& lat, const AdaptedField& payoff,
                                    const SnellDecomposition& dec) {
    const int n = lat.steps();
    const double sdt = lat.sqrt_dt();
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= i; ++j) {
            CHECK(dec.envelope(i, j) >= payoff(i, j));  // dominance
            if (i == n) continue;
            const double cont = 0.5 * (dec.envelope(i + 1, j + 1) + dec.envelope(i + 1, j));
            // dynamic programming fixed point
            CHECK(dec.envelope(i, j) == std::max(payoff(i, j), cont));
            CHECK(dec.dkbar(i, j) >= 0.0);
            // increase only on the contact set, exactly
            CHECK(dec.dkbar(i, j) * (dec.envelope(i, j) - payoff(i, j)) == 0.0);
            // decomposition identity on both branches
            const double up = dec.envelope(i, j) + dec.zbar(i, j) * sdt - dec.dkbar(i, j);
            const double dn = dec.envelope(i, j) - dec.zbar(i, j) * sdt - dec.dkbar(i, j);
            CHECK(std::abs(up - dec.envelope(i + 1, j + 1)) <= 1e-12);
            CHECK(std::abs(dn - dec.envelope(i + 1, j)) <= 1e-12);
        }
}

}  // namespace

TEST_CASE("envelope of simple payoffs") {
    const BinomialLattice lat = build_lattice(1.0, 8);
    SUBCASE("constant payoff is its own envelope") {
        const AdaptedField payoff = make_field(lat, 3.0);
        const SnellDecomposition dec = snell_envelope(lat, payoff);
        for (int i = 0; i <= 8; ++i)
            for (int j = 0; j <= i; ++j) {
                CHECK(dec.envelope(i, j) == 3.0);
                CHECK(dec.zbar(i, j) == 0.0);
                CHECK(dec.dkbar(i, j) == 0.0);
            }
    }
    SUBCASE("a martingale payoff needs no compensation") {
        const AdaptedField payoff = make_state_field(lat, [](double x) { return x; });
        const SnellDecomposition dec = snell_envelope(lat, payoff);
        for (int i = 0; i <= 8; ++i)
            for (int j = 0; j <= i; ++j) {
                CHECK(dec.envelope(i, j) == doctest::Approx(lat.state(i, j)).epsilon(1e-14));
                if (i < 8) {
                    CHECK(dec.zbar(i, j) == doctest::Approx(1.0).epsilon(1e-13));
                    CHECK(std::abs(dec.dkbar(i, j)) <= 1e-15);
                }
            }
    }
}

TEST_CASE("envelope equals the brute-force stopping value") {
    SUBCASE("put-style payoff on four steps") {
        const BinomialLattice lat = build_lattice(1.0, 4);
        const AdaptedField payoff =
            make_state_field(lat, [](double x) { return std::max(1.0 - x, 0.0); });
        const SnellDecomposition dec = snell_envelope(lat, payoff);
        const double bf = brute_force_snell(lat, payoff);
        CHECK(std::abs(dec.root_value() - bf) <= 1e-12);
        check_decomposition_invariants(lat, payoff, dec);
    }
    SUBCASE("random payoffs across small lattices") {
        for (int n = 1; n <= 6; ++n) {
            const BinomialLattice lat = build_lattice(1.0, n);
            for (std::uint64_t seed = 0; seed < (n <= 4 ? 8u : 3u); ++seed) {
                const AdaptedField payoff = random_payoff(lat, 100 * n + seed);
                const SnellDecomposition dec = snell_envelope(lat, payoff);
                CHECK(std::abs(dec.root_value() - brute_force_snell(lat, payoff)) <= 1e-12);
                check_decomposition_invariants(lat, payoff, dec);
            }
        }
    }
    SUBCASE("payoff maximal at the root stops immediately") {
        const BinomialLattice lat = build_lattice(1.0, 3);
        AdaptedField payoff = random_payoff(lat, 9, -1.0, 1.0);
        payoff(0, 0) = 5.0;
        CHECK(brute_force_snell(lat, payoff) == doctest::Approx(5.0));
        CHECK(snell_envelope(lat, payoff).root_value() == doctest::Approx(5.0));
    }
    SUBCASE("enumeration cap") {
        const BinomialLattice lat = build_lattice(1.0, 7);
        CHECK_THROWS_AS(brute_force_snell(lat, make_field(lat, 1.0)), TooLarge);
    }
}

TEST_CASE("explicit solution of the quadratic-driver equation") {
    SUBCASE("flat data give the constant solution with the barrier touching") {
        const BinomialLattice lat = build_lattice(1.0, 8);
        const double c = 0.7;
        const DiscreteSolution sol =
            explicit_quadratic(lat, [c](double) { return c; }, make_field(lat, c));
        for (int i = 0; i <= 8; ++i)
            for (int j = 0; j <= i; ++j) {
                CHECK(sol.y(i, j) == doctest::Approx(c).epsilon(1e-14));
                CHECK(std::abs(sol.z(i, j)) <= 1e-14);
                CHECK(std::abs(sol.dk(i, j)) <= 1e-14);
            }
    }
    SUBCASE("terminal equal to the walk: product closed form") {
        const BinomialLattice lat = build_lattice(1.0, 256);
        const DiscreteSolution sol =
            explicit_quadratic(lat, [](double x) { return x; }, make_field(lat, -20.0));
        // E[e^{2 x_T} | node] = e^{2x} cosh(2 sqrt(dt))^{N-i}, far above e^{-40},
        // so the envelope never touches and Y = x + (N-i) log cosh(2 sqrt(dt))/2.
        const double lc = std::log(std::cosh(2.0 * lat.sqrt_dt()));
        for (int i = 0; i <= 256; i += 51)
            for (int j = 0; j <= i; j += 7) {
                const double expected = lat.state(i, j) + 0.5 * (256 - i) * lc;
                CHECK(sol.y(i, j) == doctest::Approx(expected).epsilon(1e-10));
            }
        CHECK(std::abs(sol.y0() - 128.0 * lc) <= 1e-10);
        CHECK(std::abs(sol.y0() - 1.0) <= 0.02);  // continuum value is the horizon
    }
    SUBCASE("identity residual against the quadratic driver shrinks like dt") {
        std::vector<double> resid;
        for (int n : {64, 128, 256}) {
            const BinomialLattice lat = build_lattice(1.0, n);
            const Scenario s = make_scenario(lat, [](double x) { return x; },
                                             make_field(lat, -20.0), make_fquad(1.0));
            const DiscreteSolution sol =
                explicit_quadratic(lat, s.terminal, s.barrier);
            resid.push_back(residuals(sol, s).backward_identity.value);
        }
        CHECK(resid[0] > 0.0);
        const double r01 = resid[0] / resid[1];
        const double r12 = resid[1] / resid[2];
        // at least first order: each N-doubling cuts the residual by 2-3x
        CHECK(r01 >= 1.4);
        CHECK(r01 <= 3.6);
        CHECK(r12 >= 1.4);
        CHECK(r12 <= 3.6);
        // and the rescaled constant residual/dt stays bounded
        CHECK(resid[2] * 256.0 <= resid[0] * 64.0);
    }
    SUBCASE("jensen lower bound through the envelope") {
        const BinomialLattice lat = build_lattice(1.0, 32);
        auto terminal = [](double x) { return std::tanh(x) - 0.2; };
        const DiscreteSolution sol = explicit_quadratic(lat, terminal, make_field(lat, -4.0));
        // E[xi | node] and E[xi^- | node] by backward averaging
        AdaptedField mean_xi = make_field(lat), mean_xi_neg = make_field(lat);
        for (int j = 0; j <= 32; ++j) {
            const double v = terminal(lat.state(32, j));
            mean_xi(32, j) = v;
            mean_xi_neg(32, j) = std::max(-v, 0.0);
        }
        for (int i = 31; i >= 0; --i)
            for (int j = 0; j <= i; ++j) {
                mean_xi(i, j) = 0.5 * (mean_xi(i + 1, j) + mean_xi(i + 1, j + 1));
                mean_xi_neg(i, j) = 0.5 * (mean_xi_neg(i + 1, j) + mean_xi_neg(i + 1, j + 1));
            }
        for (int i = 0; i <= 32; ++i)
            for (int j = 0; j <= i; ++j) {
                CHECK(sol.y(i, j) >= mean_xi(i, j) - 1e-12);
                CHECK(sol.y(i, j) >= -mean_xi_neg(i, j) - 1e-12);
            }
    }
    SUBCASE("precondition and underflow guards") {
        const BinomialLattice lat = build_lattice(1.0, 4);
        CHECK_THROWS_AS(
            explicit_quadratic(lat, [](double x) { return x; }, make_field(lat, 0.5)),
            InvalidParameter);
        CHECK_THROWS_AS(
            explicit_quadratic(lat, [](double) { return 0.0; }, make_field(lat, -400.0)),
            DomainError);
    }
}

TEST_CASE("integrability diagnostics") {
    SUBCASE("zero terminal") {
        const BinomialLattice lat = build_lattice(1.0, 16);
        CHECK(check_integrability(lat, [](double) { return 0.0; }).e_exp_2xi ==
              doctest::Approx(1.0).epsilon(1e-13));
    }
    SUBCASE("walk terminal matches the cosh product and the continuum value") {
        const BinomialLattice lat = build_lattice(1.0, 256);
        const double e = check_integrability(lat, [](double x) { return x; }).e_exp_2xi;
        const double closed_form = std::pow(std::cosh(2.0 * lat.sqrt_dt()), 256);
        CHECK(e == doctest::Approx(closed_form).epsilon(1e-11));
        CHECK(std::abs(e - std::exp(2.0)) <= 0.05);
        CHECK(std::abs(e - std::exp(2.0)) / std::exp(2.0) <= 0.02);
    }
    SUBCASE("barrier proxy") {
        const BinomialLattice lat = build_lattice(1.0, 8);
        const AdaptedField barrier = make_field(lat, -0.5);
        const IntegrabilityDiagnostic diag =
            check_integrability(lat, [](double) { return 0.0; }, &barrier);
        CHECK(diag.barrier_proxy == doctest::Approx(std::exp(-1.0)).epsilon(1e-13));
    }
    SUBCASE("squared terminal grows without bound under refinement") {
        const std::vector<int> steps{64, 128, 256};
        const IntegrabilityGrowthProbe probe =
            integrability_growth_probe(1.0, steps, [](double x) { return x * x; });
        CHECK(probe.growing);
        CHECK(probe.diverging);
    }
    SUBCASE("walk terminal converges, no divergence flag") {
        const std::vector<int> steps{64, 128, 256};
        const IntegrabilityGrowthProbe probe =
            integrability_growth_probe(1.0, steps, [](double x) { return x; });
        CHECK_FALSE(probe.diverging);
    }
}
