#include <doctest.h>

#include <cmath>
#include <random>

#include "rbsde/lattice.hpp"

using namespace rbsde;

namespace {

std::vector<double> random_slice(int size, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    std::vector<double> out(size);
    for (double& v : out) v = dist(rng);
    return out;
}

}  // namespace

TEST_CASE("time grid endpoints are exact") {
    const TimeGrid grid{0.7, 7};
    CHECK(grid.t(0) == 0.0);
    CHECK(grid.t(7) == 0.7);
    CHECK(grid.t(3) == doctest::Approx(0.3).epsilon(1e-15));
}

TEST_CASE("build_lattice basic shapes") {
    SUBCASE("one step: terminal states are +-1 when dt = 1") {
        const BinomialLattice lat = build_lattice(1.0, 1);
        CHECK(lat.state(1, 1) == 1.0);
        CHECK(lat.state(1, 0) == -1.0);
    }
    SUBCASE("four steps: central node has state 0 and weight 6/16") {
        const BinomialLattice lat = build_lattice(1.0, 4);
        CHECK(lat.state(4, 2) == 0.0);
        CHECK(lat.node_weight(4, 2) == doctest::Approx(6.0 / 16.0).epsilon(1e-15));
    }
    SUBCASE("weights sum to one on every slice") {
        const BinomialLattice lat = build_lattice(2.0, 8);
        for (int i = 0; i <= 8; ++i) {
            const std::vector<double> w = node_weights(lat, i);
            double sum = 0.0;
            for (double v : w) sum += v;
            CHECK(std::abs(sum - 1.0) <= 1e-12);
        }
    }
    SUBCASE("invalid parameters") {
        CHECK_THROWS_AS(build_lattice(0.0, 4), InvalidParameter);
        CHECK_THROWS_AS(build_lattice(-1.0, 4), InvalidParameter);
        CHECK_THROWS_AS(build_lattice(1.0, 0), InvalidParameter);
    }
}

TEST_CASE("weights sum to one on large slices, including the log-domain start") {
    for (int n : {700, 1500}) {
        const BinomialLattice lat = build_lattice(1.0, n);
        const std::vector<double> w = node_weights(lat, n);
        double sum = 0.0, comp = 0.0;
        for (double v : w) {
            const double y = v - comp;
            const double t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
}

TEST_CASE("one-step conditional expectation") {
    const BinomialLattice lat = build_lattice(1.0, 8);
    const double dt = lat.dt();

    SUBCASE("constants are fixed points") {
        const std::vector<double> next(6, 3.25);
        const std::vector<double> e = conditional_expectation(lat, 4, next);
        for (double v : e) CHECK(v == 3.25);
    }
    SUBCASE("martingale increments vanish") {
        // field = x(i+1,.) - x(i,j), evaluated branchwise, is +-sqrt(dt).
        const int i = 3;
        std::vector<double> next(i + 2);
        for (int j = 0; j <= i; ++j) {
            for (int k = 0; k <= i + 1; ++k) next[k] = lat.state(i + 1, k) - lat.state(i, j);
            const std::vector<double> e = conditional_expectation(lat, i, next);
            CHECK(std::abs(e[j]) <= 1e-15);
        }
    }
    SUBCASE("second moment picks up exactly dt") {
        const int i = 5;
        std::vector<double> next(i + 2);
        for (int k = 0; k <= i + 1; ++k) next[k] = lat.state(i + 1, k) * lat.state(i + 1, k);
        const std::vector<double> e = conditional_expectation(lat, i, next);
        for (int j = 0; j <= i; ++j) {
            // direct arithmetic: ((x+s)^2 + (x-s)^2)/2 = x^2 + s^2
            const double x = lat.state(i, j);
            CHECK(e[j] == doctest::Approx(x * x + dt).epsilon(1e-14));
        }
    }
    SUBCASE("slice mismatch is rejected") {
        const std::vector<double> wrong(3, 0.0);
        CHECK_THROWS_AS(conditional_expectation(lat, 4, wrong), SliceMismatch);
        CHECK_THROWS_AS(martingale_coefficient(lat, 4, wrong), SliceMismatch);
    }
}

TEST_CASE("martingale coefficient") {
    const BinomialLattice lat = build_lattice(1.0, 16);
    const double s = lat.sqrt_dt();

    SUBCASE("constants have null integrand") {
        const std::vector<double> next(8, -1.5);
        for (double v : martingale_coefficient(lat, 6, next)) CHECK(v == 0.0);
    }
    SUBCASE("the integrand of the walk itself is 1") {
        const int i = 9;
        std::vector<double> next(i + 2);
        for (int k = 0; k <= i + 1; ++k) next[k] = lat.state(i + 1, k);
        for (double v : martingale_coefficient(lat, i, next))
            CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
    }
    SUBCASE("exponential field at the origin node") {
        // Two-branch difference quotient, evaluated directly as the oracle.
        const int i = 4, j = 2;  // state 0 at even slice middle
        REQUIRE(lat.state(i, j) == 0.0);
        std::vector<double> next(i + 2);
        for (int k = 0; k <= i + 1; ++k) next[k] = std::exp(2.0 * lat.state(i + 1, k));
        const double oracle = (std::exp(2.0 * s) - std::exp(-2.0 * s)) / (2.0 * s);
        CHECK(oracle == doctest::Approx(std::sinh(2.0 * s) / s).epsilon(1e-14));
        CHECK(martingale_coefficient(lat, i, next)[j] == doctest::Approx(oracle).epsilon(1e-14));
    }
    SUBCASE("one-step representation is exact on both branches") {
        for (int i : {0, 3, 11}) {
            const std::vector<double> next = random_slice(i + 2, 40 + i);
            const std::vector<double> e = conditional_expectation(lat, i, next);
            const std::vector<double> z = martingale_coefficient(lat, i, next);
            for (int j = 0; j <= i; ++j) {
                CHECK(std::abs(e[j] + z[j] * s - next[j + 1]) <= 1e-12);
                CHECK(std::abs(e[j] - z[j] * s - next[j]) <= 1e-12);
            }
        }
    }
}

TEST_CASE("conditional expectation is linear and monotone") {
    const BinomialLattice lat = build_lattice(1.0, 12);
    const int i = 7;
    const std::vector<double> a = random_slice(i + 2, 1);
    std::vector<double> b = random_slice(i + 2, 2);
    SUBCASE("linearity") {
        std::vector<double> combo(i + 2);
        for (int k = 0; k <= i + 1; ++k) combo[k] = 2.0 * a[k] - 0.5 * b[k];
        const std::vector<double> ea = conditional_expectation(lat, i, a);
        const std::vector<double> eb = conditional_expectation(lat, i, b);
        const std::vector<double> ec = conditional_expectation(lat, i, combo);
        for (int j = 0; j <= i; ++j)
            CHECK(ec[j] == doctest::Approx(2.0 * ea[j] - 0.5 * eb[j]).epsilon(1e-14));
    }
    SUBCASE("monotonicity") {
        for (int k = 0; k <= i + 1; ++k) b[k] = a[k] + std::abs(b[k]);
        const std::vector<double> ea = conditional_expectation(lat, i, a);
        const std::vector<double> eb = conditional_expectation(lat, i, b);
        for (int j = 0; j <= i; ++j) CHECK(ea[j] <= eb[j] + 1e-15);
    }
}

TEST_CASE("expectation at the root") {
    const BinomialLattice lat = build_lattice(1.0, 32);
    const int n = lat.steps();

    SUBCASE("constants") {
        const std::vector<double> c(n + 1, 2.5);
        CHECK(expectation_at_root(lat, n, c) == doctest::Approx(2.5).epsilon(1e-14));
    }
    SUBCASE("symmetric walk has mean zero") {
        std::vector<double> x(n + 1);
        for (int j = 0; j <= n; ++j) x[j] = lat.state(n, j);
        CHECK(std::abs(expectation_at_root(lat, n, x)) <= 1e-13);
    }
    SUBCASE("variance of the walk equals the horizon") {
        std::vector<double> x2(n + 1);
        for (int j = 0; j <= n; ++j) x2[j] = lat.state(n, j) * lat.state(n, j);
        CHECK(expectation_at_root(lat, n, x2) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("tower property") {
        const std::vector<double> field = random_slice(11, 7);
        const double direct = expectation_at_root(lat, 10, field);
        std::vector<double> cur = field;
        for (int i = 9; i >= 0; --i) cur = conditional_expectation(lat, i, cur);
        CHECK(cur[0] == doctest::Approx(direct).epsilon(1e-12));
    }
}

TEST_CASE("adapted fields") {
    const BinomialLattice lat = build_lattice(1.0, 5);
    AdaptedField f = make_field(lat, 1.0);
    CHECK(f.steps() == 5);
    f(3, 2) = -7.0;
    CHECK(f(3, 2) == -7.0);
    CHECK(f.max_abs() == 7.0);
    CHECK(f.all_finite());
    CHECK(f.slice(3).size() == 4);

    const AdaptedField g = make_state_field(lat, [](double x) { return 2.0 * x; });
    CHECK(g(5, 5) == doctest::Approx(2.0 * 5.0 * lat.sqrt_dt()));
}

TEST_CASE("sampled paths") {
    const BinomialLattice lat = build_lattice(1.0, 16);

    SUBCASE("deterministic in the seed") {
        const LatticePath a = sample_path(lat, 42);
        const LatticePath b = sample_path(lat, 42);
        CHECK(a.up == b.up);
        CHECK(a.state == b.state);
    }
    SUBCASE("states follow branch choices") {
        const LatticePath p = sample_path(lat, 7);
        int ups = 0;
        for (int i = 0; i < lat.steps(); ++i) {
            ups += p.up[i];
            const double step = p.state[i + 1] - p.state[i];
            CHECK(std::abs(std::abs(step) - lat.sqrt_dt()) <= 1e-15);
            CHECK((step > 0) == (p.up[i] == 1));
        }
        CHECK(p.state[16] ==
              doctest::Approx((2.0 * ups - 16.0) * lat.sqrt_dt()).epsilon(1e-14));
        // all-up corner of the map: state(N,N) = N sqrt(dt)
        CHECK(lat.state(16, 16) == doctest::Approx(16.0 * lat.sqrt_dt()));
    }
    SUBCASE("terminal mean over many paths obeys the CLT bound") {
        double mean = 0.0;
        const int paths = 10000;
        for (int s = 0; s < paths; ++s) mean += sample_path(lat, s).state[16];
        mean /= paths;
        // sd of the terminal state is sqrt(T) = 1, so 3 sigma of the mean is 0.03
        CHECK(std::abs(mean) <= 0.03);
    }
}
