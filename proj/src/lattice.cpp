#include "rbsde/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace rbsde {

namespace {

void require_slice(const BinomialLattice& lattice, int i, std::span<const double> next) {
    if (i < 0 || i + 1 > lattice.steps())
        throw SliceMismatch("one-step operation: slice index " + std::to_string(i) + " out of range");
    if (next.size() != static_cast<std::size_t>(i + 2))
        throw SliceMismatch("one-step operation: field has " + std::to_string(next.size()) +
                            " values, slice " + std::to_string(i + 1) + " needs " +
                            std::to_string(i + 2));
}

double kahan_sum(std::span<const double> values) {
    double sum = 0.0, comp = 0.0;
    for (double v : values) {
        double y = v - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

}  // namespace

BinomialLattice::BinomialLattice(TimeGrid grid) : grid_(grid), sqrt_dt_(std::sqrt(grid.dt())) {
    if (grid.horizon <= 0.0) throw InvalidParameter("lattice: horizon must be positive");
    if (grid.steps < 1) throw InvalidParameter("lattice: step count must be >= 1");
}

BinomialLattice build_lattice(double horizon, int steps) {
    return BinomialLattice(TimeGrid{horizon, steps});
}

std::vector<double> node_weights(const BinomialLattice& lattice, int i) {
    if (i < 0 || i > lattice.steps())
        throw SliceMismatch("node_weights: slice index out of range");
    std::vector<double> w(static_cast<std::size_t>(i) + 1);
    if (i <= 1000) {
        // C(i,j) stays below DBL_MAX up to i ~ 1028; scaling by 2^-i is exact.
        double c = 1.0;
        w[0] = std::ldexp(c, -i);
        for (int j = 0; j < i; ++j) {
            c = c * static_cast<double>(i - j) / static_cast<double>(j + 1);
            w[j + 1] = std::ldexp(c, -i);
        }
    } else {
        // Start from the central node and recurse outward; the common scale
        // cancels in the normalization below.
        int jc = i / 2;
        w[jc] = 1.0;
        for (int j = jc; j < i; ++j) w[j + 1] = w[j] * static_cast<double>(i - j) / (j + 1);
        for (int j = jc; j > 0; --j) w[j - 1] = w[j] * static_cast<double>(j) / (i - j + 1);
    }
    double s = kahan_sum(w);
    for (double& v : w) v /= s;
    return w;
}

double BinomialLattice::node_weight(int i, int j) const {
    if (i < 0 || i > steps() || j < 0 || j > i)
        throw InvalidParameter("node_weight: node index out of range");
    return node_weights(*this, i)[static_cast<std::size_t>(j)];
}

double AdaptedField::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

double AdaptedField::max_value() const {
    double m = -std::numeric_limits<double>::infinity();
    for (double v : values_) m = std::max(m, v);
    return m;
}

bool AdaptedField::all_finite() const {
    for (double v : values_)
        if (!std::isfinite(v)) return false;
    return true;
}

AdaptedField make_field(const BinomialLattice& lattice, double init) {
    return AdaptedField(lattice.steps(), init);
}

AdaptedField make_field(const BinomialLattice& lattice,
                        const std::function<double(double, double)>& fn) {
    AdaptedField f(lattice.steps());
    for (int i = 0; i <= lattice.steps(); ++i)
        for (int j = 0; j <= i; ++j) f(i, j) = fn(lattice.t(i), lattice.state(i, j));
    return f;
}

AdaptedField make_state_field(const BinomialLattice& lattice,
                              const std::function<double(double)>& fn) {
    return make_field(lattice, [&fn](double, double x) { return fn(x); });
}

std::vector<double> conditional_expectation(const BinomialLattice& lattice, int i,
                                            std::span<const double> next) {
    require_slice(lattice, i, next);
    std::vector<double> out(static_cast<std::size_t>(i) + 1);
    for (int j = 0; j <= i; ++j) out[j] = 0.5 * (next[j + 1] + next[j]);
    return out;
}

std::vector<double> martingale_coefficient(const BinomialLattice& lattice, int i,
                                           std::span<const double> next) {
    require_slice(lattice, i, next);
    const double denom = 2.0 * lattice.sqrt_dt();
    std::vector<double> out(static_cast<std::size_t>(i) + 1);
    for (int j = 0; j <= i; ++j) out[j] = (next[j + 1] - next[j]) / denom;
    return out;
}

double expectation_at_root(const BinomialLattice& lattice, int i, std::span<const double> slice) {
    if (i < 0 || i > lattice.steps())
        throw SliceMismatch("expectation_at_root: slice index out of range");
    if (slice.size() != static_cast<std::size_t>(i + 1))
        throw SliceMismatch("expectation_at_root: field size does not match slice");
    std::vector<double> w = node_weights(lattice, i);
    std::vector<double> terms(slice.size());
    for (std::size_t j = 0; j < slice.size(); ++j) terms[j] = w[j] * slice[j];
    return kahan_sum(terms);
}

LatticePath sample_path(const BinomialLattice& lattice, std::uint64_t seed) {
    const int n = lattice.steps();
    LatticePath path;
    path.up.resize(n);
    path.node.resize(n + 1);
    path.state.resize(n + 1);
    path.node[0] = 0;
    path.state[0] = 0.0;
    std::mt19937_64 rng(seed);
    int j = 0;
    for (int i = 0; i < n; ++i) {
        // Top bit of the raw draw; bit-reproducible across platforms, unlike
        // std::bernoulli_distribution.
        int up = static_cast<int>(rng() >> 63);
        path.up[i] = up;
        j += up;
        path.node[i + 1] = j;
        path.state[i + 1] = lattice.state(i + 1, j);
    }
    return path;
}

}  // namespace rbsde
