#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "rbsde/errors.hpp"

namespace rbsde {

// Uniform grid t_i = i*T/N on [0, T]. Endpoints are exact by construction.
struct TimeGrid {
    double horizon = 1.0;
    int steps = 1;

    double dt() const { return horizon / steps; }
    // t_i = T * (i/N) rather than accumulation, so t_0 = 0 and t_N = T exactly.
    double t(int i) const { return horizon * (static_cast<double>(i) / steps); }
};

// Recombining binomial model of scalar Brownian motion.
//
// Node (i,j), 0 <= j <= i, carries state x(i,j) = (2j - i) * sqrt(dt); from
// (i,j) the walk moves up to (i+1,j+1) or down to (i+1,j), each with
// probability 1/2, so one-step increments are +-sqrt(dt) and match the first
// two Brownian moments exactly.
class BinomialLattice {
public:
    explicit BinomialLattice(TimeGrid grid);

    const TimeGrid& grid() const { return grid_; }
    int steps() const { return grid_.steps; }
    double horizon() const { return grid_.horizon; }
    double dt() const { return grid_.dt(); }
    double sqrt_dt() const { return sqrt_dt_; }
    double t(int i) const { return grid_.t(i); }

    int slice_size(int i) const { return i + 1; }
    double state(int i, int j) const { return (2.0 * j - i) * sqrt_dt_; }

    // Unconditional probability of node (i,j): C(i,j)/2^i. Whole slices are
    // cheaper through node_weights().
    double node_weight(int i, int j) const;

    bool same_shape(const BinomialLattice& other) const {
        return grid_.steps == other.grid_.steps && grid_.horizon == other.grid_.horizon;
    }

private:
    TimeGrid grid_;
    double sqrt_dt_;
};

BinomialLattice build_lattice(double horizon, int steps);

// Slice i weights w(i,j) = C(i,j)/2^i, j = 0..i. The binomial profile is
// accumulated multiplicatively (log-domain start above i = 1000, where the
// raw coefficients overflow) and self-normalized, so the slice sums to 1 up
// to a final rounding.
std::vector<double> node_weights(const BinomialLattice& lattice, int i);

// One real value per lattice node, triangular storage over slices 0..N.
// Carrier for the processes Y, Z, K, L and envelope fields.
class AdaptedField {
public:
    AdaptedField() = default;
    explicit AdaptedField(int steps, double init = 0.0)
        : steps_(steps),
          values_(static_cast<std::size_t>(steps + 1) * (steps + 2) / 2, init) {
        if (steps < 0) throw InvalidParameter("AdaptedField: steps must be >= 0");
    }

    int steps() const { return steps_; }

    double& operator()(int i, int j) { return values_[offset(i) + j]; }
    double operator()(int i, int j) const { return values_[offset(i) + j]; }

    std::span<double> slice(int i) { return {values_.data() + offset(i), static_cast<std::size_t>(i + 1)}; }
    std::span<const double> slice(int i) const {
        return {values_.data() + offset(i), static_cast<std::size_t>(i + 1)};
    }

    bool same_shape(const AdaptedField& other) const { return steps_ == other.steps_; }

    // Largest absolute value over all nodes.
    double max_abs() const;
    // Largest value over all nodes.
    double max_value() const;
    bool all_finite() const;

private:
    std::size_t offset(int i) const { return static_cast<std::size_t>(i) * (i + 1) / 2; }

    int steps_ = 0;
    std::vector<double> values_;
};

AdaptedField make_field(const BinomialLattice& lattice, double init = 0.0);
// Field populated nodewise as fn(t_i, x(i,j)).
AdaptedField make_field(const BinomialLattice& lattice,
                        const std::function<double(double t, double x)>& fn);
// Barrier from a function of state only.
AdaptedField make_state_field(const BinomialLattice& lattice,
                              const std::function<double(double x)>& fn);

// E[field | node (i,j)] for a field living on slice i+1:
// value(i,j) = (next[j+1] + next[j]) / 2.
std::vector<double> conditional_expectation(const BinomialLattice& lattice, int i,
                                            std::span<const double> next);

// Integrand of the exact one-step martingale representation:
// value(i,j) = (next[j+1] - next[j]) / (2 sqrt(dt)), so that
// next = E[next|node] + Z * dB on both branches, exactly.
std::vector<double> martingale_coefficient(const BinomialLattice& lattice, int i,
                                           std::span<const double> next);

// E[field at slice i] via node weights.
double expectation_at_root(const BinomialLattice& lattice, int i, std::span<const double> slice);

// One sampled trajectory through the lattice.
struct LatticePath {
    std::vector<int> up;       // branch choices, size N (1 = up)
    std::vector<int> node;     // j index per slice, size N+1
    std::vector<double> state; // x along the path, size N+1
};

// Deterministic function of the seed; uses a dedicated 64-bit generator per
// path so distinct seeds give independent-looking trajectories.
LatticePath sample_path(const BinomialLattice& lattice, std::uint64_t seed);

}  // namespace rbsde
