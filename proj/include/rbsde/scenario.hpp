#pragma once

#include <functional>

#include "rbsde/generator.hpp"
#include "rbsde/lattice.hpp"

namespace rbsde {

// The data triple of a reflected backward equation on a lattice: terminal
// value xi (a function of the terminal state), lower barrier L (a field over
// all nodes) and driver f.
struct Scenario {
    BinomialLattice lattice;
    std::function<double(double x)> terminal;
    AdaptedField barrier;
    Generator generator;
};

Scenario make_scenario(BinomialLattice lattice, std::function<double(double)> terminal,
                       AdaptedField barrier, Generator generator);

// xi evaluated on the terminal slice.
std::vector<double> terminal_slice(const Scenario& scenario);

// sup norm of xi over terminal nodes.
double terminal_sup_norm(const Scenario& scenario);

// b = max nodewise |L|.
double barrier_bound(const Scenario& scenario);

// Checks L(N,j) <= xi(x(N,j)) at every terminal node and that the barrier is
// finite; throws InvalidParameter naming the offending node.
void validate_scenario(const Scenario& scenario);

}  // namespace rbsde
