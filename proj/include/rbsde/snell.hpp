#pragma once

#include "rbsde/solver.hpp"

namespace rbsde {

// Smallest supermartingale dominating a payoff field, with its decomposition:
// envelope(i,j) = max(payoff(i,j), E_i[envelope_{i+1}]),
// zbar from the exact martingale representation of envelope_{i+1}, and
// dkbar(i,j) = envelope(i,j) - E_i[envelope_{i+1}] >= 0, so that on both
// branches envelope_{i+1} = envelope_i + zbar dB - dkbar, exactly. dkbar is
// positive only where the obstacle binds.
struct SnellDecomposition {
    AdaptedField envelope;
    AdaptedField zbar;
    AdaptedField dkbar;
    double root_value() const { return envelope(0, 0); }
};

SnellDecomposition snell_envelope(const BinomialLattice& lattice, const AdaptedField& payoff);

// Literal supremum over adapted stopping rules of the expected stopped
// payoff, by exhaustive enumeration (a stop/continue flag per interior
// node). Only for N <= 6; equals the envelope's root value.
double brute_force_snell(const BinomialLattice& lattice, const AdaptedField& payoff);

// Closed-form solution of the reflected equation with driver f(t,y,z) = z^2:
// take the envelope N of e^{2 Ltilde} (obstacle e^{2L} before the terminal,
// e^{2 xi} at it) and set Y = log(N)/2, Z = zbar/(2N), dK = dkbar/(2N).
// The log transform is exact in continuous time and first-order in dt here.
DiscreteSolution explicit_quadratic(const BinomialLattice& lattice,
                                    const std::function<double(double)>& terminal,
                                    const AdaptedField& barrier);

struct IntegrabilityDiagnostic {
    double e_exp_2xi = 0.0;       // E[e^{2 xi}], exact via node weights
    double barrier_proxy = 0.0;   // e^{2 max L}, an upper proxy for E[e^{2 sup L}]
};

// Always finite on a finite lattice; reported so scenario authors can see
// the magnitude that would diverge in the continuum.
IntegrabilityDiagnostic check_integrability(const BinomialLattice& lattice,
                                            const std::function<double(double)>& terminal,
                                            const AdaptedField* barrier = nullptr);

struct IntegrabilityGrowthProbe {
    std::vector<int> steps;
    std::vector<double> values;
    bool growing = false;    // strictly increasing across the refinements
    bool diverging = false;  // growing and the last refinement still grew by >= 1.5x
};

// E[e^{2 xi}] across lattice refinements of the same horizon; a strictly
// increasing sequence flags likely divergence in the continuum.
IntegrabilityGrowthProbe integrability_growth_probe(double horizon, std::span<const int> step_counts,
                                                    const std::function<double(double)>& terminal);

}  // namespace rbsde
