#pragma once

#include <cstdint>
#include <string>

#include "rbsde/analysis.hpp"

namespace rbsde {

// CSV conventions: '.' decimal point, no thousands separators, %.17g floats
// (round-trip exact), header always emitted, newline-terminated final row.
// Files are written atomically (temp file + rename), so identical inputs
// give byte-identical outputs.

// Columns i,j,t,x,Y,Z,dK,L over all nodes; Z and dK read 0 on the terminal
// slice (no increment is assigned there).
void write_slice_csv(const std::string& path, const Scenario& scenario,
                     const DiscreteSolution& solution);

// Columns t,x,Y,Z,K along one sampled path; K is the running sum of visited
// increments (K(0) = 0).
void write_path_csv(const std::string& path, const Scenario& scenario,
                    const DiscreteSolution& solution, const LatticePath& lattice_path);

// Columns param,Y0,diff (diff empty on the first row).
void write_sweep_csv(const std::string& path, const SweepResult& result);

std::string format_double(double v);

}  // namespace rbsde
