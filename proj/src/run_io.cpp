#include "rbsde/run_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace rbsde {

namespace {

void write_atomically(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InvalidParameter("cannot open output file '" + tmp + "'");
        out << content;
        if (!out) throw InvalidParameter("short write to '" + tmp + "'");
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw InvalidParameter("cannot rename '" + tmp + "' to '" + path + "'");
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_slice_csv(const std::string& path, const Scenario& scenario,
                     const DiscreteSolution& solution) {
    const BinomialLattice& lat = scenario.lattice;
    std::ostringstream out;
    out << "i,j,t,x,Y,Z,dK,L\n";
    for (int i = 0; i <= lat.steps(); ++i)
        for (int j = 0; j <= i; ++j)
            out << i << ',' << j << ',' << format_double(lat.t(i)) << ','
                << format_double(lat.state(i, j)) << ',' << format_double(solution.y(i, j)) << ','
                << format_double(solution.z(i, j)) << ',' << format_double(solution.dk(i, j)) << ','
                << format_double(scenario.barrier(i, j)) << '\n';
    write_atomically(path, out.str());
}

void write_path_csv(const std::string& path, const Scenario& scenario,
                    const DiscreteSolution& solution, const LatticePath& lattice_path) {
    const BinomialLattice& lat = scenario.lattice;
    const std::vector<double> k = cumulative_k_along(solution, lattice_path);
    std::ostringstream out;
    out << "t,x,Y,Z,K\n";
    for (int i = 0; i <= lat.steps(); ++i) {
        const int j = lattice_path.node[i];
        out << format_double(lat.t(i)) << ',' << format_double(lattice_path.state[i]) << ','
            << format_double(solution.y(i, j)) << ',' << format_double(solution.z(i, j)) << ','
            << format_double(k[i]) << '\n';
    }
    write_atomically(path, out.str());
}

void write_sweep_csv(const std::string& path, const SweepResult& result) {
    std::ostringstream out;
    out << "param,Y0,diff\n";
    for (std::size_t k = 0; k < result.y0.size(); ++k) {
        out << result.labels[k] << ',' << format_double(result.y0[k]) << ',';
        if (k > 0) out << format_double(result.diffs[k]);
        out << '\n';
    }
    write_atomically(path, out.str());
}

}  // namespace rbsde
