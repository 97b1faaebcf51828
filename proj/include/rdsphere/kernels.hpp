#pragma once

#include <cstdint>
#include <vector>

#include "rdsphere/grid.hpp"
#include "rdsphere/potential.hpp"
#include "rdsphere/ratmap.hpp"

namespace rdsphere {

// Thread cap from RDS_SPHERE_THREADS (unset or invalid: the OpenMP default).
int kernel_threads();

// One transfer step on a grid in compressed-row form: row i lists the preimages x
// of grid point i with weight multiplicity * exp(phi(x)) and the grid index nearest x.
struct TransferTable {
    GridPtr grid;
    int degree = 0;
    std::vector<std::uint32_t> offsets;  // row i is [offsets[i], offsets[i+1])
    std::vector<std::uint32_t> source;
    std::vector<double> weight;
    std::vector<SpherePoint> preimage;
    std::vector<std::size_t> failed;  // rows whose root solve failed (copied from a neighbour)
};

// Reference and OpenMP builds produce identical tables.
TransferTable build_table_serial(const RationalMap& T, const Potential& phi, GridPtr grid);
TransferTable build_table_parallel(const RationalMap& T, const Potential& phi, GridPtr grid);

// out[i] = sum over row i of weight * f[source].
void apply_table_serial(const TransferTable& t, const std::vector<double>& f, std::vector<double>& out);
void apply_table_parallel(const TransferTable& t, const std::vector<double>& f, std::vector<double>& out);

// Largest fraction of failed rows tolerated before a build aborts.
inline constexpr double kMaxFailedFraction = 1e-3;

}  // namespace rdsphere
