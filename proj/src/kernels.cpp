#include "rdsphere/kernels.hpp"

#include <omp.h>

#include <cmath>
#include <cstdlib>
#include <string>

#include "rdsphere/errors.hpp"

namespace rdsphere {

int kernel_threads() {
    const char* env = std::getenv("RDS_SPHERE_THREADS");
    if (env) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) return int(std::min<long>(v, omp_get_max_threads()));
    }
    return omp_get_max_threads();
}

namespace {

struct Row {
    std::vector<std::uint32_t> source;
    std::vector<double> weight;
    std::vector<SpherePoint> preimage;
    bool ok = true;
};

Row solve_row(const RationalMap& T, const Potential& phi, const Grid& grid, std::size_t i) {
    Row r;
    try {
        for (const auto& e : preimages(T, grid.point(i)).entries) {
            r.preimage.push_back(e.point);
            r.weight.push_back(double(e.multiplicity) * std::exp(phi(e.point)));
            r.source.push_back(std::uint32_t(grid.locate(e.point)));
        }
    } catch (const NumericalError&) {
        r = Row{};
        r.ok = false;
    }
    return r;
}

TransferTable assemble(std::vector<Row>& rows, const RationalMap& T, GridPtr grid) {
    TransferTable t;
    t.grid = grid;
    t.degree = T.degree();
    const std::size_t n = rows.size();
    for (std::size_t i = 0; i < n; ++i)
        if (!rows[i].ok) t.failed.push_back(i);
    if (double(t.failed.size()) > kMaxFailedFraction * double(n))
        throw NumericalError("preimage solve failed at " + std::to_string(t.failed.size()) + " of " +
                             std::to_string(n) + " grid points");
    // A failed row borrows the preimages of the nearest good grid point.
    for (std::size_t i : t.failed) {
        double best = INFINITY;
        std::size_t donor = i;
        for (std::size_t j = 0; j < n; ++j) {
            if (!rows[j].ok) continue;
            double c = chord2(grid->unit(i), grid->unit(j));
            if (c < best) {
                best = c;
                donor = j;
            }
        }
        require(donor != i, "no grid point has a valid preimage solve");
        rows[i].source = rows[donor].source;
        rows[i].weight = rows[donor].weight;
        rows[i].preimage = rows[donor].preimage;
    }
    t.offsets.reserve(n + 1);
    t.offsets.push_back(0);
    for (auto& r : rows) {
        t.source.insert(t.source.end(), r.source.begin(), r.source.end());
        t.weight.insert(t.weight.end(), r.weight.begin(), r.weight.end());
        t.preimage.insert(t.preimage.end(), r.preimage.begin(), r.preimage.end());
        t.offsets.push_back(std::uint32_t(t.source.size()));
    }
    return t;
}

}  // namespace

TransferTable build_table_serial(const RationalMap& T, const Potential& phi, GridPtr grid) {
    require(grid != nullptr, "missing grid");
    std::vector<Row> rows(grid->size());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = solve_row(T, phi, *grid, i);
    return assemble(rows, T, grid);
}

TransferTable build_table_parallel(const RationalMap& T, const Potential& phi, GridPtr grid) {
    require(grid != nullptr, "missing grid");
    std::vector<Row> rows(grid->size());
    const long n = long(rows.size());
#pragma omp parallel for schedule(dynamic, 64) num_threads(kernel_threads())
    for (long i = 0; i < n; ++i) rows[std::size_t(i)] = solve_row(T, phi, *grid, std::size_t(i));
    return assemble(rows, T, grid);
}

void apply_table_serial(const TransferTable& t, const std::vector<double>& f, std::vector<double>& out) {
    require(f.size() == t.grid->size(), "function size does not match the grid");
    const std::size_t n = t.offsets.size() - 1;
    out.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0;
        for (std::uint32_t k = t.offsets[i]; k < t.offsets[i + 1]; ++k) s += t.weight[k] * f[t.source[k]];
        out[i] = s;
    }
}

void apply_table_parallel(const TransferTable& t, const std::vector<double>& f, std::vector<double>& out) {
    require(f.size() == t.grid->size(), "function size does not match the grid");
    const long n = long(t.offsets.size()) - 1;
    out.assign(std::size_t(n), 0.0);
#pragma omp parallel for schedule(static) num_threads(kernel_threads())
    for (long i = 0; i < n; ++i) {
        double s = 0;
        for (std::uint32_t k = t.offsets[std::size_t(i)]; k < t.offsets[std::size_t(i) + 1]; ++k)
            s += t.weight[k] * f[t.source[k]];
        out[std::size_t(i)] = s;
    }
}

}  // namespace rdsphere
