// Serial against OpenMP transfer kernels on lattices of growing size.

#include <benchmark/benchmark.h>

#include "rdsphere/kernels.hpp"

using namespace rdsphere;

namespace {

const RationalMap& map_under_test() {
    static const RationalMap T = RationalMap::qc(0.3);
    return T;
}

template <TransferTable (*Build)(const RationalMap&, const Potential&, GridPtr)>
void BM_build(benchmark::State& state) {
    auto grid = Grid::lattice(std::size_t(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(Build(map_under_test(), Potential::constant(0), grid));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <void (*Apply)(const TransferTable&, const std::vector<double>&, std::vector<double>&)>
void BM_apply(benchmark::State& state) {
    auto grid = Grid::lattice(std::size_t(state.range(0)));
    const auto table = build_table_parallel(map_under_test(), Potential::constant(0), grid);
    std::vector<double> f(grid->size(), 1.0), out;
    for (auto _ : state) {
        Apply(table, f, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_build<build_table_serial>)->Name("build/serial")->Arg(1000)->Arg(4000)->Arg(16000)->Arg(64000);
BENCHMARK(BM_build<build_table_parallel>)->Name("build/parallel")->Arg(1000)->Arg(4000)->Arg(16000)->Arg(64000);
BENCHMARK(BM_apply<apply_table_serial>)->Name("apply/serial")->Arg(1000)->Arg(4000)->Arg(16000)->Arg(64000);
BENCHMARK(BM_apply<apply_table_parallel>)->Name("apply/parallel")->Arg(1000)->Arg(4000)->Arg(16000)->Arg(64000);

BENCHMARK_MAIN();
