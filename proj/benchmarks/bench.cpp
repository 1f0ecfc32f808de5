#include <benchmark/benchmark.h>

#include "helmscat/layer_potentials.hpp"
#include "helmscat/specfun.hpp"

namespace {

using namespace helmscat;

void bm_cyl_bessel_upto(benchmark::State& state) {
    const int mmax = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto v = cyl_bessel_upto(mmax, 7.3);
        benchmark::DoNotOptimize(v);
    }
}
BENCHMARK(bm_cyl_bessel_upto)->Arg(8)->Arg(32)->Arg(128);

void bm_hankel1_upto(benchmark::State& state) {
    const int mmax = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto v = hankel1_upto(mmax, 4.0);
        benchmark::DoNotOptimize(v);
    }
}
BENCHMARK(bm_hankel1_upto)->Arg(8)->Arg(32)->Arg(128);

DomainSpec disk_spec(double edge) {
    DomainSpec spec;
    spec.obstacle = make_disk(1.0, edge);
    spec.ball_radius = 2.0;
    return spec;
}

void bm_triangulate(benchmark::State& state) {
    const double h = 1.0 / static_cast<double>(state.range(0));
    const DomainSpec spec = disk_spec(std::max(0.11, 2.2 * h));
    for (auto _ : state) {
        TransmissionMesh mesh = triangulate(spec, h);
        benchmark::DoNotOptimize(mesh);
        state.counters["nodes"] = mesh.node_count();
    }
}
BENCHMARK(bm_triangulate)->Arg(10)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

void bm_assemble(benchmark::State& state) {
    const double h = 1.0 / static_cast<double>(state.range(0));
    const DomainSpec spec = disk_spec(std::max(0.11, 2.2 * h));
    const TransmissionMesh mesh = triangulate(spec, h);
    for (auto _ : state) {
        auto [K, M] = assemble(mesh, AssemblyRegion::both);
        benchmark::DoNotOptimize(K);
        benchmark::DoNotOptimize(M);
    }
}
BENCHMARK(bm_assemble)->Arg(10)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

void bm_dtn(benchmark::State& state) {
    const DomainSpec spec = disk_spec(0.11);
    const TransmissionMesh mesh = triangulate(spec, 0.05);
    const int M = default_mode_cutoff(2.0, 2.0);
    for (auto _ : state) {
        DtNForm dtn = assemble_dtn(mesh, 2.0, M);
        benchmark::DoNotOptimize(dtn);
    }
}
BENCHMARK(bm_dtn)->Unit(benchmark::kMillisecond);

void bm_transmission_factorize(benchmark::State& state) {
    const double h = 1.0 / static_cast<double>(state.range(0));
    const DomainSpec spec = disk_spec(std::max(0.11, 2.2 * h));
    const TransmissionMesh mesh = triangulate(spec, h);
    const DtNForm dtn = assemble_dtn(mesh, 2.0, default_mode_cutoff(2.0, 2.0));
    for (auto _ : state) {
        TransmissionSolver solver = TransmissionSolver::helmholtz(mesh, 2.0, dtn);
        benchmark::DoNotOptimize(solver);
    }
}
BENCHMARK(bm_transmission_factorize)
    ->Arg(10)
    ->Arg(20)
    ->Unit(benchmark::kMillisecond);

void bm_transmission_solve(benchmark::State& state) {
    const DomainSpec spec = disk_spec(0.11);
    const TransmissionMesh mesh = triangulate(spec, 0.05);
    const DtNForm dtn = assemble_dtn(mesh, 2.0, default_mode_cutoff(2.0, 2.0));
    const TransmissionSolver solver = TransmissionSolver::helmholtz(mesh, 2.0, dtn);
    CotraceVector g;
    g.v = Eigen::VectorXcd::Ones(mesh.interface_count());
    for (auto _ : state) {
        TransmissionField u = single_layer(solver, g);
        benchmark::DoNotOptimize(u);
    }
}
BENCHMARK(bm_transmission_solve)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
