#include <benchmark/benchmark.h>

#include "aoheom/propagator.hpp"
#include "aoheom/spectroscopy.hpp"

namespace {

using namespace aoheom;

ModelContext reference_model(int n_max) {
    return make_model(enumerate_basis(n_max), BathSpec::isotropic(0.01, 1.0, 1.0), {1, 1, 1}, 2);
}

void BM_HeomRhs(benchmark::State& st) {
    const auto model = reference_model(static_cast<int>(st.range(0)));
    const auto workers = static_cast<unsigned>(st.range(1));
    const auto in = boltzmann_initial(model.basis, 1.0, model.space);
    auto out = HierarchyState::zeros(model.space, model.dimension());
    for (auto _ : st) {
        heom_rhs(in, model, out, {TerminatorMode::eq8, workers});
        benchmark::DoNotOptimize(out.ados.front().data());
    }
    st.counters["ados"] = static_cast<double>(model.space->size());
}
BENCHMARK(BM_HeomRhs)->ArgsProduct({{2, 3, 4, 5}, {1}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_HeomRhs)->Args({5, 2})->Args({5, 4})->Unit(benchmark::kMicrosecond);

void BM_Rk4Step(benchmark::State& st) {
    const auto model = reference_model(static_cast<int>(st.range(0)));
    auto state = boltzmann_initial(model.basis, 1.0, model.space);
    Rk4Integrator rk4(model, {});
    for (auto _ : st) rk4.step(state, 0.1);
}
BENCHMARK(BM_Rk4Step)->DenseRange(2, 5)->Unit(benchmark::kMillisecond);

void BM_Spectrum(benchmark::State& st) {
    ResponseTrace trace;
    trace.dt = 0.1;
    for (int j = 0; j <= 3000; ++j) {
        trace.times.push_back(0.1 * j);
        trace.values.push_back(std::exp(Complex(0.0, -0.375 * 0.1 * j)));
    }
    for (auto _ : st) benchmark::DoNotOptimize(spectrum_from_response(trace, 0.0167, 4));
}
BENCHMARK(BM_Spectrum)->Unit(benchmark::kMicrosecond);

void BM_PositionMatrix(benchmark::State& st) {
    const auto basis = enumerate_basis(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(position_operator_matrix(basis, Axis::x));
}
BENCHMARK(BM_PositionMatrix)->DenseRange(3, 5)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
