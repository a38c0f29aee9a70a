#include <benchmark/benchmark.h>

#include <random>

#include "amspec/admat.hpp"
#include "amspec/csupp.hpp"
#include "amspec/frame.hpp"
#include "amspec/mixednorm.hpp"
#include "amspec/transform.hpp"

using namespace amspec;

namespace {

FrameSystem make_frame(int kmax, int N) {
    return FrameSystem(AlphaGeometry::make(0.5, 1, select_c1(0.5, 1, kmax, 0.05)), kmax, Grid{1, 8.0, N});
}

SampledSignal noise(const Grid& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> U;
    SampledSignal f(g);
    for (auto& v : f.values) v = cd(U(rng), U(rng));
    return f;
}

}  // namespace

// args: kmax, N
void BM_Analyze(benchmark::State& st) {
    const auto fs = make_frame(int(st.range(0)), int(st.range(1)));
    const auto f = band_limited_panel(fs, 1, 1)[0];
    for (auto _ : st) benchmark::DoNotOptimize(fs.analyze(f));
    st.counters["atoms"] = double(fs.layout()->size());
}
BENCHMARK(BM_Analyze)->Args({8, 1024})->Args({16, 2048})->Unit(benchmark::kMillisecond);

void BM_Synthesize(benchmark::State& st) {
    const auto fs = make_frame(int(st.range(0)), int(st.range(1)));
    const auto c = fs.analyze(band_limited_panel(fs, 1, 1)[0]);
    for (auto _ : st) benchmark::DoNotOptimize(fs.synthesize(c));
}
BENCHMARK(BM_Synthesize)->Args({8, 1024})->Args({16, 2048})->Unit(benchmark::kMillisecond);

void BM_Gram(benchmark::State& st) {
    const auto fs = make_frame(int(st.range(0)), int(st.range(1)));
    for (auto _ : st) benchmark::DoNotOptimize(gram(fs));
}
BENCHMARK(BM_Gram)->Args({4, 512})->Args({8, 1024})->Unit(benchmark::kMillisecond);

void BM_ModNorm(benchmark::State& st) {
    const auto fs = make_frame(8, 1024);
    const auto f = band_limited_panel(fs, 1, 2)[0];
    const SpaceParams sp(1.0, 0.5, PVec({1.5}, 1.5));
    for (auto _ : st) benchmark::DoNotOptimize(mod_norm(f, sp, fs.bapu()));
}
BENCHMARK(BM_ModNorm)->Unit(benchmark::kMillisecond);

// args: dim, N
void BM_DirectionalMax(benchmark::State& st) {
    const Grid g{int(st.range(0)), 8.0, int(st.range(1))};
    const auto f = noise(g, 3);
    for (auto _ : st) benchmark::DoNotOptimize(directional_max(f, 1));
    st.counters["points"] = double(g.size());
}
BENCHMARK(BM_DirectionalMax)->Args({1, 1024})->Args({2, 128})->Unit(benchmark::kMillisecond);

void BM_PerturbedAnalyze(benchmark::State& st) {
    static const FrameSystem fs(AlphaGeometry::make(0.5, 1, select_c1(0.5, 1, 2, 0.05)), 2, Grid{1, 64.0, 512});
    const auto pb = build_perturbed_family(fs, bspline_generator(4, 1), 0, 8, FitWeights{}, 1.0 / 16.0);
    const auto f = band_limited_panel(fs, 1, 1)[0];
    for (auto _ : st) benchmark::DoNotOptimize(pb.family->analyze(f));
}
BENCHMARK(BM_PerturbedAnalyze)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
