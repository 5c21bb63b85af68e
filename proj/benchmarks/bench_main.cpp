#include <benchmark/benchmark.h>

#include "fsolink/experiment.hpp"
#include "fsolink/link.hpp"
#include "fsolink/spectrum.hpp"
#include "fsolink/synthesis.hpp"

namespace {

using namespace fsolink;

void BM_Synthesis(benchmark::State& state) {
  const auto models = calibrate_default_models();
  const auto n = static_cast<std::size_t>(state.range(0));
  std::uint64_t seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(synthesize_phase_noise(models.primary, 20e3, n, seed++));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Synthesis)->RangeMultiplier(4)->Range(1 << 16, 1 << 22)->Unit(benchmark::kMillisecond);

void BM_Welch(benchmark::State& state) {
  const auto models = calibrate_default_models();
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = synthesize_phase_noise(models.secondary, 20e3, n, 7);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_psd(x, 65536, 0.5, Window::hann));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Welch)->RangeMultiplier(4)->Range(1 << 18, 1 << 22)->Unit(benchmark::kMillisecond);

void BM_RunLink(benchmark::State& state) {
  auto config = state.range(1) ? LinkConfig::scaled_defaults() : LinkConfig::physical_defaults();
  config.samples = static_cast<std::size_t>(state.range(0));
  const auto inputs = make_noise_inputs(config, calibrate_default_models(), 11);
  const RunOptions options{.record_trace = false};
  for (auto _ : state) benchmark::DoNotOptimize(run_link(config, inputs, StabilizationMode::doppler, options));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunLink)
    ->ArgsProduct({{1 << 18, 1 << 21}, {0, 1}})
    ->ArgNames({"samples", "scaled"})
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
