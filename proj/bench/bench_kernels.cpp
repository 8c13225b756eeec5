// Parallel kernels next to their serial twins.

#include <benchmark/benchmark.h>

#include "support.hpp"
#include "wbsample/kernels.hpp"
#include "wbsample/url_filter.hpp"

using namespace wbsample;

namespace {

const std::vector<std::uint64_t>& domain_sizes() {
  static const auto v = [] {
    Rng rng(1);
    std::vector<std::uint64_t> out(1'000'000);
    for (auto& n : out) n = 1 + static_cast<std::uint64_t>(std::pow(rng.unit(), 6) * 1e6);
    return out;
  }();
  return v;
}

const std::vector<std::string>& urls() {
  static const auto v = [] {
    Rng rng(2);
    std::vector<std::string> out(50'000);
    for (auto& u : out) u = wbtest::random_url_text(rng);
    return out;
  }();
  return v;
}

const std::vector<TimeMap>& timemaps() {
  static const auto v = [] {
    Rng rng(3);
    std::vector<TimeMap> out;
    for (int i = 0; i < 64; ++i) out.push_back(wbtest::random_timemap(rng, 5000, 800));
    return out;
  }();
  return v;
}

void BM_reduced_total(benchmark::State& s) {
  for (auto _ : s) benchmark::DoNotOptimize(kernels::reduced_total(domain_sizes(), 3, 1));
}
void BM_reduced_total_serial(benchmark::State& s) {
  for (auto _ : s) benchmark::DoNotOptimize(kernels::reduced_total_serial(domain_sizes(), 3, 1));
}
void BM_evaluate_batch(benchmark::State& s) {
  for (auto _ : s) benchmark::DoNotOptimize(kernels::evaluate_batch(urls()));
}
void BM_evaluate_batch_serial(benchmark::State& s) {
  for (auto _ : s) benchmark::DoNotOptimize(kernels::evaluate_batch_serial(urls()));
}
void BM_rehydrate_batch(benchmark::State& s) {
  for (auto _ : s) benchmark::DoNotOptimize(kernels::rehydrate_batch(timemaps(), 1000));
}
void BM_rehydrate_batch_serial(benchmark::State& s) {
  for (auto _ : s) benchmark::DoNotOptimize(kernels::rehydrate_batch_serial(timemaps(), 1000));
}

}  // namespace

BENCHMARK(BM_reduced_total)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_reduced_total_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_evaluate_batch)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_evaluate_batch_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_rehydrate_batch)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_rehydrate_batch_serial)->Unit(benchmark::kMillisecond);

int main(int argc, char** argv) {
  // Build the inputs up front so no benchmark pays for generating them.
  domain_sizes();
  urls();
  timemaps();
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
}
