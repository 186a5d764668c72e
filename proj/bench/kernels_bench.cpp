// Serial reference kernels against their OpenMP counterparts on a pooled GOE
// campaign. The Arg of each OpenMP benchmark is the thread count.

#include <benchmark/benchmark.h>
#include <omp.h>

#include "knn/ensembles.hpp"
#include "knn/spectral_stats.hpp"
#include "knn/spectral_stats_reference.hpp"
#include "knn/unfolding.hpp"

namespace {

using knn::unfolding::UnfoldedSpectrum;

const std::vector<UnfoldedSpectrum>& campaign() {
  static const auto spectra = [] {
    std::vector<UnfoldedSpectrum> out;
    for (std::size_t r = 0; r < 32; ++r)
      out.push_back(knn::unfolding::unfold_semicircle(knn::ensembles::sample({knn::EnsembleClass::GOE, 1000, 7}, r)));
    return out;
  }();
  return spectra;
}

const std::vector<double>& k10_spacings() {
  static const auto values = knn::stats::knn_spacings(campaign(), 10).values;
  return values;
}

constexpr knn::stats::NumberVarianceOptions kNv{30.0, 0.25, 0.5};

void BM_MomentsReference(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(knn::stats::reference::knn_moments(campaign(), 1, 50));
}

void BM_MomentsOpenMP(benchmark::State& state) {
  omp_set_num_threads(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(knn::stats::knn_moments(campaign(), 1, 50));
}

void BM_HistogramReference(benchmark::State& state) {
  const auto range = knn::stats::default_histogram_range(10, 0.6);
  for (auto _ : state) benchmark::DoNotOptimize(knn::stats::reference::build_histogram(k10_spacings(), 0.05, range));
}

void BM_HistogramOpenMP(benchmark::State& state) {
  omp_set_num_threads(static_cast<int>(state.range(0)));
  const auto range = knn::stats::default_histogram_range(10, 0.6);
  for (auto _ : state) benchmark::DoNotOptimize(knn::stats::build_histogram(k10_spacings(), 0.05, range));
}

void BM_NumberVarianceReference(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(knn::stats::reference::number_variance(campaign(), kNv));
}

void BM_NumberVarianceOpenMP(benchmark::State& state) {
  omp_set_num_threads(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(knn::stats::number_variance(campaign(), kNv));
}

}  // namespace

BENCHMARK(BM_MomentsReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MomentsOpenMP)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HistogramReference)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_HistogramOpenMP)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_NumberVarianceReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NumberVarianceOpenMP)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
