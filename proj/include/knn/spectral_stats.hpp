#pragma once

// k-th neighbor spacing statistics and the number variance.
//
// The campaign kernels here parallelize over realizations with OpenMP and
// reduce per-realization partial sums in realization order, so results do not
// depend on the thread count. Straightforward serial versions live in
// spectral_stats_reference.hpp and back the tests and benchmarks.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "knn/types.hpp"
#include "knn/unfolding.hpp"

namespace knn::stats {

using unfolding::UnfoldedSpectrum;

struct MomentSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  std::optional<double> skewness;
  std::optional<double> excess_kurtosis;
  /// Standard errors from the spread of per-realization estimates when at
  /// least two realizations contribute, otherwise from the iid formula.
  double standard_error_of_mean = 0.0;
  double se_variance = 0.0;
  std::optional<double> se_skewness;
};

/// Power sums of (x - shift) up to fourth order; merges are exact in the sense
/// that the result only depends on merge order, which callers fix.
struct PowerSums {
  double shift = 0.0;
  std::uint64_t count = 0;
  double s1 = 0.0, s2 = 0.0, s3 = 0.0, s4 = 0.0;

  void add(double x) noexcept {
    const double y = x - shift;
    const double y2 = y * y;
    ++count;
    s1 += y;
    s2 += y2;
    s3 += y2 * y;
    s4 += y2 * y2;
  }
  void merge(const PowerSums& o) noexcept {
    count += o.count;
    s1 += o.s1;
    s2 += o.s2;
    s3 += o.s3;
    s4 += o.s4;
  }
};

/// Mean, unbiased variance and population skewness / excess kurtosis.
MomentSummary summarize(const PowerSums& p);

/// Spacings E_{i+k} - E_i of one level sequence.
std::vector<double> knn_spacings(std::span<const double> levels, int k);

/// Pools spacings over realizations, never across them. Throws ValidationError
/// when k >= the retained length of any realization.
SpacingSet knn_spacings(std::span<const UnfoldedSpectrum> spectra, int k);

/// Moments of a pooled set; uses realization boundaries when present.
MomentSummary moments(const SpacingSet& set);

/// Moments for every k in [k_min, k_max] in one pass over the spectra.
std::vector<MomentSummary> knn_moments(std::span<const UnfoldedSpectrum> spectra, int k_min, int k_max);

struct Histogram {
  std::vector<double> edges;      // strictly increasing, size n_bins + 1
  std::vector<double> densities;  // count / (n_in_range * width)
  std::vector<std::uint64_t> counts;
  std::uint64_t n_in_range = 0;
  std::uint64_t n_total = 0;

  std::size_t n_bins() const { return counts.size(); }
  double bin_width() const { return edges.size() > 1 ? edges[1] - edges[0] : 0.0; }
  double center(std::size_t i) const { return 0.5 * (edges[i] + edges[i + 1]); }
};

struct HistogramRange {
  double lo = 0.0;
  double hi = 0.0;
};

/// [max(0, k - 5 sqrt(variance)), k + 5 sqrt(variance)].
HistogramRange default_histogram_range(int k, double variance);

constexpr double kDefaultBinWidth = 0.05;

/// Equal-width bins anchored at range.lo; values outside [lo, hi) are counted
/// in n_total only. Throws ValidationError for width <= 0 or an empty range.
Histogram build_histogram(std::span<const double> values, double bin_width, HistogramRange range);
Histogram build_histogram(const SpacingSet& set, double bin_width, HistogramRange range);

struct NumberVarianceCurve {
  std::vector<double> L_grid;
  std::vector<double> sigma2;
  std::uint64_t n_starts = 0;  // summed over realizations at L = 0
  std::size_t n_realizations = 0;

  /// Exact grid hit when available, linear interpolation otherwise.
  double at(double L) const;
};

struct NumberVarianceOptions {
  double L_max = 30.0;
  double L_step = 0.25;
  double start_stride = 0.5;
};

/// Sigma^2(L): variance of the count of levels in [xi, xi + L) pooled over all
/// window starts xi = lo + m * stride (xi + L <= hi) and all realizations.
NumberVarianceCurve number_variance(std::span<const UnfoldedSpectrum> spectra, const NumberVarianceOptions& opts);

struct GapRow {
  int k = 0;
  double delta = 0.0;
  double sigma2 = 0.0;
  double gap = 0.0;  // delta - sigma2
};

/// Delta^(k) - Sigma^2(k) for each summary; summaries[i] belongs to k_min + i.
std::vector<GapRow> delta_sigma_gap(std::span<const MomentSummary> summaries, int k_min,
                                    const NumberVarianceCurve& nv);

}  // namespace knn::stats
