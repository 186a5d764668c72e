#include "knn/spectral_stats.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "knn/error.hpp"
#include "spectral_stats_detail.hpp"

namespace knn::stats {
namespace {

struct CentralMoments {
  double mean = 0.0;
  double m2 = 0.0;  // population
  double m3 = 0.0;
  double m4 = 0.0;
};

CentralMoments central(const PowerSums& p) {
  const auto n = static_cast<double>(p.count);
  const double a1 = p.s1 / n;
  const double a2 = p.s2 / n;
  const double a3 = p.s3 / n;
  const double a4 = p.s4 / n;
  CentralMoments c;
  c.mean = p.shift + a1;
  c.m2 = std::max(0.0, a2 - a1 * a1);
  c.m3 = a3 - 3.0 * a1 * a2 + 2.0 * a1 * a1 * a1;
  c.m4 = a4 - 4.0 * a1 * a3 + 6.0 * a1 * a1 * a2 - 3.0 * a1 * a1 * a1 * a1;
  return c;
}

double sample_sd(const std::vector<double>& x) {
  if (x.size() < 2) return 0.0;
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

// Replaces the iid standard errors by the between-realization spread.
void attach_batch_errors(MomentSummary& s, const std::vector<PowerSums>& per_realization) {
  std::vector<double> means, vars, skews;
  for (const auto& p : per_realization) {
    if (p.count < 2) continue;
    const auto m = summarize(p);
    means.push_back(m.mean);
    vars.push_back(m.variance);
    if (m.skewness) skews.push_back(*m.skewness);
  }
  if (means.size() < 2) return;
  const double root = std::sqrt(static_cast<double>(means.size()));
  s.standard_error_of_mean = sample_sd(means) / root;
  s.se_variance = sample_sd(vars) / root;
  if (skews.size() == means.size()) s.se_skewness = sample_sd(skews) / root;
}

void check_k(std::span<const UnfoldedSpectrum> spectra, int k) {
  if (k < 1) throw ValidationError("k must be >= 1");
  if (spectra.empty()) throw ValidationError("no spectra supplied");
  for (const auto& u : spectra) {
    if (static_cast<std::size_t>(k) >= u.levels.size()) {
      throw ValidationError("k=" + std::to_string(k) + " too large for realization " +
                            std::to_string(u.realization_index) + " with " + std::to_string(u.levels.size()) +
                            " retained levels");
    }
  }
}

}  // namespace

MomentSummary summarize(const PowerSums& p) {
  MomentSummary s;
  s.n = p.count;
  if (p.count == 0) return s;
  const auto c = central(p);
  const auto n = static_cast<double>(p.count);
  s.mean = c.mean;
  s.variance = p.count > 1 ? c.m2 * n / (n - 1.0) : 0.0;
  // Relative threshold: a spread below round-off of the shifted sums is zero.
  const double scale = std::max(1.0, std::abs(p.shift) + std::abs(c.mean));
  if (c.m2 > 1e-24 * scale * scale) {
    s.skewness = c.m3 / std::pow(c.m2, 1.5);
    s.excess_kurtosis = c.m4 / (c.m2 * c.m2) - 3.0;
  } else {
    s.variance = 0.0;
  }
  s.standard_error_of_mean = std::sqrt(s.variance / n);
  s.se_variance = s.variance * std::sqrt(2.0 / std::max(1.0, n - 1.0));
  if (s.skewness) s.se_skewness = std::sqrt(6.0 / n);
  return s;
}

std::vector<double> knn_spacings(std::span<const double> levels, int k) {
  if (k < 1) throw ValidationError("k must be >= 1");
  const auto ku = static_cast<std::size_t>(k);
  if (levels.size() <= ku) throw ValidationError("k=" + std::to_string(k) + " too large for sequence");
  std::vector<double> out(levels.size() - ku);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = levels[i + ku] - levels[i];
  return out;
}

SpacingSet knn_spacings(std::span<const UnfoldedSpectrum> spectra, int k) {
  check_k(spectra, k);
  SpacingSet set;
  set.k = k;
  set.n_realizations = spectra.size();
  set.offsets.reserve(spectra.size() + 1);
  set.offsets.push_back(0);
  for (const auto& u : spectra) {
    const auto s = knn_spacings(u.levels, k);
    set.values.insert(set.values.end(), s.begin(), s.end());
    set.offsets.push_back(set.values.size());
  }
  return set;
}

MomentSummary moments(const SpacingSet& set) {
  if (set.values.size() < 2) throw ValidationError("moments need at least two values");
  const double shift = set.k;
  PowerSums total{shift};
  std::vector<PowerSums> per;
  if (set.offsets.size() >= 2) {
    for (std::size_t r = 0; r + 1 < set.offsets.size(); ++r) {
      PowerSums p{shift};
      for (std::size_t i = set.offsets[r]; i < set.offsets[r + 1]; ++i) p.add(set.values[i]);
      total.merge(p);
      per.push_back(p);
    }
  } else {
    for (double v : set.values) total.add(v);
  }
  auto s = summarize(total);
  attach_batch_errors(s, per);
  return s;
}

std::vector<MomentSummary> knn_moments(std::span<const UnfoldedSpectrum> spectra, int k_min, int k_max) {
  if (k_min < 1 || k_max < k_min) throw ValidationError("invalid k range");
  check_k(spectra, k_max);
  const auto n_k = static_cast<std::size_t>(k_max - k_min + 1);
  const std::size_t n_r = spectra.size();
  std::vector<PowerSums> sums(n_r * n_k);

#pragma omp parallel for schedule(dynamic)
  for (std::size_t r = 0; r < n_r; ++r) {
    const auto& e = spectra[r].levels;
    for (std::size_t j = 0; j < n_k; ++j) {
      const auto k = static_cast<std::size_t>(k_min) + j;
      PowerSums p{static_cast<double>(k)};
      for (std::size_t i = 0; i + k < e.size(); ++i) p.add(e[i + k] - e[i]);
      sums[r * n_k + j] = p;
    }
  }

  std::vector<MomentSummary> out(n_k);
  for (std::size_t j = 0; j < n_k; ++j) {
    PowerSums total{static_cast<double>(static_cast<std::size_t>(k_min) + j)};
    std::vector<PowerSums> per(n_r);
    for (std::size_t r = 0; r < n_r; ++r) {
      per[r] = sums[r * n_k + j];
      total.merge(per[r]);
    }
    out[j] = summarize(total);
    attach_batch_errors(out[j], per);
  }
  return out;
}

HistogramRange default_histogram_range(int k, double variance) {
  const double sd = std::sqrt(std::max(0.0, variance));
  return {std::max(0.0, k - 5.0 * sd), k + 5.0 * sd};
}

Histogram build_histogram(std::span<const double> values, double bin_width, HistogramRange range) {
  if (!(bin_width > 0.0)) throw ValidationError("bin width must be > 0");
  if (!(range.hi > range.lo)) throw ValidationError("histogram range is empty");
  const auto n_bins = static_cast<std::size_t>(std::ceil((range.hi - range.lo) / bin_width - 1e-9));
  if (n_bins == 0) throw ValidationError("histogram range is empty");

  Histogram h;
  h.edges.resize(n_bins + 1);
  for (std::size_t i = 0; i <= n_bins; ++i) h.edges[i] = range.lo + static_cast<double>(i) * bin_width;
  h.counts.assign(n_bins, 0);
  h.n_total = values.size();
  const double top = h.edges.back();

#pragma omp parallel
  {
    std::vector<std::uint64_t> local(n_bins, 0);
#pragma omp for schedule(static) nowait
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double v = values[i];
      if (v < range.lo || v >= top) continue;
      const auto b = std::min(n_bins - 1, static_cast<std::size_t>((v - range.lo) / bin_width));
      ++local[b];
    }
#pragma omp critical(knn_histogram_merge)
    for (std::size_t b = 0; b < n_bins; ++b) h.counts[b] += local[b];
  }

  for (auto c : h.counts) h.n_in_range += c;
  h.densities.assign(n_bins, 0.0);
  if (h.n_in_range > 0) {
    for (std::size_t b = 0; b < n_bins; ++b) {
      h.densities[b] = static_cast<double>(h.counts[b]) /
                       (static_cast<double>(h.n_in_range) * (h.edges[b + 1] - h.edges[b]));
    }
  }
  return h;
}

Histogram build_histogram(const SpacingSet& set, double bin_width, HistogramRange range) {
  return build_histogram(std::span<const double>(set.values), bin_width, range);
}

double NumberVarianceCurve::at(double L) const {
  if (L_grid.empty()) throw ValidationError("empty number-variance curve");
  if (L < L_grid.front() - 1e-12 || L > L_grid.back() + 1e-12)
    throw ValidationError("L=" + std::to_string(L) + " outside the number-variance grid");
  const auto it = std::lower_bound(L_grid.begin(), L_grid.end(), L - 1e-9);
  const auto j = static_cast<std::size_t>(it - L_grid.begin());
  if (j < L_grid.size() && std::abs(L_grid[j] - L) <= 1e-9) return sigma2[j];
  const double t = (L - L_grid[j - 1]) / (L_grid[j] - L_grid[j - 1]);
  return sigma2[j - 1] + t * (sigma2[j] - sigma2[j - 1]);
}

namespace detail {

__extension__ using wide_int = __int128;

std::vector<double> nv_grid(const NumberVarianceOptions& opts) {
  if (!(opts.start_stride > 0.0)) throw ValidationError("window start stride must be > 0");
  if (!(opts.L_step > 0.0)) throw ValidationError("L step must be > 0");
  if (!(opts.L_max >= 0.0)) throw ValidationError("L_max must be >= 0");
  const auto n = static_cast<std::size_t>(std::floor(opts.L_max / opts.L_step + 1e-9)) + 1;
  std::vector<double> grid(n);
  for (std::size_t j = 0; j < n; ++j) grid[j] = static_cast<double>(j) * opts.L_step;
  return grid;
}

void nv_check_span(std::span<const UnfoldedSpectrum> spectra, double L_max) {
  if (spectra.empty()) throw ValidationError("no spectra supplied");
  for (const auto& u : spectra) {
    if (u.levels.size() < 2 || !(L_max < u.levels.back() - u.levels.front())) {
      throw ValidationError("L_max=" + std::to_string(L_max) + " exceeds the retained window of realization " +
                            std::to_string(u.realization_index));
    }
  }
}

std::uint64_t nv_n_starts(double span, double L, double stride) {
  return static_cast<std::uint64_t>(std::floor((span - L) / stride)) + 1;
}

NumberVarianceCurve nv_finish(std::vector<double> grid, const std::vector<std::int64_t>& sum,
                              const std::vector<std::int64_t>& sum_sq, const std::vector<std::uint64_t>& starts,
                              std::size_t n_realizations) {
  NumberVarianceCurve c;
  c.L_grid = std::move(grid);
  c.sigma2.resize(c.L_grid.size());
  for (std::size_t j = 0; j < c.L_grid.size(); ++j) {
    const auto n = static_cast<wide_int>(starts[j]);
    const wide_int num = n * sum_sq[j] - static_cast<wide_int>(sum[j]) * sum[j];
    c.sigma2[j] = static_cast<double>(num) / (static_cast<double>(starts[j]) * static_cast<double>(starts[j]));
  }
  c.n_starts = starts.empty() ? 0 : starts[0];
  c.n_realizations = n_realizations;
  return c;
}

}  // namespace detail

NumberVarianceCurve number_variance(std::span<const UnfoldedSpectrum> spectra, const NumberVarianceOptions& opts) {
  auto grid = detail::nv_grid(opts);
  detail::nv_check_span(spectra, grid.back());
  const std::size_t n_l = grid.size();
  const std::size_t n_r = spectra.size();
  std::vector<std::int64_t> sum(n_r * n_l, 0), sum_sq(n_r * n_l, 0);
  std::vector<std::uint64_t> starts(n_r * n_l, 0);

#pragma omp parallel for schedule(dynamic)
  for (std::size_t r = 0; r < n_r; ++r) {
    const auto& e = spectra[r].levels;
    const double lo = e.front();
    const double span = e.back() - lo;
    for (std::size_t j = 0; j < n_l; ++j) {
      const double L = grid[j];
      const std::uint64_t m_count = detail::nv_n_starts(span, L, opts.start_stride);
      std::size_t a = 0;  // first level >= xi
      std::size_t b = 0;  // first level >= xi + L
      std::int64_t s = 0, s2 = 0;
      for (std::uint64_t m = 0; m < m_count; ++m) {
        const double xi = lo + static_cast<double>(m) * opts.start_stride;
        while (a < e.size() && e[a] < xi) ++a;
        if (b < a) b = a;
        while (b < e.size() && e[b] < xi + L) ++b;
        const auto c = static_cast<std::int64_t>(b - a);
        s += c;
        s2 += c * c;
      }
      sum[r * n_l + j] = s;
      sum_sq[r * n_l + j] = s2;
      starts[r * n_l + j] = m_count;
    }
  }

  std::vector<std::int64_t> tot(n_l, 0), tot_sq(n_l, 0);
  std::vector<std::uint64_t> tot_starts(n_l, 0);
  for (std::size_t r = 0; r < n_r; ++r) {
    for (std::size_t j = 0; j < n_l; ++j) {
      tot[j] += sum[r * n_l + j];
      tot_sq[j] += sum_sq[r * n_l + j];
      tot_starts[j] += starts[r * n_l + j];
    }
  }
  return detail::nv_finish(std::move(grid), tot, tot_sq, tot_starts, n_r);
}

std::vector<GapRow> delta_sigma_gap(std::span<const MomentSummary> summaries, int k_min,
                                    const NumberVarianceCurve& nv) {
  std::vector<GapRow> rows;
  rows.reserve(summaries.size());
  for (std::size_t i = 0; i < summaries.size(); ++i) {
    GapRow row;
    row.k = k_min + static_cast<int>(i);
    row.delta = summaries[i].variance;
    row.sigma2 = nv.at(row.k);
    row.gap = row.delta - row.sigma2;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace knn::stats
