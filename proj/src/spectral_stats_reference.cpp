#include "knn/spectral_stats_reference.hpp"

#include <algorithm>
#include <cmath>

#include "knn/error.hpp"
#include "spectral_stats_detail.hpp"

namespace knn::stats::reference {
namespace {

// Two-pass moments of a plain vector.
MomentSummary two_pass(const std::vector<double>& x) {
  MomentSummary s;
  s.n = x.size();
  const auto n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  s.mean = mean;
  s.variance = x.size() > 1 ? m2 * n / (n - 1.0) : 0.0;
  if (m2 > 0.0) {
    s.skewness = m3 / std::pow(m2, 1.5);
    s.excess_kurtosis = m4 / (m2 * m2) - 3.0;
  }
  return s;
}

double sd(const std::vector<double>& x) {
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

}  // namespace

std::vector<MomentSummary> knn_moments(std::span<const UnfoldedSpectrum> spectra, int k_min, int k_max) {
  if (k_min < 1 || k_max < k_min) throw ValidationError("invalid k range");
  std::vector<MomentSummary> out;
  for (int k = k_min; k <= k_max; ++k) {
    std::vector<double> pooled;
    std::vector<double> means, vars;
    for (const auto& u : spectra) {
      const auto s = knn_spacings(u.levels, k);
      pooled.insert(pooled.end(), s.begin(), s.end());
      const auto m = two_pass(s);
      means.push_back(m.mean);
      vars.push_back(m.variance);
    }
    auto m = two_pass(pooled);
    if (means.size() >= 2) {
      const double root = std::sqrt(static_cast<double>(means.size()));
      m.standard_error_of_mean = sd(means) / root;
      m.se_variance = sd(vars) / root;
    }
    out.push_back(m);
  }
  return out;
}

Histogram build_histogram(std::span<const double> values, double bin_width, HistogramRange range) {
  if (!(bin_width > 0.0)) throw ValidationError("bin width must be > 0");
  if (!(range.hi > range.lo)) throw ValidationError("histogram range is empty");
  const auto n_bins = static_cast<std::size_t>(std::ceil((range.hi - range.lo) / bin_width - 1e-9));
  Histogram h;
  h.edges.resize(n_bins + 1);
  for (std::size_t i = 0; i <= n_bins; ++i) h.edges[i] = range.lo + static_cast<double>(i) * bin_width;
  h.counts.assign(n_bins, 0);
  h.n_total = values.size();
  for (double v : values) {
    // upper_bound over the edges gives the bin independently of the division path
    const auto it = std::upper_bound(h.edges.begin(), h.edges.end(), v);
    if (it == h.edges.begin() || it == h.edges.end()) continue;
    ++h.counts[static_cast<std::size_t>(it - h.edges.begin()) - 1];
  }
  for (auto c : h.counts) h.n_in_range += c;
  h.densities.assign(n_bins, 0.0);
  for (std::size_t b = 0; b < n_bins && h.n_in_range > 0; ++b)
    h.densities[b] = static_cast<double>(h.counts[b]) /
                     (static_cast<double>(h.n_in_range) * (h.edges[b + 1] - h.edges[b]));
  return h;
}

NumberVarianceCurve number_variance(std::span<const UnfoldedSpectrum> spectra, const NumberVarianceOptions& opts) {
  auto grid = detail::nv_grid(opts);
  detail::nv_check_span(spectra, grid.back());
  std::vector<std::int64_t> sum(grid.size(), 0), sum_sq(grid.size(), 0);
  std::vector<std::uint64_t> starts(grid.size(), 0);
  for (const auto& u : spectra) {
    const auto& e = u.levels;
    const double lo = e.front();
    const double span = e.back() - lo;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const double L = grid[j];
      const std::uint64_t m_count = detail::nv_n_starts(span, L, opts.start_stride);
      for (std::uint64_t m = 0; m < m_count; ++m) {
        const double xi = lo + static_cast<double>(m) * opts.start_stride;
        const auto first = std::lower_bound(e.begin(), e.end(), xi);
        const auto last = std::lower_bound(e.begin(), e.end(), xi + L);
        const auto c = static_cast<std::int64_t>(last - first);
        sum[j] += c;
        sum_sq[j] += c * c;
      }
      starts[j] += m_count;
    }
  }
  return detail::nv_finish(std::move(grid), sum, sum_sq, starts, spectra.size());
}

}  // namespace knn::stats::reference
