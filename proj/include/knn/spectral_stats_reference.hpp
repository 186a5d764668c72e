#pragma once

// Serial reference implementations of the campaign kernels. They take the
// obvious route (pool, then two-pass moments; binary search per window) and
// exist to cross-check and benchmark the OpenMP versions.

#include <span>
#include <vector>

#include "knn/spectral_stats.hpp"

namespace knn::stats::reference {

std::vector<MomentSummary> knn_moments(std::span<const UnfoldedSpectrum> spectra, int k_min, int k_max);

Histogram build_histogram(std::span<const double> values, double bin_width, HistogramRange range);

NumberVarianceCurve number_variance(std::span<const UnfoldedSpectrum> spectra, const NumberVarianceOptions& opts);

}  // namespace knn::stats::reference
