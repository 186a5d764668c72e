#pragma once

// Shared between the OpenMP kernels and the serial reference versions.

#include <cstdint>
#include <span>
#include <vector>

#include "knn/spectral_stats.hpp"

namespace knn::stats::detail {

std::vector<double> nv_grid(const NumberVarianceOptions& opts);
void nv_check_span(std::span<const UnfoldedSpectrum> spectra, double L_max);
std::uint64_t nv_n_starts(double span, double L, double stride);
NumberVarianceCurve nv_finish(std::vector<double> grid, const std::vector<std::int64_t>& sum,
                              const std::vector<std::int64_t>& sum_sq, const std::vector<std::uint64_t>& starts,
                              std::size_t n_realizations);

}  // namespace knn::stats::detail
