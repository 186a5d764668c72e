#pragma once

#include <functional>
#include <span>

#include "knn/spectral_stats.hpp"
#include "knn/surmise.hpp"

namespace knn::gof {

struct GofResult {
  double sigma = 0.0;
  std::size_t n_bins_used = 0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  double bin_width = 0.0;
  double window_sigmas = 0.0;
};

/// Root-mean-square difference of two equally long density samples.
double rms_difference(std::span<const double> p1, std::span<const double> p2);

/// Compares histogram densities with `pdf` at bin centers, restricted to the
/// bins whose center lies in mean +- window_sigmas * sqrt(variance).
/// Throws ValidationError when no bin falls in the window.
GofResult sigma_gof(const stats::Histogram& hist, const std::function<double(double)>& pdf, double mean,
                    double variance, double window_sigmas = 3.0);

/// Window taken from the surmise's own analytic mean k and variance.
GofResult sigma_gof(const stats::Histogram& hist, const surmise::Surmise& reference, double window_sigmas = 3.0);

}  // namespace knn::gof
