#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "knn/types.hpp"

namespace knn::unfolding {

enum class Method { Semicircle, PolynomialFit, Identity };

std::string_view to_string(Method m);
Method parse_method(std::string_view name);

struct UnfoldedSpectrum {
  std::vector<double> levels;  // unit mean spacing, nondecreasing
  std::string model;
  std::uint64_t seed = 0;
  std::size_t realization_index = 0;
  /// Retained index range [index_lo, index_hi) of the raw sorted levels.
  std::size_t index_lo = 0;
  std::size_t index_hi = 0;
  Method method = Method::Identity;
  /// Semicircle only: levels outside [-R, R] clamped to the edge.
  std::size_t n_clamped = 0;
  /// PolynomialFit only: degree actually used (1 after a monotonicity fallback).
  int degree = 0;
  bool fell_back = false;

  double mean_spacing() const;
};

/// Closed-form semicircle CDF of radius R, clamped to [0, 1].
double semicircle_cdf(double e, double radius);

/// E_i -> N F(E_i) with R = sqrt(2N), then keeps the central `bulk_fraction`
/// of levels by rank.
UnfoldedSpectrum unfold_semicircle(const SpectrumSample& sample, double bulk_fraction = 0.8);

struct PolynomialOptions {
  double density_threshold = 0.9;
  int degree = 3;
  std::size_t n_bins = 100;
  /// Caps the bin count at n / min_levels_per_bin (never below 4); 0 keeps
  /// n_bins as given.
  std::size_t min_levels_per_bin = 128;

  std::size_t effective_bins(std::size_t n_levels) const;
};

/// Histogram density estimate, contiguous window around the densest bin where
/// density >= threshold * max, least-squares fit of rank i against E_i over
/// that window, levels mapped through the fit.
UnfoldedSpectrum unfold_polynomial(const SpectrumSample& sample, const PolynomialOptions& opts = {});

/// Pass-through for spectra already at unit density (Poisson).
UnfoldedSpectrum unfold_identity(const SpectrumSample& sample);

}  // namespace knn::unfolding
