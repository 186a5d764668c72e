#pragma once

// Analytic k-th neighbor spacing distributions.
//
// The power-law family P(s) = C s^alpha exp(-A s^2) covers the Wigner
// nearest-neighbor surmise (k = 1, alpha = beta), the integer-exponent
// generalization alpha = k(k+1)beta/2 + k - 1 ("old"), and the
// variance-matched exponent ("corrected"). A and C fix unit normalization and
// mean k. Gamma ratios are evaluated as ratios, never as separate Gammas.

#include <string_view>

namespace knn::surmise {

enum class Family { Old, Corrected, Gaussian, PoissonKNN, WignerNN, CorrectedNN_GUE };
enum class ConstantsMode { Exact, Asymptotic };
enum class AlphaMode { ClosedFormLong, ClosedFormLargeK, ExactRoot };

std::string_view to_string(Family f);
std::string_view to_string(ConstantsMode m);
std::string_view to_string(AlphaMode m);
Family parse_family(std::string_view s);
ConstantsMode parse_constants_mode(std::string_view s);
AlphaMode parse_alpha_mode(std::string_view s);

/// Nearest-neighbor GUE exponent matched to the exact large-N variance.
inline constexpr double kCorrectedNNBeta = 1.96998;
/// Variance of the exact large-N GUE nearest-neighbor distribution.
inline constexpr double kExactNNVarianceGUE = 0.17999;

/// alpha = k(k+1)beta/2 + k - 1.
double alpha_old(int k, int beta);

struct NormConstants {
  double A = 0.0;
  double C = 0.0;
  double log_C = 0.0;
};

/// Exact: A = [Gamma(alpha/2+1) / (k Gamma((alpha+1)/2))]^2,
///        C = 2 A^((alpha+1)/2) / Gamma((alpha+1)/2).
/// Asymptotic: large-alpha expansions, A to O(1/alpha), C in the closed form
/// (1 + 12 alpha) e^(1/4 + alpha/2) / (12 sqrt(pi alpha) k^(1+alpha)).
NormConstants norm_constants(double alpha, int k, ConstantsMode mode);

/// Exact below k = 10, Asymptotic from k = 10 on.
ConstantsMode default_constants_mode(int k);

/// (alpha + 1) / (2 A_alpha) - k^2 with exact A.
double variance_of_surmise(double alpha, int k);

/// Random-matrix constant c_beta: the Wigner-surmise variance for that beta.
double rmt_constant(int beta);

/// (2 / (pi^2 beta)) ln k + c_beta.
double rmt_variance(int k, int beta);

/// Variance-matched exponent. ClosedFormLong keeps the square root, which has
/// no real value for k = 1 at beta = 1; ClosedFormLargeK expands it; ExactRoot
/// solves variance_of_surmise(alpha, k) = rmt_variance(k, beta).
double alpha_corrected(int k, int beta, AlphaMode mode);

/// ClosedFormLong for k in {2, 3} with beta in {1, 2}, else ClosedFormLargeK.
AlphaMode default_alpha_mode(int k, int beta);

/// Skewness of the power-law family; switches to 1/sqrt(2 alpha) above 500.
double skewness_of_surmise(double alpha);
/// Skewness from the gamma-ratio expression at any alpha (no switch).
double skewness_of_surmise_exact(double alpha);

/// Immutable, evaluable distribution.
class Surmise {
 public:
  static Surmise old(int k, int beta, ConstantsMode mode);
  static Surmise old(int k, int beta) { return old(k, beta, default_constants_mode(k)); }
  static Surmise corrected(int k, int beta, AlphaMode alpha_mode, ConstantsMode mode);
  static Surmise corrected(int k, int beta) {
    return corrected(k, beta, default_alpha_mode(k, beta), default_constants_mode(k));
  }
  static Surmise gaussian(int k, int beta);
  static Surmise poisson_knn(int k);
  static Surmise wigner_nn(int beta);
  static Surmise corrected_nn_gue();
  /// Power-law family with an explicit exponent and exact constants.
  static Surmise power_law(double alpha, int k);

  Family family() const { return family_; }
  int k() const { return k_; }
  int beta() const { return beta_; }  // 0 for Poisson
  double alpha() const { return alpha_; }
  double A() const { return constants_.A; }
  double C() const { return constants_.C; }
  ConstantsMode constants_mode() const { return mode_; }

  double mean() const { return static_cast<double>(k_); }
  /// Analytic variance: exact-constant formula for the power-law family,
  /// rmt_variance for Gaussian, k for Poisson.
  double variance() const;
  /// Analytic skewness where a closed form exists.
  double skewness() const;

  /// Throws ValidationError for s < 0 except in the Gaussian family.
  double pdf(double s) const;
  double log_pdf(double s) const;

 private:
  Surmise() = default;
  Family family_ = Family::Old;
  int k_ = 1;
  int beta_ = 1;
  double alpha_ = 0.0;
  NormConstants constants_{};
  ConstantsMode mode_ = ConstantsMode::Exact;
  double gauss_variance_ = 0.0;
};

struct QuadratureMoments {
  double norm = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
};

/// Adaptive Gauss-Kronrod moments on [lower, k + 12 sqrt(Delta)], split at the
/// mean and +-4 sigma; the Poisson family integrates its exponential tail to
/// where the density falls below e^-60.
QuadratureMoments quadrature_moments(const Surmise& s);

}  // namespace knn::surmise
