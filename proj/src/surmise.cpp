#include "knn/surmise.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/roots.hpp>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "knn/error.hpp"

namespace knn::surmise {
namespace {

constexpr double kPi = std::numbers::pi;

void require_k(int k) {
  if (k < 1) throw ValidationError("k must be >= 1, got " + std::to_string(k));
}

void require_beta(int beta) {
  if (beta != 1 && beta != 2 && beta != 4) throw ValidationError("beta must be 1, 2 or 4, got " + std::to_string(beta));
}

void require_alpha(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ValidationError("alpha must be finite and > 0");
}

// Gamma(alpha/2 + 1) / Gamma((alpha + 1)/2), accurate for large alpha.
double gamma_ratio(double alpha) {
  return 1.0 / boost::math::tgamma_delta_ratio((alpha + 1.0) / 2.0, 0.5);
}

double finite_or_throw(double v, const std::string& what) {
  if (!std::isfinite(v)) throw NumericalError(what + " is not finite");
  return v;
}

// Closed forms for the corrected exponent. x = pi^2 beta c_beta + 2 ln k.
double corrected_x(int k, int beta) {
  return kPi * kPi * beta * rmt_constant(beta) + 2.0 * std::log(static_cast<double>(k));
}

double alpha_large_k(int k, int beta) {
  const double kk = static_cast<double>(k);
  return kPi * kPi * beta * kk * kk / (2.0 * corrected_x(k, beta)) - 0.75;
}

double alpha_long(int k, int beta) {
  const double kk = static_cast<double>(k);
  const double y = corrected_x(k, beta) / (kPi * kPi * beta * kk * kk);
  const double disc = 1.0 - y * (4.0 - y);
  if (disc < 0.0) {
    throw NumericalError("closed-form corrected exponent has no real value at k=" + std::to_string(k) +
                         ", beta=" + std::to_string(beta));
  }
  return (1.0 - y + std::sqrt(disc)) / (4.0 * y);
}

double alpha_root(int k, int beta) {
  const double target = rmt_variance(k, beta);
  auto f = [&](double a) { return variance_of_surmise(a, k) - target; };
  const double guess = alpha_large_k(k, beta);
  auto attempt = [&](double lo, double hi) -> std::optional<double> {
    const double f_lo = f(lo);
    const double f_hi = f(hi);
    if (f_lo == 0.0) return lo;
    if (f_hi == 0.0) return hi;
    if ((f_lo > 0.0) == (f_hi > 0.0)) return std::nullopt;
    std::uintmax_t max_iter = 200;
    const auto tol = boost::math::tools::eps_tolerance<double>(48);
    const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, f_lo, f_hi, tol, max_iter);
    return 0.5 * (a + b);
  };
  if (auto r = attempt(0.3 * guess, 3.0 * guess)) return *r;
  if (auto r = attempt(0.05 * guess, 20.0 * guess)) return *r;
  throw NumericalError("corrected exponent root not bracketed at k=" + std::to_string(k) +
                       ", beta=" + std::to_string(beta));
}

}  // namespace

std::string_view to_string(Family f) {
  switch (f) {
    case Family::Old: return "old";
    case Family::Corrected: return "corrected";
    case Family::Gaussian: return "gaussian";
    case Family::PoissonKNN: return "poisson";
    case Family::WignerNN: return "wigner";
    case Family::CorrectedNN_GUE: return "corrected_nn_gue";
  }
  return "unknown";
}

std::string_view to_string(ConstantsMode m) { return m == ConstantsMode::Exact ? "exact" : "asymptotic"; }

std::string_view to_string(AlphaMode m) {
  switch (m) {
    case AlphaMode::ClosedFormLong: return "long";
    case AlphaMode::ClosedFormLargeK: return "large_k";
    case AlphaMode::ExactRoot: return "root";
  }
  return "unknown";
}

Family parse_family(std::string_view s) {
  for (auto f : {Family::Old, Family::Corrected, Family::Gaussian, Family::PoissonKNN, Family::WignerNN,
                 Family::CorrectedNN_GUE}) {
    if (to_string(f) == s) return f;
  }
  throw ValidationError("unknown surmise family '" + std::string(s) + "'");
}

ConstantsMode parse_constants_mode(std::string_view s) {
  if (s == "exact") return ConstantsMode::Exact;
  if (s == "asymptotic") return ConstantsMode::Asymptotic;
  throw ValidationError("unknown constants mode '" + std::string(s) + "'");
}

AlphaMode parse_alpha_mode(std::string_view s) {
  for (auto m : {AlphaMode::ClosedFormLong, AlphaMode::ClosedFormLargeK, AlphaMode::ExactRoot}) {
    if (to_string(m) == s) return m;
  }
  throw ValidationError("unknown alpha mode '" + std::string(s) + "'");
}

double alpha_old(int k, int beta) {
  require_k(k);
  require_beta(beta);
  return 0.5 * k * (k + 1) * beta + k - 1;
}

NormConstants norm_constants(double alpha, int k, ConstantsMode mode) {
  require_alpha(alpha);
  require_k(k);
  const double kk = static_cast<double>(k);
  NormConstants nc;
  if (mode == ConstantsMode::Exact) {
    const double r = gamma_ratio(alpha);
    nc.A = (r / kk) * (r / kk);
    nc.log_C = std::log(2.0) + 0.5 * (alpha + 1.0) * std::log(nc.A) -
               boost::math::lgamma(0.5 * (alpha + 1.0));
  } else {
    nc.A = (0.5 * alpha + 0.25 + 1.0 / (16.0 * alpha)) / (kk * kk);
    nc.log_C = std::log1p(12.0 * alpha) - std::log(12.0 * std::sqrt(kPi * alpha)) -
               (1.0 + alpha) * std::log(kk) + 0.25 + 0.5 * alpha;
  }
  finite_or_throw(nc.A, "A(alpha=" + std::to_string(alpha) + ", k=" + std::to_string(k) + ")");
  finite_or_throw(nc.log_C, "log C(alpha=" + std::to_string(alpha) + ", k=" + std::to_string(k) + ")");
  // C itself overflows for very large alpha; the pdf only ever uses log_C.
  nc.C = std::exp(nc.log_C);
  return nc;
}

ConstantsMode default_constants_mode(int k) { return k < 10 ? ConstantsMode::Exact : ConstantsMode::Asymptotic; }

double variance_of_surmise(double alpha, int k) {
  require_alpha(alpha);
  require_k(k);
  const double r = gamma_ratio(alpha);
  const double kk = static_cast<double>(k);
  // (alpha+1)/(2A) - k^2 with A = (r/k)^2
  return kk * kk * ((alpha + 1.0) - 2.0 * r * r) / (2.0 * r * r);
}

double rmt_constant(int beta) {
  require_beta(beta);
  switch (beta) {
    case 1: return 4.0 / kPi - 1.0;
    case 2: return 3.0 * kPi / 8.0 - 1.0;
    default: return 45.0 * kPi / 128.0 - 1.0;
  }
}

double rmt_variance(int k, int beta) {
  require_k(k);
  return 2.0 / (kPi * kPi * beta) * std::log(static_cast<double>(k)) + rmt_constant(beta);
}

double alpha_corrected(int k, int beta, AlphaMode mode) {
  require_k(k);
  require_beta(beta);
  switch (mode) {
    case AlphaMode::ClosedFormLong: return alpha_long(k, beta);
    case AlphaMode::ClosedFormLargeK: return alpha_large_k(k, beta);
    case AlphaMode::ExactRoot: return alpha_root(k, beta);
  }
  return alpha_large_k(k, beta);
}

AlphaMode default_alpha_mode(int k, int beta) {
  if ((k == 2 || k == 3) && (beta == 1 || beta == 2)) return AlphaMode::ClosedFormLong;
  return AlphaMode::ClosedFormLargeK;
}

double skewness_of_surmise_exact(double alpha) {
  require_alpha(alpha);
  const double r = gamma_ratio(alpha);
  const double num = std::numbers::sqrt2 * r * (4.0 * r * r - (2.0 * alpha + 1.0));
  const double den = std::pow((alpha + 1.0) - 2.0 * r * r, 1.5);
  return num / den;
}

double skewness_of_surmise(double alpha) {
  require_alpha(alpha);
  if (alpha > 500.0) return 1.0 / std::sqrt(2.0 * alpha);
  return skewness_of_surmise_exact(alpha);
}

Surmise Surmise::power_law(double alpha, int k) {
  Surmise s;
  s.family_ = Family::Corrected;
  s.k_ = k;
  s.beta_ = 0;
  s.alpha_ = alpha;
  s.mode_ = ConstantsMode::Exact;
  s.constants_ = norm_constants(alpha, k, ConstantsMode::Exact);
  return s;
}

Surmise Surmise::old(int k, int beta, ConstantsMode mode) {
  Surmise s;
  s.family_ = Family::Old;
  s.k_ = k;
  s.beta_ = beta;
  s.alpha_ = alpha_old(k, beta);
  s.mode_ = mode;
  s.constants_ = norm_constants(s.alpha_, k, mode);
  return s;
}

Surmise Surmise::corrected(int k, int beta, AlphaMode alpha_mode, ConstantsMode mode) {
  Surmise s;
  s.family_ = Family::Corrected;
  s.k_ = k;
  s.beta_ = beta;
  s.alpha_ = alpha_corrected(k, beta, alpha_mode);
  s.mode_ = mode;
  s.constants_ = norm_constants(s.alpha_, k, mode);
  return s;
}

Surmise Surmise::gaussian(int k, int beta) {
  Surmise s;
  s.family_ = Family::Gaussian;
  s.k_ = k;
  s.beta_ = beta;
  s.gauss_variance_ = rmt_variance(k, beta);
  return s;
}

Surmise Surmise::poisson_knn(int k) {
  require_k(k);
  Surmise s;
  s.family_ = Family::PoissonKNN;
  s.k_ = k;
  s.beta_ = 0;
  s.alpha_ = k - 1;
  return s;
}

Surmise Surmise::wigner_nn(int beta) {
  Surmise s = old(1, beta, ConstantsMode::Exact);
  s.family_ = Family::WignerNN;
  return s;
}

Surmise Surmise::corrected_nn_gue() {
  Surmise s;
  s.family_ = Family::CorrectedNN_GUE;
  s.k_ = 1;
  s.beta_ = 2;
  s.alpha_ = kCorrectedNNBeta;
  s.mode_ = ConstantsMode::Exact;
  s.constants_ = norm_constants(s.alpha_, 1, ConstantsMode::Exact);
  return s;
}

double Surmise::variance() const {
  switch (family_) {
    case Family::Gaussian: return gauss_variance_;
    case Family::PoissonKNN: return static_cast<double>(k_);
    default: return variance_of_surmise(alpha_, k_);
  }
}

double Surmise::skewness() const {
  switch (family_) {
    case Family::Gaussian: return 0.0;
    case Family::PoissonKNN: return 2.0 / std::sqrt(static_cast<double>(k_));
    default: return skewness_of_surmise(alpha_);
  }
}

double Surmise::log_pdf(double s) const {
  if (family_ == Family::Gaussian) {
    const double d = s - k_;
    return -0.5 * std::log(2.0 * kPi * gauss_variance_) - d * d / (2.0 * gauss_variance_);
  }
  if (s < 0.0) throw ValidationError("spacing must be >= 0");
  if (family_ == Family::PoissonKNN) {
    if (s == 0.0) return k_ == 1 ? 0.0 : -std::numeric_limits<double>::infinity();
    return (k_ - 1) * std::log(s) - s - boost::math::lgamma(static_cast<double>(k_));
  }
  if (s == 0.0) return -std::numeric_limits<double>::infinity();
  return constants_.log_C + alpha_ * std::log(s) - constants_.A * s * s;
}

double Surmise::pdf(double s) const { return std::exp(log_pdf(s)); }

QuadratureMoments quadrature_moments(const Surmise& s) {
  using boost::math::quadrature::gauss_kronrod;
  const double k = s.mean();
  const double sd = std::sqrt(s.variance());
  double lo = s.family() == Family::Gaussian ? k - 12.0 * sd : std::max(0.0, k - 12.0 * sd);
  double hi = k + 12.0 * sd;
  if (s.family() == Family::PoissonKNN) {
    while (s.log_pdf(hi) > -60.0) hi += sd;
  }
  std::vector<double> cuts{lo};
  for (double c : {k - 4.0 * sd, k, k + 4.0 * sd}) {
    if (c > lo && c < hi) cuts.push_back(c);
  }
  cuts.push_back(hi);

  auto integrate = [&](auto&& g) {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      total += gauss_kronrod<double, 61>::integrate(g, cuts[i], cuts[i + 1], 8, 1e-12);
    }
    return total;
  };
  auto p = [&](double x) { return x < 0.0 && s.family() != Family::Gaussian ? 0.0 : s.pdf(x); };

  const double m0 = integrate([&](double x) { return p(x); });
  const double m1 = integrate([&](double x) { return (x - k) * p(x); }) / m0;
  const double m2 = integrate([&](double x) { return (x - k) * (x - k) * p(x); }) / m0;
  const double m3 = integrate([&](double x) { const double d = x - k; return d * d * d * p(x); }) / m0;
  const double m4 = integrate([&](double x) { const double d = x - k; return d * d * d * d * p(x); }) / m0;

  QuadratureMoments q;
  q.norm = m0;
  q.mean = k + m1;
  q.variance = m2 - m1 * m1;
  const double c3 = m3 - 3.0 * m1 * m2 + 2.0 * m1 * m1 * m1;
  const double c4 = m4 - 4.0 * m1 * m3 + 6.0 * m1 * m1 * m2 - 3.0 * m1 * m1 * m1 * m1;
  q.skewness = c3 / std::pow(q.variance, 1.5);
  q.excess_kurtosis = c4 / (q.variance * q.variance) - 3.0;
  return q;
}

}  // namespace knn::surmise
