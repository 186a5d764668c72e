#include "knn/unfolding.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "knn/ensembles.hpp"
#include "knn/error.hpp"

namespace knn::unfolding {
namespace {

UnfoldedSpectrum with_provenance(const SpectrumSample& s, Method m) {
  UnfoldedSpectrum u;
  u.model = s.model;
  u.seed = s.seed;
  u.realization_index = s.realization_index;
  u.method = m;
  return u;
}

void require_sorted(const SpectrumSample& s) {
  if (s.levels.size() < 2) throw ValidationError("unfolding needs at least two levels");
  if (!std::is_sorted(s.levels.begin(), s.levels.end()))
    throw ValidationError("unfolding needs sorted levels");
}

struct Polynomial {
  Eigen::VectorXd coef;  // in the scaled variable x = (e - center) / half_width
  double center = 0.0;
  double half_width = 1.0;

  double operator()(double e) const {
    const double x = (e - center) / half_width;
    double v = 0.0;
    for (Eigen::Index j = coef.size() - 1; j >= 0; --j) v = v * x + coef(j);
    return v;
  }
  double derivative(double e) const {
    const double x = (e - center) / half_width;
    double v = 0.0;
    for (Eigen::Index j = coef.size() - 1; j >= 1; --j) v = v * x + static_cast<double>(j) * coef(j);
    return v / half_width;
  }
};

Polynomial fit_staircase(const std::vector<double>& e, std::size_t lo, std::size_t hi, int degree) {
  const auto n = static_cast<Eigen::Index>(hi - lo);
  Polynomial p;
  p.center = 0.5 * (e[lo] + e[hi - 1]);
  p.half_width = std::max(0.5 * (e[hi - 1] - e[lo]), 1e-300);
  Eigen::MatrixXd v(n, degree + 1);
  Eigen::VectorXd rank(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = (e[lo + static_cast<std::size_t>(i)] - p.center) / p.half_width;
    double xp = 1.0;
    for (int j = 0; j <= degree; ++j) {
      v(i, j) = xp;
      xp *= x;
    }
    rank(i) = static_cast<double>(lo + static_cast<std::size_t>(i));
  }
  p.coef = v.colPivHouseholderQr().solve(rank);
  return p;
}

bool monotone_on(const Polynomial& p, const std::vector<double>& e, std::size_t lo, std::size_t hi) {
  constexpr int kProbe = 512;
  const double a = e[lo];
  const double b = e[hi - 1];
  for (int i = 0; i <= kProbe; ++i) {
    if (p.derivative(a + (b - a) * i / kProbe) <= 0.0) return false;
  }
  return true;
}

}  // namespace

std::string_view to_string(Method m) {
  switch (m) {
    case Method::Semicircle: return "semicircle";
    case Method::PolynomialFit: return "polynomial";
    case Method::Identity: return "identity";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "semicircle") return Method::Semicircle;
  if (name == "polynomial") return Method::PolynomialFit;
  if (name == "identity") return Method::Identity;
  throw ValidationError("unknown unfolding method '" + std::string(name) + "'");
}

double UnfoldedSpectrum::mean_spacing() const {
  if (levels.size() < 2) return 0.0;
  return (levels.back() - levels.front()) / static_cast<double>(levels.size() - 1);
}

double semicircle_cdf(double e, double radius) {
  const double x = std::clamp(e / radius, -1.0, 1.0);
  return 0.5 + (x * std::sqrt(1.0 - x * x) + std::asin(x)) / std::numbers::pi;
}

UnfoldedSpectrum unfold_semicircle(const SpectrumSample& sample, double bulk_fraction) {
  require_sorted(sample);
  if (sample.ensemble && sample.ensemble->cls == EnsembleClass::Poisson)
    throw ValidationError("semicircle unfolding applies to Gaussian ensembles only");
  if (!(bulk_fraction > 0.0 && bulk_fraction <= 1.0))
    throw ValidationError("bulk_fraction must lie in (0, 1]");

  const std::size_t n = sample.levels.size();
  const double radius = ensembles::semicircle_radius(n);
  const auto nd = static_cast<double>(n);

  auto u = with_provenance(sample, Method::Semicircle);
  const auto keep = std::max<std::size_t>(2, static_cast<std::size_t>(std::llround(bulk_fraction * nd)));
  u.index_lo = (n - std::min(keep, n)) / 2;
  u.index_hi = u.index_lo + std::min(keep, n);
  u.levels.reserve(u.index_hi - u.index_lo);
  for (std::size_t i = 0; i < n; ++i) {
    const double e = sample.levels[i];
    if (std::abs(e) > radius) ++u.n_clamped;
    if (i >= u.index_lo && i < u.index_hi) u.levels.push_back(nd * semicircle_cdf(e, radius));
  }
  return u;
}

std::size_t PolynomialOptions::effective_bins(std::size_t n_levels) const {
  if (min_levels_per_bin == 0) return n_bins;
  return std::min(n_bins, std::max<std::size_t>(4, n_levels / min_levels_per_bin));
}

UnfoldedSpectrum unfold_polynomial(const SpectrumSample& sample, const PolynomialOptions& opts) {
  require_sorted(sample);
  if (opts.degree < 1) throw ValidationError("polynomial degree must be >= 1");
  if (opts.n_bins < 1) throw ValidationError("need at least one density bin");
  if (!(opts.density_threshold > 0.0 && opts.density_threshold <= 1.0))
    throw ValidationError("density threshold must lie in (0, 1]");

  const auto& e = sample.levels;
  const std::size_t n = e.size();
  const double e_min = e.front();
  const double e_max = e.back();
  if (!(e_max > e_min)) throw NumericalError("degenerate spectrum: all levels equal");

  const std::size_t n_bins = opts.effective_bins(n);
  const double width = (e_max - e_min) / static_cast<double>(n_bins);
  auto bin_of = [&](double x) {
    const auto b = static_cast<std::size_t>((x - e_min) / width);
    return std::min(b, n_bins - 1);
  };
  std::vector<std::size_t> counts(n_bins, 0);
  for (double x : e) ++counts[bin_of(x)];

  const auto peak = static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
  const double cut = opts.density_threshold * static_cast<double>(counts[peak]);
  std::size_t b_lo = peak;
  std::size_t b_hi = peak;
  while (b_lo > 0 && static_cast<double>(counts[b_lo - 1]) >= cut) --b_lo;
  while (b_hi + 1 < n_bins && static_cast<double>(counts[b_hi + 1]) >= cut) ++b_hi;

  // Levels are sorted, so the bins [b_lo, b_hi] hold a contiguous index range.
  std::size_t lo = 0;
  while (lo < n && bin_of(e[lo]) < b_lo) ++lo;
  std::size_t hi = lo;
  while (hi < n && bin_of(e[hi]) <= b_hi) ++hi;

  const std::size_t min_levels = 10 * static_cast<std::size_t>(opts.degree + 1);
  if (hi - lo < min_levels) {
    throw NumericalError("unfolding window holds " + std::to_string(hi - lo) + " levels, need " +
                         std::to_string(min_levels));
  }

  auto u = with_provenance(sample, Method::PolynomialFit);
  u.index_lo = lo;
  u.index_hi = hi;
  u.degree = opts.degree;
  Polynomial p = fit_staircase(e, lo, hi, opts.degree);
  if (!monotone_on(p, e, lo, hi)) {
    u.fell_back = true;
    u.degree = 1;
    p = fit_staircase(e, lo, hi, 1);
  }
  u.levels.reserve(hi - lo);
  for (std::size_t i = lo; i < hi; ++i) u.levels.push_back(p(e[i]));
  return u;
}

UnfoldedSpectrum unfold_identity(const SpectrumSample& sample) {
  require_sorted(sample);
  auto u = with_provenance(sample, Method::Identity);
  u.levels = sample.levels;
  u.index_lo = 0;
  u.index_hi = sample.levels.size();
  return u;
}

}  // namespace knn::unfolding
