#include "knn/gof.hpp"

#include <cmath>
#include <vector>

#include "knn/error.hpp"

namespace knn::gof {

double rms_difference(std::span<const double> p1, std::span<const double> p2) {
  if (p1.size() != p2.size() || p1.empty()) throw ValidationError("rms_difference needs equal, nonempty inputs");
  double ss = 0.0;
  for (std::size_t i = 0; i < p1.size(); ++i) {
    const double d = p1[i] - p2[i];
    ss += d * d;
  }
  return std::sqrt(ss / static_cast<double>(p1.size()));
}

GofResult sigma_gof(const stats::Histogram& hist, const std::function<double(double)>& pdf, double mean,
                    double variance, double window_sigmas) {
  if (!(window_sigmas > 0.0)) throw ValidationError("window_sigmas must be > 0");
  GofResult r;
  r.window_sigmas = window_sigmas;
  r.bin_width = hist.bin_width();
  const double half = window_sigmas * std::sqrt(std::max(0.0, variance));
  r.window_lo = mean - half;
  r.window_hi = mean + half;

  std::vector<double> empirical, model;
  for (std::size_t i = 0; i < hist.n_bins(); ++i) {
    const double c = hist.center(i);
    if (c < r.window_lo || c > r.window_hi) continue;
    empirical.push_back(hist.densities[i]);
    model.push_back(pdf(c));
  }
  if (empirical.empty()) throw ValidationError("no histogram bins inside the goodness-of-fit window");
  r.n_bins_used = empirical.size();
  r.sigma = rms_difference(empirical, model);
  return r;
}

GofResult sigma_gof(const stats::Histogram& hist, const surmise::Surmise& reference, double window_sigmas) {
  return sigma_gof(
      hist, [&](double s) { return reference.pdf(s); }, reference.mean(), reference.variance(), window_sigmas);
}

}  // namespace knn::gof
