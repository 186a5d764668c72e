#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "knn/ensembles.hpp"
#include "knn/error.hpp"
#include "knn/seeding.hpp"
#include "knn/spectral_stats.hpp"
#include "knn/unfolding.hpp"

using namespace knn;
using namespace knn::unfolding;

namespace {

SpectrumSample raw(std::vector<double> levels, std::string model = "test") {
  SpectrumSample s;
  s.model = std::move(model);
  s.levels = std::move(levels);
  return s;
}

double mean_nn(const UnfoldedSpectrum& u) { return (u.levels.back() - u.levels.front()) / (u.levels.size() - 1); }

}  // namespace

TEST_CASE("semicircle CDF") {
  const double R = std::sqrt(2000.0);
  CHECK(semicircle_cdf(0.0, R) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(semicircle_cdf(-R, R) == 0.0);
  CHECK(semicircle_cdf(R, R) == doctest::Approx(1.0));
  CHECK(semicircle_cdf(2 * R, R) == doctest::Approx(1.0));
  // Midpoint-rule integral of the density as an independent check.
  for (double x : {-0.9, -0.3, 0.2, 0.75}) {
    const double e = x * R;
    double acc = 0.0;
    const int n = 200000;
    const double h = (e + R) / n;
    for (int i = 0; i < n; ++i) {
      const double t = -R + (i + 0.5) * h;
      acc += 2.0 / (std::numbers::pi * R * R) * std::sqrt(R * R - t * t) * h;
    }
    CHECK(semicircle_cdf(e, R) == doctest::Approx(acc).epsilon(1e-7));
  }
}

TEST_CASE("semicircle unfolding of a GOE spectrum") {
  const auto s = ensembles::sample_goe(1000, 31);
  const auto u = unfold_semicircle(s, 0.8);
  CHECK(u.levels.size() == 800);
  CHECK(u.index_hi - u.index_lo == 800);
  CHECK(u.method == Method::Semicircle);
  CHECK(std::is_sorted(u.levels.begin(), u.levels.end()));
  CHECK(std::abs(mean_nn(u) - 1.0) < 0.005);
  CHECK(u.mean_spacing() == doctest::Approx(mean_nn(u)));
}

TEST_CASE("semicircle clamps tail levels and refuses Poisson") {
  auto s = raw({-100.0, -1.0, 0.0, 1.0, 100.0}, "goe");
  s.ensemble = EnsembleSpec{EnsembleClass::GOE, 5, 0};
  const auto u = unfold_semicircle(s, 1.0);
  CHECK(u.n_clamped == 2);
  CHECK(u.levels.front() == 0.0);
  CHECK(u.levels.back() == doctest::Approx(5.0));
  CHECK(u.levels[2] == doctest::Approx(2.5));

  const auto p = ensembles::sample_poisson_levels(100, 1);
  CHECK_THROWS_AS(unfold_semicircle(p), ValidationError);
}

TEST_CASE("semicircle unfolding commutes with a shift inside the support") {
  const auto s = ensembles::sample_goe(400, 2);
  auto shifted = s;
  for (double& e : shifted.levels) e += 1e-9;
  const auto a = unfold_semicircle(s);
  const auto b = unfold_semicircle(shifted);
  REQUIRE(a.levels.size() == b.levels.size());
  for (std::size_t i = 0; i < a.levels.size(); ++i) CHECK(b.levels[i] == doctest::Approx(a.levels[i]).epsilon(1e-6));
}

TEST_CASE("polynomial unfolding keeps Poisson statistics") {
  std::vector<UnfoldedSpectrum> us;
  // A flat density needs many levels per bin before the 0.9 window spans it.
  for (std::size_t r = 0; r < 10; ++r) {
    const auto s = ensembles::sample({EnsembleClass::Poisson, 20000, 9}, r);
    us.push_back(unfold_polynomial(s, {0.9, 3, 20}));
  }
  for (const auto& u : us) CHECK(std::abs(u.mean_spacing() - 1.0) < 1e-2);
  for (int k : {1, 3, 8}) {
    const auto m = stats::moments(stats::knn_spacings(us, k));
    CHECK(std::abs(m.variance - k) < 4 * m.se_variance);
  }
}

TEST_CASE("polynomial unfolding is exactly affine invariant") {
  const auto s = ensembles::sample_goe(600, 12);
  auto t = s;
  for (double& e : t.levels) e = 3.7 * e - 12.5;
  const auto a = unfold_polynomial(s, {0.9, 3, 20});
  const auto b = unfold_polynomial(t, {0.9, 3, 20});
  REQUIRE(a.index_lo == b.index_lo);
  REQUIRE(a.index_hi == b.index_hi);
  for (std::size_t i = 0; i < a.levels.size(); ++i) CHECK(b.levels[i] == doctest::Approx(a.levels[i]).epsilon(1e-9));
}

TEST_CASE("polynomial and semicircle unfolding agree on GOE statistics") {
  std::vector<UnfoldedSpectrum> semi, poly;
  for (std::size_t r = 0; r < 12; ++r) {
    const auto s = ensembles::sample({EnsembleClass::GOE, 1000, 77}, r);
    semi.push_back(unfold_semicircle(s));
    poly.push_back(unfold_polynomial(s, {0.9, 3, 25}));
  }
  for (const auto& u : poly) {
    CHECK(std::is_sorted(u.levels.begin(), u.levels.end()));
    CHECK(u.levels.size() > 300);
    CHECK(std::abs(u.mean_spacing() - 1.0) < 1e-2);
  }
  const auto ms = stats::knn_moments(semi, 1, 30);
  const auto mp = stats::knn_moments(poly, 1, 30);
  for (int k = 1; k <= 30; ++k) {
    INFO("k=" << k);
    CHECK(std::abs(mp[k - 1].variance / ms[k - 1].variance - 1.0) < 0.02 + 3 * ms[k - 1].se_variance / ms[k - 1].variance);
  }
}

TEST_CASE("polynomial unfolding errors and fallback") {
  CHECK_THROWS_AS(unfold_polynomial(raw({0.0, 1.0, 2.0, 3.0, 4.0})), NumericalError);
  CHECK_THROWS_AS(unfold_polynomial(raw({1.0, 1.0, 1.0})), NumericalError);
  CHECK_THROWS_AS(unfold_polynomial(raw({0.0, 1.0}), {0.9, 0, 10}), ValidationError);

  // Dense, sparse, dense: the cubic staircase fit turns over in the gap.
  std::vector<double> e;
  for (int i = 0; i < 100; ++i) e.push_back(0.003 * i);
  for (int i = 0; i < 4; ++i) e.push_back(1.2 + i * 0.5);
  for (int i = 0; i < 100; ++i) e.push_back(3.69 + 0.003 * i);
  const auto u = unfold_polynomial(raw(e), {0.01, 3, 4});
  CHECK(u.fell_back);
  CHECK(u.degree == 1);
  CHECK(std::is_sorted(u.levels.begin(), u.levels.end()));
}

TEST_CASE("bin count adapts to the spectrum size") {
  PolynomialOptions o;
  CHECK(o.effective_bins(12870) == 100);
  CHECK(o.effective_bins(3432) == 26);
  CHECK(o.effective_bins(100) == 4);
  o.min_levels_per_bin = 0;
  CHECK(o.effective_bins(100) == 100);

  // About ten levels per bin: the window collapses around a fluctuation.
  bool collapsed = false;
  for (std::size_t r = 0; r < 5; ++r) {
    const auto s = ensembles::sample({EnsembleClass::GOE, 1000, 77}, r);
    CHECK(unfold_polynomial(s).levels.size() > 300);
    try {
      collapsed |= unfold_polynomial(s, {0.9, 3, 100, 0}).levels.size() < 150;
    } catch (const NumericalError&) {
      collapsed = true;
    }
  }
  CHECK(collapsed);
}

TEST_CASE("identity unfolding and method names") {
  const auto s = ensembles::sample_poisson_levels(50, 3);
  const auto u = unfold_identity(s);
  CHECK(u.levels == s.levels);
  CHECK(u.index_hi == 50);
  for (auto m : {Method::Semicircle, Method::PolynomialFit, Method::Identity}) CHECK(parse_method(to_string(m)) == m);
  CHECK_THROWS_AS(parse_method("spline"), ValidationError);
}
