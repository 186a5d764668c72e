#include <doctest.h>

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "knn/ensembles.hpp"
#include "knn/error.hpp"
#include "knn/spectral_stats.hpp"
#include "knn/spectral_stats_reference.hpp"
#include "knn/surmise.hpp"

using namespace knn;
using namespace knn::stats;

namespace {

UnfoldedSpectrum from_levels(std::vector<double> levels) {
  UnfoldedSpectrum u;
  u.levels = std::move(levels);
  u.index_hi = u.levels.size();
  return u;
}

std::vector<UnfoldedSpectrum> poisson_campaign(std::size_t n, std::size_t reals, std::uint64_t seed) {
  std::vector<UnfoldedSpectrum> out;
  for (std::size_t r = 0; r < reals; ++r)
    out.push_back(unfolding::unfold_identity(ensembles::sample({EnsembleClass::Poisson, n, seed}, r)));
  return out;
}

std::vector<UnfoldedSpectrum> goe_campaign(std::size_t n, std::size_t reals, std::uint64_t seed) {
  std::vector<UnfoldedSpectrum> out;
  for (std::size_t r = 0; r < reals; ++r)
    out.push_back(unfolding::unfold_semicircle(ensembles::sample({EnsembleClass::GOE, n, seed}, r)));
  return out;
}

// Two-pass central moments.
struct Direct {
  double mean, var, skew, kurt;
};
Direct direct_moments(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double m2 = 0, m3 = 0, m4 = 0;
  for (double v : x) {
    const double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  return {mean, m2 * n / (n - 1), m3 / std::pow(m2, 1.5), m4 / (m2 * m2) - 3.0};
}

// Brute-force count of levels in [x, x + L) for every window start.
double brute_number_variance(const std::vector<UnfoldedSpectrum>& spectra, double L, double stride) {
  double s = 0, s2 = 0, n = 0;
  for (const auto& u : spectra) {
    const double lo = u.levels.front(), hi = u.levels.back();
    for (std::size_t m = 0;; ++m) {
      const double x = lo + static_cast<double>(m) * stride;
      if (x + L > hi) break;
      double c = 0;
      for (double e : u.levels) c += (e >= x && e < x + L) ? 1.0 : 0.0;
      s += c;
      s2 += c * c;
      n += 1;
    }
  }
  const double mean = s / n;
  return s2 / n - mean * mean;
}

}  // namespace

TEST_CASE("spacings by direct subtraction") {
  const std::vector<double> lv{0, 1, 3, 6};
  CHECK(knn_spacings(std::span<const double>(lv), 2) == std::vector<double>{3, 5});
  CHECK(knn_spacings(std::span<const double>(lv), 1) == std::vector<double>{1, 2, 3});
  CHECK_THROWS_AS(knn_spacings(std::span<const double>(lv), 4), ValidationError);
}

TEST_CASE("pooled spacings respect realization boundaries") {
  const auto spectra = poisson_campaign(300, 4, 5);
  for (int k : {1, 3, 17}) {
    const auto set = knn_spacings(spectra, k);
    std::size_t expected = 0;
    for (const auto& u : spectra) expected += u.levels.size() - k;
    CHECK(set.values.size() == expected);
    CHECK(set.offsets.size() == spectra.size() + 1);
    CHECK(set.n_realizations == spectra.size());
    CHECK(*std::min_element(set.values.begin(), set.values.end()) >= 0.0);
    // Additivity: s^(k)_i equals the sum of k consecutive NN spacings.
    for (std::size_t r = 0; r < spectra.size(); ++r) {
      const auto nn = knn_spacings(std::span<const double>(spectra[r].levels), 1);
      for (std::size_t i = 0; i + k <= nn.size(); i += 37) {
        double sum = 0;
        for (int j = 0; j < k; ++j) sum += nn[i + j];
        CHECK(set.values[set.offsets[r] + i] == doctest::Approx(sum).epsilon(1e-12));
      }
    }
  }
  CHECK_THROWS_AS(knn_spacings(spectra, 300), ValidationError);
  CHECK_THROWS_AS(knn_spacings(spectra, 0), ValidationError);
}

TEST_CASE("moments of degenerate and small sets") {
  SpacingSet flat;
  flat.values = {1, 1, 1, 1};
  const auto m = moments(flat);
  CHECK(m.mean == 1.0);
  CHECK(m.variance == 0.0);
  CHECK_FALSE(m.skewness.has_value());
  CHECK_FALSE(m.excess_kurtosis.has_value());

  SpacingSet one;
  one.values = {2.0};
  CHECK_THROWS_AS(moments(one), ValidationError);
}

TEST_CASE("moments agree with a two-pass oracle") {
  std::mt19937_64 rng(3);
  std::gamma_distribution<double> g(3.0, 1.5);
  SpacingSet set;
  for (int i = 0; i < 50000; ++i) set.values.push_back(g(rng));
  const auto m = moments(set);
  const auto d = direct_moments(set.values);
  CHECK(m.mean == doctest::Approx(d.mean).epsilon(1e-12));
  CHECK(m.variance == doctest::Approx(d.var).epsilon(1e-10));
  CHECK(*m.skewness == doctest::Approx(d.skew).epsilon(1e-8));
  CHECK(*m.excess_kurtosis == doctest::Approx(d.kurt).epsilon(1e-8));
  CHECK(m.standard_error_of_mean == doctest::Approx(std::sqrt(d.var / 50000)).epsilon(1e-9));
}

TEST_CASE("OpenMP moments match the serial reference and ignore thread count") {
  const auto spectra = goe_campaign(300, 12, 8);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const auto one = knn_moments(spectra, 1, 40);
  omp_set_num_threads(4);
  const auto four = knn_moments(spectra, 1, 40);
  omp_set_num_threads(saved);
  const auto ref = reference::knn_moments(spectra, 1, 40);
  REQUIRE(one.size() == 40);
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(one[i].mean == four[i].mean);
    CHECK(one[i].variance == four[i].variance);
    CHECK(*one[i].skewness == *four[i].skewness);
    CHECK(one[i].standard_error_of_mean == four[i].standard_error_of_mean);
    CHECK(one[i].n == ref[i].n);
    CHECK(one[i].mean == doctest::Approx(ref[i].mean).epsilon(1e-12));
    CHECK(one[i].variance == doctest::Approx(ref[i].variance).epsilon(1e-9));
    CHECK(*one[i].skewness == doctest::Approx(*ref[i].skewness).epsilon(1e-7));
    CHECK(*one[i].excess_kurtosis == doctest::Approx(*ref[i].excess_kurtosis).epsilon(1e-6));
    CHECK(one[i].standard_error_of_mean == doctest::Approx(ref[i].standard_error_of_mean).epsilon(1e-9));
    const auto direct = moments(knn_spacings(spectra, static_cast<int>(i) + 1));
    CHECK(direct.variance == doctest::Approx(one[i].variance).epsilon(1e-10));
  }
}

TEST_CASE("GUE variance at k=20 follows the logarithmic law") {
  std::vector<UnfoldedSpectrum> spectra;
  for (std::size_t r = 0; r < 20; ++r)
    spectra.push_back(unfolding::unfold_semicircle(ensembles::sample({EnsembleClass::GUE, 400, 6}, r)));
  const auto m = knn_moments(spectra, 20, 20).front();
  CHECK(std::abs(m.variance / 0.4817 - 1.0) < 0.05);
  CHECK(std::abs(m.mean - 20.0) < 0.2);
}

TEST_CASE("Poisson k=10 moments") {
  const auto spectra = poisson_campaign(20000, 8, 19);
  const auto m = knn_moments(spectra, 10, 10).front();
  CHECK(std::abs(m.mean - 10) < 4 * m.standard_error_of_mean);
  CHECK(std::abs(m.variance - 10) < 4 * m.se_variance);
}

TEST_CASE("histogram normalization") {
  std::vector<double> u;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  for (int i = 0; i < 200000; ++i) u.push_back(d(rng));
  const auto h = build_histogram(u, 0.1, {0.0, 1.0});
  CHECK(h.n_bins() == 10);
  double integral = 0;
  for (std::size_t i = 0; i < h.n_bins(); ++i) {
    CHECK(h.densities[i] == doctest::Approx(1.0).epsilon(0.02));
    integral += h.densities[i] * h.bin_width();
  }
  CHECK(std::abs(integral - 1.0) < 1e-9);
  for (std::size_t i = 1; i < h.edges.size(); ++i) CHECK(h.edges[i] > h.edges[i - 1]);

  const auto ref = reference::build_histogram(u, 0.1, {0.0, 1.0});
  CHECK(ref.counts == h.counts);
  CHECK(ref.densities == h.densities);

  const std::vector<double> out_of_range{-1.0, 0.5, 7.0};
  const auto partial = build_histogram(out_of_range, 0.25, {0.0, 1.0});
  CHECK(partial.n_total == 3);
  CHECK(partial.n_in_range == 1);
  CHECK_THROWS_AS(build_histogram(u, 0.0, {0.0, 1.0}), ValidationError);
  CHECK_THROWS_AS(build_histogram(u, 0.1, {1.0, 1.0}), ValidationError);
}

TEST_CASE("default histogram range") {
  const auto r = default_histogram_range(3, 0.25);
  CHECK(r.lo == doctest::Approx(0.5));
  CHECK(r.hi == doctest::Approx(5.5));
  CHECK(default_histogram_range(1, 1.0).lo == 0.0);
}

TEST_CASE("number variance against brute-force counting") {
  const auto spectra = goe_campaign(200, 3, 4);
  NumberVarianceOptions opts{6.0, 0.5, 0.5};
  const auto nv = number_variance(spectra, opts);
  const auto ref = reference::number_variance(spectra, opts);
  REQUIRE(nv.L_grid.size() == 13);
  CHECK(nv.sigma2 == ref.sigma2);
  CHECK(nv.n_starts == ref.n_starts);
  CHECK(nv.sigma2[0] == 0.0);
  for (std::size_t i = 0; i < nv.L_grid.size(); ++i) {
    CHECK(nv.sigma2[i] >= 0.0);
    CHECK(nv.sigma2[i] == doctest::Approx(brute_number_variance(spectra, nv.L_grid[i], 0.5)).epsilon(1e-9));
  }
  CHECK(nv.at(2.0) == nv.sigma2[4]);
  CHECK(nv.at(2.25) == doctest::Approx(0.5 * (nv.sigma2[4] + nv.sigma2[5])));
}

TEST_CASE("number variance of Poisson levels grows linearly") {
  const auto spectra = poisson_campaign(20000, 4, 23);
  const auto nv = number_variance(spectra, {20.0, 0.25, 0.5});
  for (double L : {1.0, 5.0, 10.0, 20.0}) CHECK(nv.at(L) == doctest::Approx(L).epsilon(0.06));
}

TEST_CASE("number variance parameter checks") {
  const auto spectra = poisson_campaign(50, 2, 1);
  CHECK_THROWS_AS(number_variance(spectra, {5.0, 0.25, 0.0}), ValidationError);
  CHECK_THROWS_AS(number_variance(spectra, {500.0, 0.25, 0.5}), ValidationError);
  CHECK_THROWS_AS(number_variance(spectra, {5.0, -1.0, 0.5}), ValidationError);
}

TEST_CASE("delta minus sigma2 gap") {
  const auto spectra = poisson_campaign(20000, 6, 29);
  const auto ms = knn_moments(spectra, 1, 10);
  const auto nv = number_variance(spectra, {10.0, 0.25, 0.5});
  const auto gaps = delta_sigma_gap(ms, 1, nv);
  REQUIRE(gaps.size() == 10);
  for (const auto& g : gaps) {
    CHECK(g.gap == doctest::Approx(g.delta - g.sigma2));
    CHECK(std::abs(g.gap) < 0.1 * g.k + 0.1);
  }
  CHECK(gaps[3].k == 4);
}
