#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "knn/error.hpp"
#include "knn/surmise.hpp"

using namespace knn::surmise;
using std::numbers::pi;

namespace {

// Independent oracle: moments by brute-force composite Simpson on a fine grid.
struct Simpson {
  double norm, mean, var, skew;
};

Simpson simpson_moments(const Surmise& s, double lo, double hi, int n = 200000) {
  const double h = (hi - lo) / n;
  double m[4] = {0, 0, 0, 0};
  for (int i = 0; i <= n; ++i) {
    const double x = lo + i * h;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    const double p = s.pdf(x) * w;
    m[0] += p;
    m[1] += p * x;
    m[2] += p * x * x;
    m[3] += p * x * x * x;
  }
  for (double& v : m) v *= h / 3.0;
  const double mu = m[1] / m[0];
  const double var = m[2] / m[0] - mu * mu;
  const double third = m[3] / m[0] - 3 * mu * m[2] / m[0] + 2 * mu * mu * mu;
  return {m[0], mu, var, third / std::pow(var, 1.5)};
}

}  // namespace

TEST_CASE("old exponent") {
  CHECK(alpha_old(1, 1) == 1.0);
  CHECK(alpha_old(2, 2) == 7.0);
  CHECK(alpha_old(3, 4) == 26.0);
}

TEST_CASE("Wigner constants") {
  auto g1 = norm_constants(1.0, 1, ConstantsMode::Exact);
  CHECK(g1.A == doctest::Approx(pi / 4).epsilon(1e-13));
  CHECK(g1.C == doctest::Approx(pi / 2).epsilon(1e-13));
  auto g2 = norm_constants(2.0, 1, ConstantsMode::Exact);
  CHECK(g2.A == doctest::Approx(4 / pi).epsilon(1e-13));
  CHECK(g2.C == doctest::Approx(32 / (pi * pi)).epsilon(1e-13));
}

TEST_CASE("exact and asymptotic A agree at large alpha") {
  const auto e = norm_constants(100.0, 10, ConstantsMode::Exact);
  const auto a = norm_constants(100.0, 10, ConstantsMode::Asymptotic);
  CHECK(std::abs(a.A / e.A - 1.0) < 1e-4);
  // The closed-form C carries a relative error close to 1/(4 alpha).
  CHECK(std::abs(a.C / e.C - 1.0 + 1.0 / 400.0) < 1e-4);
}

TEST_CASE("exact constants stay finite for huge alpha") {
  const auto c = norm_constants(5000.0, 100, ConstantsMode::Exact);
  CHECK(std::isfinite(c.A));
  CHECK(std::isfinite(c.log_C));
  CHECK(c.A > 0);
}

TEST_CASE("surmise variance formula") {
  CHECK(variance_of_surmise(2.0, 1) == doctest::Approx(3 * pi / 8 - 1).epsilon(1e-12));
  CHECK(variance_of_surmise(1.0, 1) == doctest::Approx(4 / pi - 1).epsilon(1e-12));
  CHECK(std::abs(variance_of_surmise(alpha_old(12, 2), 12) / rmt_variance(12, 2) - 1) < 0.02);
}

TEST_CASE("rmt variance") {
  for (int b : {1, 2, 4}) CHECK(rmt_variance(1, b) == rmt_constant(b));
  CHECK(rmt_variance(20, 2) == doctest::Approx(0.4817).epsilon(2e-4));
  CHECK(rmt_variance(50, 1) == doctest::Approx(2 / (pi * pi) * std::log(50.0) + 4 / pi - 1));
  CHECK(rmt_variance(50, 1) == doctest::Approx(1.0660).epsilon(1e-4));
}

TEST_CASE("corrected exponent modes") {
  CHECK(alpha_corrected(1, 1, AlphaMode::ClosedFormLargeK) == doctest::Approx(1.08).epsilon(0.01));
  CHECK(alpha_corrected(1, 2, AlphaMode::ClosedFormLargeK) == doctest::Approx(2.06).epsilon(0.005));
  CHECK(alpha_corrected(1, 4, AlphaMode::ClosedFormLargeK) == doctest::Approx(4.04).epsilon(0.003));
  for (int b : {1, 2, 4}) CHECK(alpha_corrected(1, b, AlphaMode::ExactRoot) == doctest::Approx(b).epsilon(1e-9));

  const double a = alpha_corrected(25, 2, AlphaMode::ExactRoot);
  CHECK(std::abs(variance_of_surmise(a, 25) - rmt_variance(25, 2)) < 1e-8);

  for (int b : {1, 2, 4})
    for (int k = 10; k <= 100; k += 10) {
      const double root = alpha_corrected(k, b, AlphaMode::ExactRoot);
      const double large = alpha_corrected(k, b, AlphaMode::ClosedFormLargeK);
      CHECK(std::abs(large / root - 1) < 0.01);
    }
  // Long and large-k forms share the same leading behaviour.
  const double lf = alpha_corrected(3, 1, AlphaMode::ClosedFormLong);
  const double lk = alpha_corrected(3, 1, AlphaMode::ClosedFormLargeK);
  CHECK(std::abs(lf / lk - 1) < 0.05);
}

TEST_CASE("long form has no real solution at k=1 for GOE") {
  CHECK_THROWS_AS(alpha_corrected(1, 1, AlphaMode::ClosedFormLong), knn::NumericalError);
}

TEST_CASE("default mode policies") {
  CHECK(default_constants_mode(9) == ConstantsMode::Exact);
  CHECK(default_constants_mode(10) == ConstantsMode::Asymptotic);
  CHECK(default_alpha_mode(2, 1) == AlphaMode::ClosedFormLong);
  CHECK(default_alpha_mode(3, 2) == AlphaMode::ClosedFormLong);
  CHECK(default_alpha_mode(2, 4) == AlphaMode::ClosedFormLargeK);
  CHECK(default_alpha_mode(4, 1) == AlphaMode::ClosedFormLargeK);
}

TEST_CASE("pdf evaluation") {
  const auto w = Surmise::old(1, 1);
  CHECK(w.pdf(1.0) == doctest::Approx(pi / 2 * std::exp(-pi / 4)).epsilon(1e-14));
  CHECK(w.pdf(1.0) == doctest::Approx(0.71619).epsilon(1e-5));
  CHECK(w.pdf(0.0) == 0.0);
  CHECK_THROWS_AS(w.pdf(-0.1), knn::ValidationError);

  const auto wn = Surmise::wigner_nn(1);
  CHECK(wn.alpha() == w.alpha());
  CHECK(wn.A() == w.A());
  CHECK(wn.C() == w.C());

  const auto p = Surmise::poisson_knn(1);
  CHECK(p.pdf(0.0) == doctest::Approx(1.0));

  const auto g = Surmise::gaussian(7, 2);
  const double var = rmt_variance(7, 2);
  CHECK(g.pdf(7.0) == doctest::Approx(1 / std::sqrt(2 * pi * var)));
  CHECK(g.pdf(7.3) == doctest::Approx(g.pdf(6.7)).epsilon(1e-14));
  CHECK(g.pdf(-1.0) >= 0.0);
}

TEST_CASE("quadrature matches a brute-force Simpson oracle") {
  const Surmise cases[] = {Surmise::old(1, 1), Surmise::corrected(4, 2), Surmise::poisson_knn(3),
                           Surmise::corrected_nn_gue(), Surmise::gaussian(5, 1)};
  for (const auto& s : cases) {
    const auto q = quadrature_moments(s);
    const double sd = std::sqrt(q.variance);
    const double lo = s.family() == Family::Gaussian ? s.k() - 14 * sd : 0.0;
    const double hi = s.family() == Family::PoissonKNN ? s.k() + 60.0 : s.k() + 14 * sd;
    const auto o = simpson_moments(s, lo, hi);
    CHECK(q.norm == doctest::Approx(o.norm).epsilon(1e-9));
    CHECK(q.mean == doctest::Approx(o.mean).epsilon(1e-9));
    CHECK(q.variance == doctest::Approx(o.var).epsilon(1e-8));
    CHECK(q.skewness == doctest::Approx(o.skew).epsilon(1e-6));
  }
}

TEST_CASE("normalization and mean for exact-constant families") {
  for (int b : {1, 2, 4})
    for (int k : {1, 2, 3, 5, 10, 30, 100}) {
      for (const auto& s : {Surmise::old(k, b, ConstantsMode::Exact),
                            Surmise::corrected(k, b, AlphaMode::ExactRoot, ConstantsMode::Exact)}) {
        const auto q = quadrature_moments(s);
        CHECK(std::abs(q.norm - 1) < 1e-8);
        CHECK(std::abs(q.mean - k) < 1e-6);
      }
    }
  const auto q = quadrature_moments(Surmise::corrected(10, 2, AlphaMode::ClosedFormLargeK, ConstantsMode::Exact));
  CHECK(std::abs(q.norm - 1) < 1e-8);
  CHECK(std::abs(q.mean - 10) < 1e-8);
}

TEST_CASE("Poisson kNN moments") {
  for (int k : {1, 2, 7, 20}) {
    const auto q = quadrature_moments(Surmise::poisson_knn(k));
    CHECK(std::abs(q.norm - 1) < 1e-8);
    CHECK(std::abs(q.mean - k) < 1e-8);
    CHECK(std::abs(q.variance - k) < 1e-8);
    CHECK(std::abs(q.skewness - 2 / std::sqrt(k)) < 1e-6);
  }
}

TEST_CASE("corrected NN GUE surmise") {
  const auto s = Surmise::corrected_nn_gue();
  CHECK(s.alpha() == kCorrectedNNBeta);
  const auto q = quadrature_moments(s);
  CHECK(std::abs(q.variance - kExactNNVarianceGUE) < 1e-4);
  CHECK(std::abs(q.norm - 1) < 1e-8);
  CHECK(std::abs(q.mean - 1) < 1e-8);
}

TEST_CASE("skewness formula") {
  CHECK(skewness_of_surmise(50.0) == doctest::Approx(0.1).epsilon(0.05));
  CHECK(std::abs(skewness_of_surmise_exact(200.0) / (1 / std::sqrt(400.0)) - 1) < 0.01);
  for (double a : {1.0, 7.0, 40.0}) {
    const auto q = quadrature_moments(Surmise::power_law(a, 3));
    CHECK(skewness_of_surmise(a) == doctest::Approx(q.skewness).epsilon(1e-7));
  }
  CHECK(skewness_of_surmise(800.0) == doctest::Approx(1 / std::sqrt(1600.0)));
}

TEST_CASE("excess kurtosis fades at large alpha") {
  const auto q = quadrature_moments(Surmise::power_law(200.0, 20));
  CHECK(std::abs(q.excess_kurtosis) < 3 * 3.0 / (4 * 200.0 * 200.0) + 1e-6);
}

TEST_CASE("enum names round-trip") {
  for (auto f : {Family::Old, Family::Corrected, Family::Gaussian, Family::PoissonKNN, Family::WignerNN,
                 Family::CorrectedNN_GUE})
    CHECK(parse_family(to_string(f)) == f);
  for (auto m : {ConstantsMode::Exact, ConstantsMode::Asymptotic}) CHECK(parse_constants_mode(to_string(m)) == m);
  for (auto m : {AlphaMode::ClosedFormLong, AlphaMode::ClosedFormLargeK, AlphaMode::ExactRoot})
    CHECK(parse_alpha_mode(to_string(m)) == m);
  CHECK_THROWS_AS(parse_family("bogus"), knn::ValidationError);
}
