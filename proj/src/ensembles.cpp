#include "knn/ensembles.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <random>
#include <string>

#include "knn/eigensolver.hpp"
#include "knn/error.hpp"
#include "knn/parallel.hpp"
#include "knn/seeding.hpp"

namespace knn::ensembles {
namespace {

using cplx = std::complex<double>;

constexpr double kKramersTolerance = 1e-8;

void require_dim(std::size_t n, const char* who) {
  if (n < 2) throw ValidationError(std::string(who) + ": N must be >= 2, got " + std::to_string(n));
}

SpectrumSample make_sample(EnsembleClass cls, std::size_t n, std::uint64_t seed,
                           std::vector<double> levels) {
  SpectrumSample s;
  s.model = std::string(to_string(cls));
  s.ensemble = EnsembleSpec{cls, n, seed};
  s.seed = seed;
  s.levels = std::move(levels);
  return s;
}

// Entries are drawn row by row over the upper triangle so that the stream
// layout is fixed independently of matrix storage.
std::vector<double> fill_goe(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> diag(0.0, 1.0);
  std::normal_distribution<double> off(0.0, std::sqrt(0.5));
  std::vector<double> a(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    a[i * n + i] = diag(rng);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double x = off(rng);
      a[i * n + j] = x;
      a[j * n + i] = x;
    }
  }
  return a;
}

std::vector<cplx> fill_gue(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> diag(0.0, std::sqrt(0.5));
  std::normal_distribution<double> part(0.0, 0.5);  // Re, Im each variance 1/4
  std::vector<cplx> a(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i * n + i] = {diag(rng), 0.0};
    for (std::size_t j = i + 1; j < n; ++j) {
      const double re = part(rng);
      const double im = part(rng);
      a[i * n + j] = {re, im};
      a[j * n + i] = {re, -im};
    }
  }
  return a;
}

// Blocks for the self-dual form. A Hermitian with off-diagonal complex
// variance 1/4, B antisymmetric with complex variance 1/4.
std::vector<cplx> fill_gse(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> diag(0.0, std::sqrt(0.25));
  std::normal_distribution<double> part(0.0, std::sqrt(0.125));
  const std::size_t m = 2 * n;
  std::vector<cplx> h(m * m);
  auto at = [&](std::size_t r, std::size_t c) -> cplx& { return h[r * m + c]; };
  for (std::size_t i = 0; i < n; ++i) {
    const double d = diag(rng);
    at(i, i) = {d, 0.0};
    at(n + i, n + i) = {d, 0.0};
    for (std::size_t j = i + 1; j < n; ++j) {
      const cplx a{part(rng), part(rng)};
      const cplx b{part(rng), part(rng)};
      at(i, j) = a;
      at(j, i) = std::conj(a);
      at(n + i, n + j) = std::conj(a);
      at(n + j, n + i) = a;
      // B_ij = b, B_ji = -b; lower-left block is -conj(B).
      at(i, n + j) = b;
      at(j, n + i) = -b;
      at(n + j, i) = std::conj(b);
      at(n + i, j) = -std::conj(b);
    }
  }
  return h;
}

std::vector<double> kramers_reduce(const std::vector<double>& w) {
  const double scale = std::max({std::abs(w.front()), std::abs(w.back()), 1.0});
  std::vector<double> out(w.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double gap = w[2 * i + 1] - w[2 * i];
    if (std::abs(gap) > kKramersTolerance * scale) {
      throw NumericalError("GSE Kramers pairing failed at pair " + std::to_string(i) +
                           ": relative gap " + std::to_string(gap / scale));
    }
    out[i] = w[2 * i];
  }
  return out;
}

}  // namespace

double semicircle_radius(std::size_t n_levels) { return std::sqrt(2.0 * static_cast<double>(n_levels)); }

std::vector<double> goe_matrix(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return fill_goe(n, rng);
}

std::vector<std::complex<double>> gue_matrix(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return fill_gue(n, rng);
}

std::vector<std::complex<double>> gse_matrix(std::size_t n_distinct, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return fill_gse(n_distinct, rng);
}

SpectrumSample sample_goe(std::size_t n, std::uint64_t seed) {
  require_dim(n, "sample_goe");
  auto a = goe_matrix(n, seed);
  return make_sample(EnsembleClass::GOE, n, seed, linalg::symmetric_eigenvalues(a, n));
}

SpectrumSample sample_gue(std::size_t n, std::uint64_t seed) {
  require_dim(n, "sample_gue");
  auto a = gue_matrix(n, seed);
  return make_sample(EnsembleClass::GUE, n, seed, linalg::hermitian_eigenvalues(a, n));
}

SpectrumSample sample_gse(std::size_t n_distinct, std::uint64_t seed) {
  require_dim(n_distinct, "sample_gse");
  auto h = gse_matrix(n_distinct, seed);
  const auto w = linalg::hermitian_eigenvalues(h, 2 * n_distinct);
  return make_sample(EnsembleClass::GSE, n_distinct, seed, kramers_reduce(w));
}

SpectrumSample sample_poisson_levels(std::size_t n, std::uint64_t seed) {
  require_dim(n, "sample_poisson_levels");
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> gap(1.0);
  std::vector<double> levels(n);
  levels[0] = 0.0;
  for (std::size_t i = 1; i < n; ++i) levels[i] = levels[i - 1] + gap(rng);
  return make_sample(EnsembleClass::Poisson, n, seed, std::move(levels));
}

SpectrumSample sample(const EnsembleSpec& spec, std::size_t index) {
  spec.validate();
  const std::uint64_t seed = derive_seed(spec.seed, index);
  SpectrumSample s;
  switch (spec.cls) {
    case EnsembleClass::GOE: s = sample_goe(spec.dim, seed); break;
    case EnsembleClass::GUE: s = sample_gue(spec.dim, seed); break;
    case EnsembleClass::GSE: s = sample_gse(spec.dim, seed); break;
    case EnsembleClass::Poisson: s = sample_poisson_levels(spec.dim, seed); break;
  }
  s.ensemble = spec;
  s.realization_index = index;
  return s;
}

SpacingSet small_matrix_oracle(int k, int beta, std::size_t n_samples, std::uint64_t seed) {
  if (k < 1) throw ValidationError("small_matrix_oracle: k must be >= 1");
  if (beta != 1 && beta != 2 && beta != 4) throw ValidationError("small_matrix_oracle: beta must be 1, 2 or 4");
  const auto n = static_cast<std::size_t>(k) + 1;
  constexpr std::size_t kChunk = 4096;
  const std::size_t n_chunks = (n_samples + kChunk - 1) / kChunk;

  SpacingSet out;
  out.k = k;
  out.n_realizations = n_samples;
  out.values.resize(n_samples);

  parallel_for(n_chunks, [&](std::size_t c) {
    std::mt19937_64 rng(derive_seed(seed, c));
    const std::size_t lo = c * kChunk;
    const std::size_t hi = std::min(n_samples, lo + kChunk);
    for (std::size_t s = lo; s < hi; ++s) {
      double spread = 0.0;
      if (beta == 1) {
        const auto a = fill_goe(n, rng);
        Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(a.data(), n, n);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
        spread = es.eigenvalues()(n - 1) - es.eigenvalues()(0);
      } else {
        const auto a = beta == 2 ? fill_gue(n, rng) : fill_gse(n, rng);
        const std::size_t m_dim = beta == 2 ? n : 2 * n;
        Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(a.data(), m_dim, m_dim);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
        spread = es.eigenvalues()(m_dim - 1) - es.eigenvalues()(0);
      }
      out.values[s] = spread;
    }
  });

  const double mean = std::accumulate(out.values.begin(), out.values.end(), 0.0) /
                      static_cast<double>(out.values.size());
  const double scale = static_cast<double>(k) / mean;
  for (double& v : out.values) v *= scale;
  return out;
}

}  // namespace knn::ensembles
