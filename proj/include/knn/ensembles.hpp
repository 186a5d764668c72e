#pragma once

// Seeded samplers for the Gaussian ensembles and the 1d Poisson process.
//
// Normalization: every Gaussian class is scaled so that the limiting
// semicircle has radius sqrt(2N), N being the number of distinct levels.
// Each sampler is a pure function of its arguments.

#include <cstddef>
#include <complex>
#include <cstdint>
#include <vector>

#include "knn/types.hpp"

namespace knn::ensembles {

/// Semicircle radius shared by all three Gaussian classes.
double semicircle_radius(std::size_t n_levels);

/// Dense row-major matrices behind the samplers, same seed, same draws.
std::vector<double> goe_matrix(std::size_t n, std::uint64_t seed);
std::vector<std::complex<double>> gue_matrix(std::size_t n, std::uint64_t seed);
std::vector<std::complex<double>> gse_matrix(std::size_t n_distinct, std::uint64_t seed);  // 2n x 2n

/// H = (M + M^T)/2 with M iid N(0,1).
SpectrumSample sample_goe(std::size_t n, std::uint64_t seed);

/// H = (M + M^dagger)/2, complex M with Re, Im ~ N(0, 1/2).
SpectrumSample sample_gue(std::size_t n, std::uint64_t seed);

/// 2n x 2n self-dual Hermitian [[A, B], [-B*, A*]]; the Kramers pairing is
/// checked and one level per pair is returned. Throws NumericalError when a
/// pair splits by more than 1e-8 relative to the spectral radius.
SpectrumSample sample_gse(std::size_t n_distinct, std::uint64_t seed);

/// Cumulative sums of n-1 unit-mean exponential gaps, starting at 0.
SpectrumSample sample_poisson_levels(std::size_t n, std::uint64_t seed);

/// Realization `index` of a campaign; seed derived from (spec.seed, index).
SpectrumSample sample(const EnsembleSpec& spec, std::size_t index);

/// Monte Carlo distribution of E_{k+1} - E_1 for (k+1)-dimensional matrices
/// of Dyson index beta, rescaled to mean k.
SpacingSet small_matrix_oracle(int k, int beta, std::size_t n_samples, std::uint64_t seed);

}  // namespace knn::ensembles
