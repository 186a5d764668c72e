#pragma once

// Open spin-1/2 XXZ chain with uniform random z-fields in the S^z_total = 0
// sector:
//   H = sum_{n<L} (S^x_n S^x_{n+1} + S^y_n S^y_{n+1} + Jz S^z_n S^z_{n+1})
//     + sum_n h_n S^z_n,   h_n ~ U[-W/2, W/2].

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include "knn/gof.hpp"
#include "knn/spectral_stats.hpp"
#include "knn/types.hpp"
#include "knn/unfolding.hpp"

namespace knn::xxz {

struct ChainSpec {
  int length = 14;  // even
  double jz = 1.0;
  double disorder = 1.0;  // W
  std::uint64_t seed = 0;
  int max_length = 16;  // dense-matrix memory guard

  void validate() const;
};

/// Half-filling configurations, sorted ascending as integers. Bit n set means
/// site n is up.
class SectorBasis {
 public:
  explicit SectorBasis(int length);

  int length() const { return length_; }
  std::size_t size() const { return states_.size(); }
  std::uint32_t state(std::size_t rank) const { return states_[rank]; }
  const std::vector<std::uint32_t>& states() const { return states_; }
  /// Position of `state` in the sorted list (combinatorial number system).
  std::size_t rank(std::uint32_t state) const;

 private:
  int length_;
  std::vector<std::uint32_t> states_;
  std::vector<std::vector<std::size_t>> binom_;
};

/// Enumerates the sector; throws ValidationError for odd L or L outside [2, 20].
SectorBasis build_basis(int length);

/// Site fields for one realization, drawn from derive_seed(seed, index).
std::vector<double> disorder_fields(const ChainSpec& spec, std::size_t realization_index);

/// Dense row-major sector Hamiltonian for explicit fields.
std::vector<double> build_hamiltonian(const ChainSpec& spec, const SectorBasis& basis, std::span<const double> fields);
std::vector<double> build_hamiltonian(const ChainSpec& spec, const SectorBasis& basis, std::size_t realization_index);

/// All sector eigenvalues of one realization, sorted.
SpectrumSample spectrum(const ChainSpec& spec, const SectorBasis& basis, std::size_t realization_index);
SpectrumSample spectrum(const ChainSpec& spec, std::size_t realization_index);

struct SweepOptions {
  int k_max = 50;
  unfolding::PolynomialOptions unfold{};
  double bin_width = stats::kDefaultBinWidth;
  double window_sigmas = 3.0;
  stats::NumberVarianceOptions nv{};  // L_max is raised to k_max when smaller
  std::vector<int> histogram_ks{};    // histograms kept in the result
};

struct SweepRow {
  int k = 0;
  stats::MomentSummary moments;
  double sigma_vs_goe = 0.0;
  double sigma_vs_poisson = 0.0;
};

struct SweepPoint {
  double disorder = 0.0;
  std::size_t n_realizations = 0;
  std::vector<std::size_t> retained;  // unfolded window size per realization
  std::size_t n_fallbacks = 0;
  std::vector<SweepRow> rows;         // k = 1..k_max
  stats::NumberVarianceCurve nv;
  std::vector<stats::GapRow> gaps;
  std::map<int, stats::Histogram> histograms;
};

struct SweepResult {
  ChainSpec spec;
  std::vector<SweepPoint> points;
};

/// Called once per diagonalized realization (from worker threads, serialized
/// by the sweep) so callers can persist spectra.
using RealizationHook = std::function<void(const SpectrumSample&, std::span<const double> fields)>;

/// Disorder-averaged statistics for each W. Realizations run in parallel; all
/// reductions go through realization-ordered merges.
SweepResult disorder_sweep(const ChainSpec& spec_template, std::span<const double> disorder_list,
                           std::size_t n_realizations, const SweepOptions& opts, const RealizationHook& hook = {});

/// Statistics of one W from already unfolded spectra (shared with the CLI's
/// cache path).
SweepPoint analyze_point(double disorder, std::span<const unfolding::UnfoldedSpectrum> unfolded,
                         const SweepOptions& opts);

}  // namespace knn::xxz
