#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace knn {

enum class EnsembleClass { GOE, GUE, GSE, Poisson };

std::string_view to_string(EnsembleClass c);
EnsembleClass parse_ensemble(std::string_view name);

/// Dyson index of a Gaussian class; nullopt for Poisson.
std::optional<int> dyson_index(EnsembleClass c);

struct EnsembleSpec {
  EnsembleClass cls = EnsembleClass::GOE;
  /// Number of real levels delivered (distinct levels for GSE).
  std::size_t dim = 2;
  std::uint64_t seed = 0;

  std::optional<int> beta() const { return dyson_index(cls); }
  /// Throws ValidationError unless dim >= 2.
  void validate() const;
};

/// One realization's sorted levels plus where they came from.
struct SpectrumSample {
  std::string model;  // "goe", "gue", "gse", "poisson", "xxz"
  std::optional<EnsembleSpec> ensemble;
  std::uint64_t seed = 0;  // per-realization seed actually used
  std::size_t realization_index = 0;
  std::vector<double> levels;
};

/// Pooled k-th neighbor spacings s_i = E_{i+k} - E_i.
struct SpacingSet {
  int k = 1;
  std::vector<double> values;
  std::size_t n_realizations = 0;
  /// values[offsets[r], offsets[r+1]) came from realization r. Empty when the
  /// samples are iid (small-matrix oracle).
  std::vector<std::size_t> offsets;
};

}  // namespace knn
