#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace knn::pipeline {

/// Raw little-endian binary: "KNNS", u32 version, u64 count, count doubles.
void write_levels(const std::filesystem::path& path, std::span<const double> levels);
std::vector<double> read_levels(const std::filesystem::path& path);
void write_levels_csv(const std::filesystem::path& path, std::span<const double> levels);

/// Writes `text` to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& text);

/// One directory of per-realization spectra, each with a JSON sidecar that
/// identifies exactly what produced it.
class SpectrumCache {
 public:
  explicit SpectrumCache(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path levels_path(std::size_t index) const;
  std::filesystem::path sidecar_path(std::size_t index) const;

  /// True when the sidecar exists, every key of `identity` matches it, and
  /// the levels file holds the recorded number of levels.
  bool valid(std::size_t index, const nlohmann::json& identity) const;
  /// Levels first, sidecar last, so an interrupted store never looks valid.
  void store(std::size_t index, std::span<const double> levels, nlohmann::json sidecar) const;
  std::vector<double> load(std::size_t index) const;
  nlohmann::json sidecar(std::size_t index) const;

 private:
  std::filesystem::path dir_;
};

}  // namespace knn::pipeline
