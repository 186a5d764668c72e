#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace knn::pipeline {

std::string code_version();
std::string utc_timestamp();

struct RealizationRecord {
  std::string group;  // cache subdirectory, e.g. "goe_N1000"
  std::size_t index = 0;
  std::uint64_t seed = 0;
  std::string file;    // relative to the output directory
  std::string status;  // "generated", "cached" or "failed"
  std::string error;
  std::optional<std::vector<double>> h_values;
};

struct RunManifest {
  std::string config_hash;
  std::string code_version;
  std::string created_at;
  std::string updated_at;
  nlohmann::json config;
  std::vector<RealizationRecord> realizations;  // sorted by (group, index)
  std::vector<std::string> outputs;             // sorted, unique

  /// Inserts or replaces the record with the same (group, index).
  void upsert(RealizationRecord r);
  void add_output(const std::string& relative_path);

  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);
};

/// Loads out_dir/manifest.json when present and produced by the same config
/// hash; otherwise starts a fresh manifest for `config`.
RunManifest open_manifest(const std::filesystem::path& out_dir, const std::string& hash, const nlohmann::json& config);
void save_manifest(const std::filesystem::path& out_dir, RunManifest& m);

}  // namespace knn::pipeline
