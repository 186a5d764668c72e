#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "knn/surmise.hpp"
#include "knn/types.hpp"
#include "knn/unfolding.hpp"

namespace knn::pipeline {

struct UnfoldConfig {
  unfolding::Method method = unfolding::Method::Semicircle;  // Poisson is always Identity
  double bulk_fraction = 0.8;
  double density_threshold = 0.9;
  int degree = 3;
  std::size_t n_bins = 100;
  std::size_t min_levels_per_bin = 128;  // 0: always n_bins

  unfolding::PolynomialOptions polynomial() const { return {density_threshold, degree, n_bins, min_levels_per_bin}; }
};

struct NumberVarianceConfig {
  double L_max = 30.0;
  double L_step = 0.25;
  double start_stride = 0.5;
};

struct XxzConfig {
  int length = 14;
  double jz = 1.0;
  std::vector<double> w_list{1.0, 2.0, 3.0, 5.0, 20.0};
  std::size_t n_realizations = 20;
  int max_length = 16;
};

struct CampaignConfig {
  EnsembleClass ensemble = EnsembleClass::GOE;
  std::size_t n_dim = 1000;  // distinct levels (GSE: half the complex dimension)
  std::size_t n_realizations = 200;
  int k_min = 1;
  int k_max = 50;
  std::vector<int> histogram_ks{1, 2, 5, 10, 20};
  UnfoldConfig unfold{};
  double bin_width = 0.05;
  double window_sigmas = 3.0;
  std::optional<surmise::ConstantsMode> constants_mode{};  // empty: per-k default
  NumberVarianceConfig nv{};
  XxzConfig xxz{};
  std::uint64_t seed = 1;
  bool sample_inline = true;
  bool export_csv = false;

  // Execution knobs, excluded from the config hash.
  int workers = 0;
  std::filesystem::path out_dir = "knn_out";

  void validate() const;
};

CampaignConfig preset(const std::string& name);

nlohmann::json to_json(const CampaignConfig& c);
/// Missing keys keep the values from `base`.
CampaignConfig from_json(const nlohmann::json& j, CampaignConfig base = {});

CampaignConfig load_config(const std::filesystem::path& path, CampaignConfig base = {});

/// Stable 16-hex-digit digest of the scientific fields.
std::string config_hash(const CampaignConfig& c);

}  // namespace knn::pipeline
