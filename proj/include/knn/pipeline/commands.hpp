#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "knn/pipeline/config.hpp"
#include "knn/unfolding.hpp"

namespace knn::pipeline {

struct CommandReport {
  std::size_t generated = 0;
  std::size_t cached = 0;
  std::size_t failed = 0;
  std::vector<std::string> errors;               // one line per failed realization
  std::vector<std::filesystem::path> outputs;    // aggregate files written
};

/// Cache directory name for the configured ensemble, e.g. "goe_N1000".
std::string ensemble_group(const CampaignConfig& c);

/// Samples and caches every realization that is missing or stale. Failures
/// are recorded per realization and the run carries on.
CommandReport cmd_sample(const CampaignConfig& c);

/// Cached spectra of the configured ensemble, unfolded per the config.
/// Missing realizations are sampled first when sample_inline is set,
/// otherwise IoError.
std::vector<unfolding::UnfoldedSpectrum> load_unfolded(const CampaignConfig& c);

/// moments.csv, nv.csv, hist_k{K}.csv and gof.csv.
CommandReport cmd_analyze(const CampaignConfig& c);

/// xxz_sweep.csv, xxz_nv.csv and xxz_hist_W{W}_k{K}.csv.
CommandReport cmd_xxz(const CampaignConfig& c);

/// surmise_table.csv; every row passes a quadrature normalization audit.
CommandReport cmd_table(const CampaignConfig& c);

}  // namespace knn::pipeline
