// knnstat: sample, analyze and tabulate k-th neighbor spacing statistics.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "knn/error.hpp"
#include "knn/pipeline/commands.hpp"
#include "knn/pipeline/config.hpp"

namespace kp = knn::pipeline;

namespace {

void print_report(const std::string& what, const kp::CommandReport& r) {
  std::cout << what << ": generated=" << r.generated << " cached=" << r.cached << " failed=" << r.failed << "\n";
  for (const auto& e : r.errors) std::cerr << "  error: " << e << "\n";
  for (const auto& p : r.outputs) std::cout << "  wrote " << p.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"k-th nearest neighbor spacing statistics for random matrices and XXZ chains"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, preset_name = "desk", ensemble, out_dir;
  std::uint64_t seed = 0;
  int workers = 0, k_min = 0, k_max = 0, length = 0;
  std::size_t n_dim = 0, realizations = 0;
  std::vector<double> w_list;

  auto* o_config = app.add_option("--config", config_path, "JSON campaign config")->check(CLI::ExistingFile);
  app.add_option("--preset", preset_name, "Base preset")->check(CLI::IsMember({"desk", "paper"}));
  auto* o_seed = app.add_option("--seed", seed, "Master seed");
  auto* o_workers = app.add_option("--workers", workers, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
  auto* o_out = app.add_option("--out", out_dir, "Output directory");
  auto* o_kmin = app.add_option("--k-min", k_min, "Smallest neighbor order");
  auto* o_kmax = app.add_option("--k-max", k_max, "Largest neighbor order");
  auto* o_ens = app.add_option("--ensemble", ensemble, "Ensemble")->check(CLI::IsMember({"goe", "gue", "gse", "poisson"}));
  auto* o_dim = app.add_option("--n-dim", n_dim, "Levels per realization (GSE: distinct levels)");
  auto* o_real = app.add_option("--realizations", realizations, "Realizations (per W for xxz)");
  auto* o_len = app.add_option("--length", length, "XXZ chain length");
  auto* o_w = app.add_option("--w-list", w_list, "XXZ disorder widths")->delimiter(',');

  auto* sample = app.add_subcommand("sample", "Sample and cache spectra");
  auto* analyze = app.add_subcommand("analyze", "Moments, histograms, number variance and goodness of fit");
  auto* xxz = app.add_subcommand("xxz", "XXZ disorder sweep");
  auto* table = app.add_subcommand("table", "Surmise parameter table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    kp::CampaignConfig cfg = kp::preset(preset_name);
    if (*o_config) cfg = kp::load_config(config_path, cfg);
    if (*o_seed) cfg.seed = seed;
    if (*o_workers) cfg.workers = workers;
    if (*o_out) cfg.out_dir = out_dir;
    if (*o_kmin) cfg.k_min = k_min;
    if (*o_kmax) cfg.k_max = k_max;
    if (*o_ens) cfg.ensemble = knn::parse_ensemble(ensemble);
    if (*o_dim) cfg.n_dim = n_dim;
    if (*o_real) (xxz->parsed() ? cfg.xxz.n_realizations : cfg.n_realizations) = realizations;
    if (*o_len) cfg.xxz.length = length;
    if (*o_w) cfg.xxz.w_list = w_list;
    cfg.validate();

    if (sample->parsed()) {
      const auto r = kp::cmd_sample(cfg);
      print_report("sample", r);
      if (r.failed) return 3;
    } else if (analyze->parsed()) {
      print_report("analyze", kp::cmd_analyze(cfg));
    } else if (xxz->parsed()) {
      const auto r = kp::cmd_xxz(cfg);
      print_report("xxz", r);
      if (r.failed) return 3;
    } else if (table->parsed()) {
      print_report("table", kp::cmd_table(cfg));
    }
  } catch (const knn::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 1;
  } catch (const knn::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const knn::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 3;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
