#include "knn/pipeline/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <optional>

#include "knn/eigensolver.hpp"
#include "knn/ensembles.hpp"
#include "knn/error.hpp"
#include "knn/gof.hpp"
#include "knn/parallel.hpp"
#include "knn/pipeline/cache.hpp"
#include "knn/pipeline/csv.hpp"
#include "knn/pipeline/manifest.hpp"
#include "knn/seeding.hpp"
#include "knn/spectral_stats.hpp"
#include "knn/surmise.hpp"
#include "knn/xxz_chain.hpp"

namespace knn::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string gformat(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

std::string rel(const fs::path& p, const fs::path& base) { return fs::relative(p, base).generic_string(); }

void prepare(const CampaignConfig& c) {
  c.validate();
  linalg::use_single_threaded_blas();
  set_workers(c.workers);
  std::error_code ec;
  fs::create_directories(c.out_dir, ec);
  if (ec) throw IoError("cannot create " + c.out_dir.string() + ": " + ec.message());
}

json ensemble_identity(const CampaignConfig& c, std::size_t index) {
  json id{{"class", std::string(to_string(c.ensemble))},
          {"N", c.n_dim},
          {"seed", derive_seed(c.seed, index)},
          {"master_seed", c.seed},
          {"realization_index", index},
          {"code_version", code_version()}};
  if (auto b = dyson_index(c.ensemble))
    id["beta"] = *b;
  else
    id["beta"] = nullptr;
  return id;
}

struct Outcome {
  bool generated = false;
  std::string error;
};

unfolding::UnfoldedSpectrum unfold(const CampaignConfig& c, const SpectrumSample& s) {
  if (c.ensemble == EnsembleClass::Poisson) return unfolding::unfold_identity(s);
  switch (c.unfold.method) {
    case unfolding::Method::Semicircle: return unfolding::unfold_semicircle(s, c.unfold.bulk_fraction);
    case unfolding::Method::PolynomialFit:
      return unfolding::unfold_polynomial(s, c.unfold.polynomial());
    case unfolding::Method::Identity: return unfolding::unfold_identity(s);
  }
  throw ValidationError("unknown unfolding method");
}

surmise::Surmise old_family(const CampaignConfig& c, int k, int beta) {
  return surmise::Surmise::old(k, beta, c.constants_mode.value_or(surmise::default_constants_mode(k)));
}

surmise::Surmise corrected_family(const CampaignConfig& c, int k, int beta) {
  return surmise::Surmise::corrected(k, beta, surmise::default_alpha_mode(k, beta),
                                     c.constants_mode.value_or(surmise::default_constants_mode(k)));
}

void write_histogram(const stats::Histogram& h, const std::string& hash, const fs::path& path) {
  CsvTable t(hash, {"bin_center", "density"});
  for (std::size_t i = 0; i < h.n_bins(); ++i) t.add({fmt(h.center(i)), fmt(h.densities[i])});
  t.write(path);
}

}  // namespace

std::string ensemble_group(const CampaignConfig& c) {
  return std::string(to_string(c.ensemble)) + "_N" + std::to_string(c.n_dim);
}

CommandReport cmd_sample(const CampaignConfig& c) {
  prepare(c);
  const std::string hash = config_hash(c);
  RunManifest manifest = open_manifest(c.out_dir, hash, to_json(c));
  const std::string group = ensemble_group(c);
  const SpectrumCache cache(c.out_dir / "spectra" / group);
  const EnsembleSpec spec{c.ensemble, c.n_dim, c.seed};

  std::vector<Outcome> outcomes(c.n_realizations);
  parallel_for(c.n_realizations, [&](std::size_t r) {
    try {
      const json id = ensemble_identity(c, r);
      if (cache.valid(r, id)) return;
      const SpectrumSample s = ensembles::sample(spec, r);
      cache.store(r, s.levels, id);
      if (c.export_csv) {
        auto p = cache.levels_path(r);
        write_levels_csv(p.replace_extension(".csv"), s.levels);
      }
      outcomes[r].generated = true;
    } catch (const std::exception& e) {
      outcomes[r].error = e.what();
    }
  });

  CommandReport report;
  for (std::size_t r = 0; r < c.n_realizations; ++r) {
    RealizationRecord rec;
    rec.group = group;
    rec.index = r;
    rec.seed = derive_seed(c.seed, r);
    rec.file = rel(cache.levels_path(r), c.out_dir);
    if (!outcomes[r].error.empty()) {
      rec.status = "failed";
      rec.error = outcomes[r].error;
      ++report.failed;
      report.errors.push_back(group + " realization " + std::to_string(r) + ": " + outcomes[r].error);
    } else {
      rec.status = outcomes[r].generated ? "generated" : "cached";
      ++(outcomes[r].generated ? report.generated : report.cached);
    }
    manifest.upsert(std::move(rec));
  }
  save_manifest(c.out_dir, manifest);
  return report;
}

std::vector<unfolding::UnfoldedSpectrum> load_unfolded(const CampaignConfig& c) {
  prepare(c);
  const SpectrumCache cache(c.out_dir / "spectra" / ensemble_group(c));
  auto all_valid = [&] {
    for (std::size_t r = 0; r < c.n_realizations; ++r)
      if (!cache.valid(r, ensemble_identity(c, r))) return false;
    return true;
  };
  if (!all_valid()) {
    if (!c.sample_inline) throw IoError("spectrum cache in " + cache.dir().string() + " is incomplete; run sample first");
    const auto rep = cmd_sample(c);
    if (rep.failed) throw IoError(rep.errors.front());
  }

  std::vector<unfolding::UnfoldedSpectrum> out(c.n_realizations);
  parallel_for(c.n_realizations, [&](std::size_t r) {
    SpectrumSample s;
    s.model = std::string(to_string(c.ensemble));
    s.ensemble = EnsembleSpec{c.ensemble, c.n_dim, c.seed};
    s.seed = derive_seed(c.seed, r);
    s.realization_index = r;
    s.levels = cache.load(r);
    out[r] = unfold(c, s);
  });
  return out;
}

CommandReport cmd_analyze(const CampaignConfig& c) {
  const auto spectra = load_unfolded(c);
  const std::string hash = config_hash(c);
  const std::string ens(to_string(c.ensemble));
  const auto beta = dyson_index(c.ensemble);
  CommandReport report;
  report.cached = spectra.size();

  const auto summaries = stats::knn_moments(spectra, c.k_min, c.k_max);
  CsvTable moments(hash, {"ensemble", "k", "mean", "variance", "skew", "kurt", "n"});
  for (std::size_t i = 0; i < summaries.size(); ++i) {
    const auto& m = summaries[i];
    moments.add({ens, fmt(c.k_min + static_cast<int>(i)), fmt(m.mean), fmt(m.variance), fmt(m.skewness),
                 fmt(m.excess_kurtosis), fmt(m.n)});
  }

  stats::NumberVarianceOptions nvo{std::max(c.nv.L_max, static_cast<double>(c.k_max)), c.nv.L_step, c.nv.start_stride};
  const auto nv = stats::number_variance(spectra, nvo);
  CsvTable nv_table(hash, {"ensemble", "L", "sigma2"});
  for (std::size_t i = 0; i < nv.L_grid.size(); ++i) nv_table.add({ens, fmt(nv.L_grid[i]), fmt(nv.sigma2[i])});

  CsvTable gof_table(hash, {"ensemble", "k", "family", "sigma", "n_bins_used", "bin_width", "window_sigmas"});
  std::vector<std::pair<int, stats::Histogram>> kept;
  for (int k = c.k_min; k <= c.k_max; ++k) {
    const double ref_var = beta ? surmise::rmt_variance(k, *beta) : static_cast<double>(k);
    const auto set = stats::knn_spacings(spectra, k);
    const auto hist = stats::build_histogram(set, c.bin_width, stats::default_histogram_range(k, ref_var));
    std::vector<surmise::Surmise> refs;
    if (beta) {
      refs.push_back(old_family(c, k, *beta));
      refs.push_back(corrected_family(c, k, *beta));
      refs.push_back(surmise::Surmise::gaussian(k, *beta));
    } else {
      refs.push_back(surmise::Surmise::poisson_knn(k));
    }
    for (const auto& ref : refs) {
      const auto g = gof::sigma_gof(hist, ref, c.window_sigmas);
      gof_table.add({ens, fmt(k), std::string(surmise::to_string(ref.family())), fmt(g.sigma), fmt(g.n_bins_used),
                     fmt(g.bin_width), fmt(g.window_sigmas)});
    }
    if (std::find(c.histogram_ks.begin(), c.histogram_ks.end(), k) != c.histogram_ks.end())
      kept.emplace_back(k, hist);
  }

  auto emit = [&](const CsvTable& t, const std::string& name) {
    t.write(c.out_dir / name);
    report.outputs.push_back(c.out_dir / name);
  };
  emit(moments, "moments.csv");
  emit(nv_table, "nv.csv");
  emit(gof_table, "gof.csv");
  for (const auto& [k, h] : kept) {
    const std::string name = "hist_k" + std::to_string(k) + ".csv";
    write_histogram(h, hash, c.out_dir / name);
    report.outputs.push_back(c.out_dir / name);
  }

  RunManifest manifest = open_manifest(c.out_dir, hash, to_json(c));
  for (const auto& p : report.outputs) manifest.add_output(rel(p, c.out_dir));
  save_manifest(c.out_dir, manifest);
  return report;
}

CommandReport cmd_xxz(const CampaignConfig& c) {
  prepare(c);
  const std::string hash = config_hash(c);
  RunManifest manifest = open_manifest(c.out_dir, hash, to_json(c));
  const xxz::SectorBasis basis = xxz::build_basis(c.xxz.length);

  xxz::SweepOptions opts;
  opts.k_max = c.k_max;
  opts.unfold = c.unfold.polynomial();
  opts.bin_width = c.bin_width;
  opts.window_sigmas = c.window_sigmas;
  opts.nv = {c.nv.L_max, c.nv.L_step, c.nv.start_stride};
  opts.histogram_ks = c.histogram_ks;

  CommandReport report;
  CsvTable sweep(hash, {"L", "Jz", "W", "k", "mean", "variance", "sigma_vs_goe", "sigma_vs_poisson", "n_realizations"});
  CsvTable nv_table(hash, {"W", "L", "sigma2"});
  std::vector<std::pair<std::string, stats::Histogram>> hists;

  for (double w : c.xxz.w_list) {
    xxz::ChainSpec spec;
    spec.length = c.xxz.length;
    spec.jz = c.xxz.jz;
    spec.disorder = w;
    spec.seed = c.seed;
    spec.max_length = c.xxz.max_length;
    spec.validate();
    const std::string group = "xxz_L" + std::to_string(spec.length) + "_Jz" + gformat(spec.jz) + "_W" + gformat(w);
    const SpectrumCache cache(c.out_dir / "spectra" / group);
    const std::size_t n = c.xxz.n_realizations;

    std::vector<Outcome> outcomes(n);
    std::vector<std::vector<double>> fields(n);
    std::vector<unfolding::UnfoldedSpectrum> unfolded(n);
    parallel_for(n, [&](std::size_t r) {
      fields[r] = xxz::disorder_fields(spec, r);
      const json id{{"model", "xxz"},
                    {"L", spec.length},
                    {"Jz", spec.jz},
                    {"W", w},
                    {"seed", derive_seed(spec.seed, r)},
                    {"master_seed", spec.seed},
                    {"realization_index", r},
                    {"h_values", fields[r]},
                    {"code_version", code_version()}};
      SpectrumSample s;
      s.model = "xxz";
      s.seed = derive_seed(spec.seed, r);
      s.realization_index = r;
      if (cache.valid(r, id)) {
        s.levels = cache.load(r);
      } else {
        s = xxz::spectrum(spec, basis, r);
        try {
          cache.store(r, s.levels, id);
          if (c.export_csv) {
            auto p = cache.levels_path(r);
            write_levels_csv(p.replace_extension(".csv"), s.levels);
          }
        } catch (const IoError& e) {
          outcomes[r].error = e.what();
        }
        outcomes[r].generated = true;
      }
      unfolded[r] = unfolding::unfold_polynomial(s, opts.unfold);
    });

    for (std::size_t r = 0; r < n; ++r) {
      RealizationRecord rec;
      rec.group = group;
      rec.index = r;
      rec.seed = derive_seed(spec.seed, r);
      rec.file = rel(cache.levels_path(r), c.out_dir);
      rec.h_values = fields[r];
      if (!outcomes[r].error.empty()) {
        rec.status = "failed";
        rec.error = outcomes[r].error;
        ++report.failed;
        report.errors.push_back(group + " realization " + std::to_string(r) + ": " + outcomes[r].error);
      } else {
        rec.status = outcomes[r].generated ? "generated" : "cached";
      }
      ++(outcomes[r].generated ? report.generated : report.cached);
      manifest.upsert(std::move(rec));
    }
    save_manifest(c.out_dir, manifest);

    const auto pt = xxz::analyze_point(w, unfolded, opts);
    for (const auto& row : pt.rows) {
      if (row.k < c.k_min) continue;
      sweep.add({fmt(spec.length), fmt(spec.jz), fmt(w), fmt(row.k), fmt(row.moments.mean), fmt(row.moments.variance),
                 fmt(row.sigma_vs_goe), fmt(row.sigma_vs_poisson), fmt(pt.n_realizations)});
    }
    for (std::size_t i = 0; i < pt.nv.L_grid.size(); ++i) nv_table.add({fmt(w), fmt(pt.nv.L_grid[i]), fmt(pt.nv.sigma2[i])});
    for (const auto& [k, h] : pt.histograms)
      hists.emplace_back("xxz_hist_W" + gformat(w) + "_k" + std::to_string(k) + ".csv", h);
  }

  sweep.write(c.out_dir / "xxz_sweep.csv");
  nv_table.write(c.out_dir / "xxz_nv.csv");
  report.outputs.push_back(c.out_dir / "xxz_sweep.csv");
  report.outputs.push_back(c.out_dir / "xxz_nv.csv");
  for (const auto& [name, h] : hists) {
    write_histogram(h, hash, c.out_dir / name);
    report.outputs.push_back(c.out_dir / name);
  }
  for (const auto& p : report.outputs) manifest.add_output(rel(p, c.out_dir));
  save_manifest(c.out_dir, manifest);
  return report;
}

CommandReport cmd_table(const CampaignConfig& c) {
  prepare(c);
  const std::string hash = config_hash(c);
  CsvTable table(hash, {"family", "beta", "k", "alpha", "A", "C", "variance", "skewness"});
  const double nan = std::nan("");

  auto audit = [](const surmise::Surmise& s) {
    const auto q = surmise::quadrature_moments(s);
    // The large-alpha constants carry a relative error close to 1/(4 alpha).
    const double tol = s.constants_mode() == surmise::ConstantsMode::Exact ? 1e-8 : 1.0 / s.alpha();
    if (!(std::abs(q.norm - 1.0) <= tol))
      throw NumericalError("normalization audit failed for " + std::string(surmise::to_string(s.family())) +
                           " k=" + std::to_string(s.k()) + ": integral " + fmt(q.norm));
  };
  auto power_row = [&](const surmise::Surmise& s) {
    audit(s);
    table.add({std::string(surmise::to_string(s.family())), fmt(s.beta()), fmt(s.k()), fmt(s.alpha()), fmt(s.A()),
               fmt(s.C()), fmt(s.variance()), fmt(s.skewness())});
  };

  for (int beta : {1, 2, 4}) {
    power_row(surmise::Surmise::wigner_nn(beta));
    for (int k = c.k_min; k <= c.k_max; ++k) {
      power_row(old_family(c, k, beta));
      power_row(corrected_family(c, k, beta));
      const auto g = surmise::Surmise::gaussian(k, beta);
      audit(g);
      const double var = g.variance();
      table.add({"gaussian", fmt(beta), fmt(k), fmt(nan), fmt(1.0 / (2.0 * var)),
                 fmt(1.0 / std::sqrt(2.0 * std::numbers::pi * var)), fmt(var), fmt(0.0)});
    }
  }
  power_row(surmise::Surmise::corrected_nn_gue());
  for (int k = c.k_min; k <= c.k_max; ++k) {
    const auto p = surmise::Surmise::poisson_knn(k);
    audit(p);
    table.add({"poisson", fmt(0), fmt(k), fmt(p.alpha()), fmt(1.0), fmt(std::exp(-std::lgamma(static_cast<double>(k)))),
               fmt(p.variance()), fmt(p.skewness())});
  }

  CommandReport report;
  table.write(c.out_dir / "surmise_table.csv");
  report.outputs.push_back(c.out_dir / "surmise_table.csv");
  RunManifest manifest = open_manifest(c.out_dir, hash, to_json(c));
  manifest.add_output("surmise_table.csv");
  save_manifest(c.out_dir, manifest);
  return report;
}

}  // namespace knn::pipeline
