#include "knn/pipeline/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "knn/error.hpp"

namespace knn::pipeline {

using nlohmann::json;

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError("config: " + what);
}

bool finite_positive(double x) { return std::isfinite(x) && x > 0.0; }

template <class T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

json scientific_fields(const CampaignConfig& c) {
  json j;
  j["ensemble"] = std::string(to_string(c.ensemble));
  j["n_dim"] = c.n_dim;
  j["n_realizations"] = c.n_realizations;
  j["k_min"] = c.k_min;
  j["k_max"] = c.k_max;
  j["histogram_ks"] = c.histogram_ks;
  j["unfold"] = {{"method", std::string(unfolding::to_string(c.unfold.method))},
                 {"bulk_fraction", c.unfold.bulk_fraction},
                 {"density_threshold", c.unfold.density_threshold},
                 {"degree", c.unfold.degree},
                 {"n_bins", c.unfold.n_bins},
                 {"min_levels_per_bin", c.unfold.min_levels_per_bin}};
  j["bin_width"] = c.bin_width;
  j["window_sigmas"] = c.window_sigmas;
  j["constants_mode"] = c.constants_mode ? std::string(surmise::to_string(*c.constants_mode)) : "auto";
  j["number_variance"] = {{"L_max", c.nv.L_max}, {"L_step", c.nv.L_step}, {"start_stride", c.nv.start_stride}};
  j["xxz"] = {{"length", c.xxz.length},
              {"jz", c.xxz.jz},
              {"w_list", c.xxz.w_list},
              {"n_realizations", c.xxz.n_realizations},
              {"max_length", c.xxz.max_length}};
  j["seed"] = c.seed;
  j["sample_inline"] = c.sample_inline;
  j["export_csv"] = c.export_csv;
  return j;
}

}  // namespace

void CampaignConfig::validate() const {
  require(n_dim >= 2, "n_dim must be >= 2");
  require(n_realizations >= 1, "n_realizations must be >= 1");
  require(k_min >= 1 && k_max >= k_min, "need 1 <= k_min <= k_max");
  for (int k : histogram_ks) require(k >= 1, "histogram k must be >= 1");
  require(unfold.bulk_fraction > 0.0 && unfold.bulk_fraction <= 1.0, "bulk_fraction must lie in (0, 1]");
  require(unfold.density_threshold > 0.0 && unfold.density_threshold < 1.0, "density_threshold must lie in (0, 1)");
  require(unfold.degree >= 1 && unfold.degree <= 9, "unfolding degree must lie in [1, 9]");
  require(unfold.n_bins >= 4, "unfolding n_bins must be >= 4");
  require(finite_positive(bin_width), "bin_width must be > 0");
  require(finite_positive(window_sigmas), "window_sigmas must be > 0");
  require(finite_positive(nv.L_max) && finite_positive(nv.L_step) && finite_positive(nv.start_stride),
          "number variance parameters must be > 0");
  require(xxz.length >= 2 && xxz.length % 2 == 0, "xxz length must be even and >= 2");
  require(xxz.length <= xxz.max_length, "xxz length exceeds max_length");
  require(std::isfinite(xxz.jz), "jz must be finite");
  require(!xxz.w_list.empty(), "w_list is empty");
  for (double w : xxz.w_list) require(std::isfinite(w) && w >= 0.0, "disorder widths must be >= 0");
  require(xxz.n_realizations >= 1, "xxz n_realizations must be >= 1");
  require(workers >= 0, "workers must be >= 0");
}

CampaignConfig preset(const std::string& name) {
  CampaignConfig c;
  if (name == "desk") return c;
  if (name == "paper") {
    c.n_realizations = 1000;
    c.xxz.length = 16;
    c.xxz.n_realizations = 100;
    return c;
  }
  throw ValidationError("unknown preset '" + name + "' (expected desk or paper)");
}

json to_json(const CampaignConfig& c) {
  json j = scientific_fields(c);
  j["workers"] = c.workers;
  j["out_dir"] = c.out_dir.string();
  return j;
}

CampaignConfig from_json(const json& j, CampaignConfig c) {
  if (!j.is_object()) throw ValidationError("config: top level must be an object");
  try {
    if (j.contains("ensemble")) c.ensemble = parse_ensemble(j.at("ensemble").get<std::string>());
    read(j, "n_dim", c.n_dim);
    read(j, "n_realizations", c.n_realizations);
    read(j, "k_min", c.k_min);
    read(j, "k_max", c.k_max);
    read(j, "histogram_ks", c.histogram_ks);
    if (j.contains("unfold")) {
      const auto& u = j.at("unfold");
      if (u.contains("method")) c.unfold.method = unfolding::parse_method(u.at("method").get<std::string>());
      read(u, "bulk_fraction", c.unfold.bulk_fraction);
      read(u, "density_threshold", c.unfold.density_threshold);
      read(u, "degree", c.unfold.degree);
      read(u, "n_bins", c.unfold.n_bins);
      read(u, "min_levels_per_bin", c.unfold.min_levels_per_bin);
    }
    read(j, "bin_width", c.bin_width);
    read(j, "window_sigmas", c.window_sigmas);
    if (j.contains("constants_mode")) {
      const auto m = j.at("constants_mode").get<std::string>();
      if (m == "auto")
        c.constants_mode.reset();
      else
        c.constants_mode = surmise::parse_constants_mode(m);
    }
    if (j.contains("number_variance")) {
      const auto& n = j.at("number_variance");
      read(n, "L_max", c.nv.L_max);
      read(n, "L_step", c.nv.L_step);
      read(n, "start_stride", c.nv.start_stride);
    }
    if (j.contains("xxz")) {
      const auto& x = j.at("xxz");
      read(x, "length", c.xxz.length);
      read(x, "jz", c.xxz.jz);
      read(x, "w_list", c.xxz.w_list);
      read(x, "n_realizations", c.xxz.n_realizations);
      read(x, "max_length", c.xxz.max_length);
    }
    read(j, "seed", c.seed);
    read(j, "sample_inline", c.sample_inline);
    read(j, "export_csv", c.export_csv);
    read(j, "workers", c.workers);
    if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  return c;
}

CampaignConfig load_config(const std::filesystem::path& path, CampaignConfig base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("config " + path.string() + ": " + e.what());
  }
  return from_json(j, std::move(base));
}

std::string config_hash(const CampaignConfig& c) {
  const std::string text = scientific_fields(c).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace knn::pipeline
