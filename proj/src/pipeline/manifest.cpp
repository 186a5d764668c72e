#include "knn/pipeline/manifest.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>

#include "knn/error.hpp"
#include "knn/pipeline/cache.hpp"

#ifndef KNN_VERSION
#define KNN_VERSION "unknown"
#endif

namespace knn::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

std::string code_version() { return KNN_VERSION; }

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void RunManifest::upsert(RealizationRecord r) {
  auto key = [](const RealizationRecord& x) { return std::tie(x.group, x.index); };
  auto it = std::lower_bound(realizations.begin(), realizations.end(), r,
                             [&](const auto& a, const auto& b) { return key(a) < key(b); });
  if (it != realizations.end() && key(*it) == key(r))
    *it = std::move(r);
  else
    realizations.insert(it, std::move(r));
}

void RunManifest::add_output(const std::string& relative_path) {
  auto it = std::lower_bound(outputs.begin(), outputs.end(), relative_path);
  if (it == outputs.end() || *it != relative_path) outputs.insert(it, relative_path);
}

json RunManifest::to_json() const {
  json reals = json::array();
  for (const auto& r : realizations) {
    json e{{"group", r.group}, {"index", r.index}, {"seed", r.seed}, {"file", r.file}, {"status", r.status}};
    if (!r.error.empty()) e["error"] = r.error;
    if (r.h_values) e["h_values"] = *r.h_values;
    reals.push_back(std::move(e));
  }
  return json{{"config_hash", config_hash}, {"code_version", code_version},
              {"created_at", created_at},   {"updated_at", updated_at},
              {"config", config},           {"realizations", std::move(reals)},
              {"outputs", outputs}};
}

RunManifest RunManifest::from_json(const json& j) {
  RunManifest m;
  try {
    m.config_hash = j.at("config_hash").get<std::string>();
    m.code_version = j.at("code_version").get<std::string>();
    m.created_at = j.value("created_at", "");
    m.updated_at = j.value("updated_at", "");
    m.config = j.value("config", json::object());
    for (const auto& e : j.at("realizations")) {
      RealizationRecord r;
      r.group = e.at("group").get<std::string>();
      r.index = e.at("index").get<std::size_t>();
      r.seed = e.at("seed").get<std::uint64_t>();
      r.file = e.value("file", "");
      r.status = e.value("status", "");
      r.error = e.value("error", "");
      if (e.contains("h_values")) r.h_values = e.at("h_values").get<std::vector<double>>();
      m.upsert(std::move(r));
    }
    for (const auto& o : j.at("outputs")) m.add_output(o.get<std::string>());
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed manifest: ") + e.what());
  }
  return m;
}

RunManifest open_manifest(const fs::path& out_dir, const std::string& hash, const json& config) {
  const fs::path path = out_dir / "manifest.json";
  std::error_code ec;
  if (fs::exists(path, ec)) {
    std::ifstream in(path);
    json j = json::parse(in, nullptr, false);
    if (!j.is_discarded()) {
      try {
        RunManifest m = RunManifest::from_json(j);
        if (m.config_hash == hash && m.code_version == code_version()) {
          m.config = config;
          return m;
        }
      } catch (const IoError&) {
      }
    }
  }
  RunManifest m;
  m.config_hash = hash;
  m.code_version = code_version();
  m.created_at = utc_timestamp();
  m.config = config;
  return m;
}

void save_manifest(const fs::path& out_dir, RunManifest& m) {
  m.updated_at = utc_timestamp();
  write_file_atomic(out_dir / "manifest.json", m.to_json().dump(2) + "\n");
}

}  // namespace knn::pipeline
