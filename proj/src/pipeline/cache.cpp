#include "knn/pipeline/cache.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "knn/error.hpp"
#include "knn/pipeline/csv.hpp"

namespace knn::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

static_assert(std::endian::native == std::endian::little, "cache format assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'K', 'N', 'N', 'S'};
constexpr std::uint32_t kFormatVersion = 1;

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

void write_file_atomic(const fs::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError("short write to " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename into " + path.string() + ": " + ec.message());
}

void write_levels(const fs::path& path, std::span<const double> levels) {
  std::string buf(16 + levels.size() * sizeof(double), '\0');
  const std::uint64_t n = levels.size();
  std::memcpy(buf.data(), kMagic, 4);
  std::memcpy(buf.data() + 4, &kFormatVersion, 4);
  std::memcpy(buf.data() + 8, &n, 8);
  if (n) std::memcpy(buf.data() + 16, levels.data(), levels.size() * sizeof(double));
  write_file_atomic(path, buf);
}

std::vector<double> read_levels(const fs::path& path) {
  const std::string buf = slurp(path);
  if (buf.size() < 16 || std::memcmp(buf.data(), kMagic, 4) != 0)
    throw IoError(path.string() + " is not a spectrum file");
  std::uint32_t version = 0;
  std::uint64_t n = 0;
  std::memcpy(&version, buf.data() + 4, 4);
  std::memcpy(&n, buf.data() + 8, 8);
  if (version != kFormatVersion) throw IoError(path.string() + ": unsupported format version");
  if (buf.size() != 16 + n * sizeof(double)) throw IoError(path.string() + ": truncated");
  std::vector<double> levels(n);
  if (n) std::memcpy(levels.data(), buf.data() + 16, n * sizeof(double));
  return levels;
}

void write_levels_csv(const fs::path& path, std::span<const double> levels) {
  std::string text = "level\n";
  for (double x : levels) text += fmt(x) + '\n';
  write_file_atomic(path, text);
}

SpectrumCache::SpectrumCache(fs::path dir) : dir_(std::move(dir)) {}

fs::path SpectrumCache::levels_path(std::size_t index) const {
  char name[32];
  std::snprintf(name, sizeof name, "r%06zu.bin", index);
  return dir_ / name;
}

fs::path SpectrumCache::sidecar_path(std::size_t index) const {
  char name[32];
  std::snprintf(name, sizeof name, "r%06zu.json", index);
  return dir_ / name;
}

bool SpectrumCache::valid(std::size_t index, const json& identity) const {
  const auto side = sidecar_path(index);
  const auto bin = levels_path(index);
  std::error_code ec;
  if (!fs::exists(side, ec) || !fs::exists(bin, ec)) return false;
  try {
    const json meta = json::parse(slurp(side));
    for (const auto& [key, value] : identity.items())
      if (!meta.contains(key) || meta.at(key) != value) return false;
    const auto n = meta.at("n_levels").get<std::uint64_t>();
    return fs::file_size(bin) == 16 + n * sizeof(double);
  } catch (const std::exception&) {
    return false;
  }
}

void SpectrumCache::store(std::size_t index, std::span<const double> levels, json sidecar) const {
  sidecar["n_levels"] = levels.size();
  write_levels(levels_path(index), levels);
  write_file_atomic(sidecar_path(index), sidecar.dump(2) + "\n");
}

std::vector<double> SpectrumCache::load(std::size_t index) const { return read_levels(levels_path(index)); }

json SpectrumCache::sidecar(std::size_t index) const {
  try {
    return json::parse(slurp(sidecar_path(index)));
  } catch (const json::exception& e) {
    throw IoError(sidecar_path(index).string() + ": " + e.what());
  }
}

}  // namespace knn::pipeline
