#include "knn/pipeline/csv.hpp"

#include <charconv>
#include <cmath>

#include "knn/error.hpp"
#include "knn/pipeline/cache.hpp"

namespace knn::pipeline {

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string fmt(std::optional<double> x) { return x ? fmt(*x) : std::string("nan"); }

std::string fmt(long long x) { return std::to_string(x); }

CsvTable::CsvTable(std::string config_hash, std::vector<std::string> header)
    : hash_(std::move(config_hash)), header_(std::move(header)) {}

void CsvTable::add(std::vector<std::string> row) {
  if (row.size() != header_.size()) throw ValidationError("csv row width does not match header");
  rows_.push_back(std::move(row));
}

std::string CsvTable::str() const {
  std::string out = "# config_hash=" + hash_ + " manifest=manifest.json\n";
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

void CsvTable::write(const std::filesystem::path& path) const { write_file_atomic(path, str()); }

}  // namespace knn::pipeline
