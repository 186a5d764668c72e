#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace knn::pipeline {

std::string fmt(double x);  // shortest round-trip form
std::string fmt(std::optional<double> x);
std::string fmt(long long x);
inline std::string fmt(int x) { return fmt(static_cast<long long>(x)); }
inline std::string fmt(std::size_t x) { return fmt(static_cast<long long>(x)); }

/// First line "# config_hash=<hash> manifest=manifest.json", then the header.
class CsvTable {
 public:
  CsvTable(std::string config_hash, std::vector<std::string> header);
  void add(std::vector<std::string> row);
  std::size_t size() const { return rows_.size(); }
  std::string str() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::string hash_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace knn::pipeline
