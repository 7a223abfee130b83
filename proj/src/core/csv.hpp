#pragma once
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

namespace td {

// full round-trip precision, locale-independent
std::string format_value(double v);

// CSV writer with a '#'-prefixed header block; identical inputs produce
// byte-identical files (regression and determinism contract).
class CsvWriter {
public:
  CsvWriter(const std::filesystem::path &path,
            const std::vector<std::string> &header_comments,
            const std::vector<std::string> &columns);
  void row(std::span<const double> values);
  void close();
  const std::filesystem::path &path() const { return path_; }

private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t n_cols_;
};

} // namespace td
