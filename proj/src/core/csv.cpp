#include "csv.hpp"

#include <cstdio>

#include "errors.hpp"

namespace td {

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path &path,
                     const std::vector<std::string> &header_comments,
                     const std::vector<std::string> &columns)
    : path_(path), n_cols_(columns.size()) {
  std::filesystem::create_directories(path.parent_path());
  out_.open(path, std::ios::binary | std::ios::trunc);
  if (!out_)
    throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  for (const auto &line : header_comments)
    out_ << "# " << line << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i)
    out_ << columns[i] << (i + 1 < columns.size() ? "," : "");
  out_ << "\n";
}

void CsvWriter::row(std::span<const double> values) {
  if (values.size() != n_cols_)
    throw Error(ErrorCode::Io, "row width does not match the column count");
  for (std::size_t i = 0; i < values.size(); ++i)
    out_ << format_value(values[i]) << (i + 1 < values.size() ? "," : "");
  out_ << "\n";
}

void CsvWriter::close() {
  out_.close();
  if (!out_)
    throw Error(ErrorCode::Io, "failed writing " + path_.string());
}

} // namespace td
