#include "zklab/csv.hpp"

#include <charconv>
#include <cmath>

#include "zklab/error.hpp"

namespace zkl {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::string& path, const std::string& comment, const std::vector<std::string>& header)
    : path_(path), columns_(header.size()), out_(path, std::ios::binary) {
  if (!out_) throw Error(ErrorKind::IoError, "cannot write " + path);
  out_ << "# " << comment << '\n';
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << '\n';
}

CsvWriter& CsvWriter::row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_double(v));
  return row_text(cells);
}

CsvWriter& CsvWriter::row_text(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) {
    throw Error(ErrorKind::InvalidArgument, path_ + ": row has " + std::to_string(cells.size()) + " cells, header has " +
                                                std::to_string(columns_));
  }
  for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
  out_ << '\n';
  if (!out_) throw Error(ErrorKind::IoError, "write failed: " + path_);
  return *this;
}

}  // namespace zkl
