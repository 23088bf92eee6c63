#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace zkl {

/// Shortest text that reads back to the same double ("nan", "inf" for the rest).
std::string format_double(double v);

/// CSV file with a leading "# ..." comment line and a header row. Numbers are
/// printed with format_double, so equal inputs give byte-identical files.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::string& comment, const std::vector<std::string>& header);

  CsvWriter& row(const std::vector<double>& values);
  /// Mixed row: cells are written verbatim.
  CsvWriter& row_text(const std::vector<std::string>& cells);

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
  std::size_t columns_;
  std::ofstream out_;
};

}  // namespace zkl
