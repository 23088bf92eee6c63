#include "zklab/field_io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace zkl {
namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

std::uint64_t to_little(std::uint64_t u) {
  if constexpr (std::endian::native == std::endian::big) return __builtin_bswap64(u);
  return u;
}

std::string format_length(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_field(const std::string& path, const ScalarField& f) {
  const Grid& g = f.grid();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + path + " for writing");
  std::string header = "ZKF1 " + std::to_string(g.dim());
  for (int j = 0; j < g.dim(); ++j) header += " " + std::to_string(g.points()[j]);
  for (int j = 0; j < g.dim(); ++j) header += " " + format_length(g.lengths()[j]);
  header += "\n";
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  for (double v : f.values()) {
    std::uint64_t bits = to_little(std::bit_cast<std::uint64_t>(v));
    char bytes[8];
    std::memcpy(bytes, &bits, 8);
    out.write(bytes, 8);
  }
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path);
}

ScalarField read_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::IoError, path + ": missing header");
  std::istringstream hs(line);
  std::string magic;
  int dim = 0;
  hs >> magic >> dim;
  if (magic != "ZKF1" || dim < 1 || dim > 3) throw Error(ErrorKind::IoError, path + ": bad header");
  std::vector<int> points(dim);
  std::vector<double> lengths(dim);
  for (auto& n : points) hs >> n;
  for (auto& l : lengths) hs >> l;
  if (!hs) throw Error(ErrorKind::IoError, path + ": truncated header");
  std::string extra;
  if (hs >> extra) throw Error(ErrorKind::IoError, path + ": trailing header tokens");

  GridPtr grid;
  try {
    grid = Grid::make(dim, points, lengths);
  } catch (const Error& e) {
    throw Error(ErrorKind::IoError, path + ": " + e.what());
  }
  std::vector<double> values(grid->size());
  for (auto& v : values) {
    char bytes[8];
    if (!in.read(bytes, 8)) throw Error(ErrorKind::IoError, path + ": fewer samples than the header declares");
    std::uint64_t bits;
    std::memcpy(&bits, bytes, 8);
    v = std::bit_cast<double>(to_little(bits));
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw Error(ErrorKind::IoError, path + ": more samples than the header declares");
  }
  return ScalarField(grid, std::move(values));
}

ScalarField read_field(const std::string& path, const GridPtr& grid) {
  ScalarField f = read_field(path);
  if (!f.grid().same_shape(*grid)) throw Error(ErrorKind::IoError, path + ": grid does not match");
  return ScalarField(grid, std::move(f.data()));
}

}  // namespace zkl
