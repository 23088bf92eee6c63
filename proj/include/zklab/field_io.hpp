#pragma once

#include <string>

#include "zklab/field.hpp"

namespace zkl {

/// Binary dump: one text header line `ZKF1 dim N1 [N2 [N3]] L1 [L2 [L3]]`
/// followed by the samples as row-major little-endian doubles.
void write_field(const std::string& path, const ScalarField& f);

/// Reads a dump and builds its grid. Throws IoError on a malformed header or
/// a sample count that disagrees with the header.
ScalarField read_field(const std::string& path);

/// As above, but the dump must match `grid`.
ScalarField read_field(const std::string& path, const GridPtr& grid);

}  // namespace zkl
