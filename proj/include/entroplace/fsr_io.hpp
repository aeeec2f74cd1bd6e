#pragma once

#include <string>

#include "entroplace/grid.hpp"

namespace entroplace {

// FSR1 container: magic "FSR1", u32le rows, cols, T; rows*cols land bytes
// (0/1); T*rows*cols float32le values, row-major within a snapshot, snapshots
// in time order; T pairs of u16le (year, day_of_year).  Land cells are
// written as float32 quiet NaN and restored to the land sentinel on read.
void write_fsr(const std::string& path, const FieldSeries& series);
FieldSeries read_fsr(const std::string& path);

} // namespace entroplace
