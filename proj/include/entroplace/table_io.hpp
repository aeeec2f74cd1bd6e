#pragma once

#include <string>
#include <utility>
#include <vector>

#include "entroplace/grid.hpp"

namespace entroplace {

// Single-field CSV: one line per grid row, comma separated, full precision.
// Land cells are written as "NaN"; flagged sea cells keep their -inf sentinel
// and appear as "-inf".
void write_field_csv(const std::string& path, const Field& field);

// Reads a field CSV back; "NaN" cells become land.
Field read_field_csv(const std::string& path);

// 8-bit binary PGM heatmap with linear min-max scaling over finite sea cells.
// The scaling is recorded in a sidecar "<path>.txt"; land and flagged cells
// render as 0.
void write_field_pgm(const std::string& path, const Field& field);

void write_sensor_csv(const std::string& path,
                      const std::vector<std::pair<int, int>>& locations);
std::vector<std::pair<int, int>> read_sensor_csv(const std::string& path);

// Fixed-precision formatting used everywhere a file must be byte-stable.
std::string format_double(double v);

} // namespace entroplace
