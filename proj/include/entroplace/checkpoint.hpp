#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>

namespace entroplace {

// CKP1 container: magic "CKP1", u32le section count; per section an 8-byte
// NUL-padded ASCII name, u32le rows, u32le cols, then rows*cols float64le in
// row-major order.  Selector checkpoints use sections MASK, DEC_W, DEC_B
// (mlp1: DEC_W1, DEC_B1, DEC_W2, DEC_B2) plus MU and SD standardization
// grids; POD checkpoints use MU, W, SV, SENSORS.
using Checkpoint = std::map<std::string, Eigen::MatrixXd>;

void write_checkpoint(const std::string& path, const Checkpoint& sections);
Checkpoint read_checkpoint(const std::string& path);

} // namespace entroplace
