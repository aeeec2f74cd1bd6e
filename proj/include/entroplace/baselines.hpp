#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "entroplace/grid.hpp"

namespace entroplace {

// Day-of-year mean over training years, the zero-sensor baseline.
struct Climatology {
    std::vector<Field> day_mean;       // 365 entries, day d at index d-1
    std::vector<std::vector<int>> day_counts; // contributing years per (day, cell)
};

Climatology fit_climatology(const FieldSeries& train);

const Field& climatology_at(const Climatology& clim, int day);

// Truncated POD basis of the centered snapshot matrix plus pivot-selected
// sensor cells.
struct PODBasis {
    Field mu;                       // temporal mean of the train split
    Eigen::MatrixXd modes;          // n_sea x r, orthonormal columns
    Eigen::VectorXd singular_values; // non-increasing
    std::vector<int> sensors;       // flat cell indices, pivot order
    std::vector<std::string> warnings;
};

// Thin SVD of the mean-centered n_sea x T matrix; keeps the top r modes.
PODBasis fit_pod(const FieldSeries& train, int r);

// Column-pivoted QR of modes^T; returns the first r pivot columns as flat
// cell indices, in pivot order.  Near-zero diagonals truncate the list with a
// warning recorded on the basis.
std::vector<int> qr_pivot_sensors(PODBasis& basis);

// Measurements taken at basis.sensors, physical units, in sensor order.
Eigen::VectorXd measure_at_sensors(const PODBasis& basis, const Field& snapshot);

// x_hat = mu + W (P_s W)^{-1} (m - P_s mu).
Field pod_reconstruct(const PODBasis& basis, const Eigen::VectorXd& measurements);

} // namespace entroplace
