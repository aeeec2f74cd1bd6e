#pragma once

#include <Eigen/Dense>

#include "entroplace/entropy.hpp"
#include "entroplace/grid.hpp"
#include "entroplace/metrics.hpp"
#include "entroplace/patches.hpp"

namespace entroplace::reference {

// Plain serial twins of the OpenMP kernels.  They favor the obvious
// formulation over speed and are the comparison targets for the parallel
// consistency tests and the bench tool.

Field boxcar_smooth(const Field& field, int window);

PatchSet extract_patches(const FieldSeries& series, int patch_size, int stride,
                         const Ordering& ordering);

PixelStats fit_pixel_gaussian(const FieldSeries& train);

// Naive two-pass MLE moments of a sample matrix (rows = samples).
void gaussian_moments(const Eigen::MatrixXd& samples, Eigen::VectorXd& mean,
                      Eigen::MatrixXd& cov);

McResult entropy_monte_carlo(const PatchModel& model, int bin, int scale, int n_samples,
                             std::uint64_t seed);

Field bias_field(const FieldSeries& recon, const FieldSeries& ref);
Field rmse_field(const FieldSeries& recon, const FieldSeries& ref);

} // namespace entroplace::reference
