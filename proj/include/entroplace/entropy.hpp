#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "entroplace/grid.hpp"
#include "entroplace/patches.hpp"

namespace entroplace {

// Per-cell temporal mean and unbiased standard deviation.
struct PixelStats {
    Field mu;
    Field sigma;
};

// One location bin of the autoregressive Gaussian patch model: sample mean
// and the lower Cholesky factor of (Sigma + delta*I), both in the ordering's
// coordinate permutation.  sample_rows are the PatchSet rows the fit used
// (after any bootstrap resampling), kept for held-in entropy evaluation.
struct PatchBin {
    std::pair<int, int> center;
    int count = 0;
    Eigen::VectorXd mean;
    Eigen::MatrixXd chol;
    double shrinkage = 0.0;
    std::vector<int> sample_rows;
};

struct PatchModel {
    Ordering ordering;
    std::vector<PatchBin> bins;
    std::vector<std::string> warnings;

    int dim() const { return ordering.size * ordering.size; }
};

// Scalar entropy map in nats per computational grid cell.  Land cells are
// NaN; flagged sea cells (degenerate or uncovered) carry -inf.
struct EntropyField {
    Field H;
    int scale = 0;
    int ensemble_size = 0;
};

struct EntropyConfig {
    int patch_size = 8;        // L
    int scale = 8;             // L' <= L, entropy evaluated on the prefix
    int bin_stride = 4;        // lattice stride; pooling radius for bins
    int min_samples = 32;
    double shrinkage_rel = 1e-3; // delta = rel * mean diag(Sigma), floor rel
    int ensemble = 8;          // B bootstrap refits
    int mc_samples = 10000;
    bool bootstrap = true;
    int smooth_window = 5;     // boxcar applied to the splatted field; 1 = off
    OrderingKind ordering = OrderingKind::spiral;
    std::uint64_t seed = 1;

    void validate() const;
};

PixelStats fit_pixel_gaussian(const FieldSeries& train);

// H = ln(sigma) + 1/2 + 1/2 ln(2 pi) per sea cell; sigma = 0 flags the cell.
EntropyField pixel_entropy(const PixelStats& stats);

// Location-binned Gaussian MLE with shrinkage.  Bins pool patches whose
// centers lie within bin_stride (Chebyshev distance) of a distinct center.
// resample_seed != 0 bootstraps each bin's sample before fitting.
PatchModel fit_patch_model(const PatchSet& patches, const EntropyConfig& config,
                           std::uint64_t resample_seed = 0);

// Negative log density of a full patch under a bin's Gaussian, in nats.
// Computed jointly via the Cholesky factor and as the sum of per-pixel
// conditional NLLs in the ordering; the two routes are asserted equal.
double patch_nll(const PatchModel& model, int bin, std::span<const double> patch);

// NLL of the leading scale^2 prefix of a patch (multi-scale truncation).
double patch_nll_prefix(const PatchModel& model, int bin, std::span<const double> patch,
                        int scale);

// Closed-form Gaussian entropy of the leading scale^2 block, nats per cell.
double entropy_closed_form(const PatchModel& model, int bin, int scale);

struct McResult {
    double per_cell = 0.0;  // Monte-Carlo entropy estimate, nats per cell
    double std_error = 0.0; // standard error of the per-cell estimate
};

// Average NLL over n_samples draws from the bin's prefix Gaussian.
McResult entropy_monte_carlo(const PatchModel& model, int bin, int scale, int n_samples,
                             std::uint64_t seed);

// End-to-end entropy field: bootstrap-ensemble held-in average patch NLL per
// bin at the configured scale, splatted to bin centers, bilinearly spread,
// then boxcar smoothed.
EntropyField entropy_field(const FieldSeries& train, const EntropyConfig& config);

} // namespace entroplace
