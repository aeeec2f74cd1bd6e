#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "entroplace/entropy.hpp"
#include "entroplace/grid.hpp"

namespace entroplace {

// Trainable mask logits.  Land cells hold -inf and never fire; sea cells are
// finite.  The binary mask is step(w) with step(0) = 1.
struct MaskParams {
    Field w;
};

enum class DecoderKind { linear, mlp1 };

// Reconstruction operator on standardized sea-cell vectors: affine by
// default, optional one-hidden-layer tanh variant.
struct Decoder {
    DecoderKind kind = DecoderKind::linear;
    Eigen::MatrixXd W;  // linear: n_sea x n_sea
    Eigen::VectorXd b;  // n_sea
    Eigen::MatrixXd W1; // mlp1: hidden x n_sea
    Eigen::VectorXd b1;
    Eigen::MatrixXd W2; // n_sea x hidden
    Eigen::VectorXd b2;
    int hidden_width = 0;
};

enum class SelectorKind { straight_through, concrete };

struct TrainConfig {
    double lambda_max = 0.05;   // sparsity weight after the ramp
    int lambda_ramp_epochs = 10; // linear 0 -> lambda_max
    int epochs = 150;
    int batch_size = 8;
    double step_size = 1e-3;
    double step_decay = 0.99;   // per epoch
    std::uint64_t seed = 1;
    SelectorKind selector = SelectorKind::straight_through;
    int concrete_k = 0;         // sensor slots (concrete only)
    double concrete_t_start = 5.0;
    double concrete_t_end = 0.2;
    DecoderKind decoder = DecoderKind::linear;
    int hidden_width = 64;      // mlp1 only
    bool freeze_mask = false;   // train the decoder under a fixed mask

    void validate() const;
};

struct EpochLog {
    double total = 0.0;
    double mse_term = 0.0;
    double sparsity_term = 0.0;
    int sensors = 0;
};

struct TrainReport {
    std::vector<EpochLog> curve;
    MaskParams mask;            // final logits (straight-through)
    Field binary_mask;          // final evaluation mask (both selectors)
    Decoder decoder;
    PixelStats stats;           // train standardization, needed to reconstruct
    double wall_seconds = 0.0;
};

// mask = 1 where w >= 0, 0 elsewhere and on land.
Field step_mask(const MaskParams& params);

// Identity pass-through of the mask gradient onto w; land cells zeroed.
Field straight_through_grad(const MaskParams& params, const Field& upstream);

// Relaxed k-head selection: per head softmax((logits + gumbel)/T) summed into
// a weight field.  Rows of `logits` are heads over sea cells (row-major sea
// enumeration); `noise` has the same shape.
Eigen::VectorXd concrete_select(const Eigen::MatrixXd& logits, double temperature,
                                const Eigen::MatrixXd& noise);

// Deterministic evaluation mask: per-head argmax with duplicate slots pushed
// to the next-highest cell, yielding k distinct sensors.
std::vector<int> concrete_eval_cells(const Eigen::MatrixXd& logits);

struct LossParts {
    double total = 0.0;
    double mse = 0.0;
    double sparsity = 0.0;
};

// Mean over the batch of the mean squared standardized reconstruction error
// over active sea cells, plus lambda * mean(mask over sea cells).
LossParts decoder_loss(const Decoder& decoder, const PixelStats& stats, const Field& mask,
                       const FieldSeries& batch, double lambda);

// Analytic gradients of decoder_loss at the given point; the finite-difference
// check and the training loop share this math.
struct DecoderGradients {
    Eigen::MatrixXd W;  // linear
    Eigen::VectorXd b;
    Eigen::MatrixXd W1; // mlp1
    Eigen::VectorXd b1;
    Eigen::MatrixXd W2;
    Eigen::VectorXd b2;
    Eigen::VectorXd mask; // d total / d mask over sea cells
};

DecoderGradients decoder_gradients(const Decoder& decoder, const PixelStats& stats,
                                   const Field& mask, const FieldSeries& batch, double lambda);

TrainReport train(const FieldSeries& train_series, const MaskParams& init,
                  const TrainConfig& config);

// Full-field estimate in physical units from one observed snapshot.
Field reconstruct(const Decoder& decoder, const PixelStats& stats, const Field& mask,
                  const Field& observed);

} // namespace entroplace
