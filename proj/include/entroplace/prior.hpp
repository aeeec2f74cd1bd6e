#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "entroplace/entropy.hpp"
#include "entroplace/selector.hpp"

namespace entroplace {

// Sensor-location proposal distribution over sea cells.  Probabilities are
// zero on land and on flagged cells and sum to one over the rest.
struct PriorField {
    Field p;
    double tau = 0.2;
};

struct SensorSet {
    std::vector<std::pair<int, int>> locations;
    std::uint64_t seed = 0;
};

// p(r) = exp(H(r)/tau) / sum exp(H/tau), with max subtraction for overflow
// safety.  Land and flagged (-inf) cells are excluded.
PriorField sensor_prior(const EntropyField& entropy, double tau);

// Exact sampling of k distinct cells without replacement via Gumbel-top-k.
SensorSet sample_sensors(const PriorField& prior, int k, std::uint64_t seed);

// Quantile-shift initialization: w = ln p - q with q the (1 - k0/n_sea)
// quantile of ln p over sea cells, so step(w) initially fires on about the k0
// highest-prior cells.  Boundary ties beyond the budget are nudged just below
// zero, lowest cell index first.  Land cells get the -inf sentinel.
MaskParams init_mask_params(const PriorField& prior, int target_count);

} // namespace entroplace
