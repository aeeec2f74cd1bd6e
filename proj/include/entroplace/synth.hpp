#pragma once

#include <cstdint>

#include "entroplace/grid.hpp"

namespace entroplace {

// Synthetic geophysical-like dataset: a day-of-year cycle with a latitude
// gradient, a low-rank sum of smooth random spatial modes driven by
// seasonal + AR(1) amplitudes, a linear interannual drift, and white noise.
// Rows in [front_row_lo, front_row_hi] get triple mode amplitude, emulating
// the variability of a current boundary.  The left land_fraction of columns
// is land.  Bit-reproducible for a fixed seed.
struct SynthConfig {
    GridShape shape{64, 64};
    int years = 2;
    int rank = 6;              // latent spatial modes
    double mode_amp = 1.0;     // scale of mode amplitudes (0 silences the modes)
    double seasonal_amp = 0.5; // day-of-year cycle scale
    double drift_amp = 0.5;    // per-year trend
    int front_row_lo = 24;
    int front_row_hi = 40;     // inclusive
    double noise_sigma = 0.5;
    double land_fraction = 0.125;
    std::uint64_t seed = 1;

    void validate() const;
};

FieldSeries generate(const SynthConfig& config);

} // namespace entroplace
