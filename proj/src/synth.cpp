#include "entroplace/synth.hpp"

#include <cmath>
#include <vector>

#include "entroplace/rng.hpp"

namespace entroplace {

namespace {

constexpr double kTwoPi = 6.283185307179586477;
constexpr double kArCoeff = 0.9; // per-day, ~10-day decorrelation
constexpr int kBumpsPerMode = 3;
constexpr double kFrontGain = 3.0;

} // namespace

void SynthConfig::validate() const {
    shape.validate();
    if (years < 2) throw std::invalid_argument("synth: years must be >= 2");
    if (rank < 1) throw std::invalid_argument("synth: rank must be >= 1");
    if (mode_amp < 0) throw std::invalid_argument("synth: mode_amp must be >= 0");
    if (noise_sigma < 0) throw std::invalid_argument("synth: noise_sigma must be >= 0");
    if (!(land_fraction >= 0.0 && land_fraction < 1.0))
        throw std::invalid_argument("synth: land_fraction must lie in [0, 1)");
    if (front_row_lo < 0 || front_row_hi >= shape.rows || front_row_lo > front_row_hi)
        throw std::invalid_argument("synth: front band rows out of range");
}

FieldSeries generate(const SynthConfig& config) {
    config.validate();
    const int rows = config.shape.rows;
    const int cols = config.shape.cols;
    const int cells = config.shape.cells();
    const int T = config.years * kDaysPerYear;

    std::vector<std::uint8_t> land(static_cast<size_t>(cells), 0);
    const int land_cols = static_cast<int>(config.land_fraction * cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < land_cols; ++c) land[static_cast<size_t>(r) * cols + c] = 1;

    // Smooth random spatial modes: mixtures of separable Gaussian bumps,
    // normalized to unit RMS over sea cells.
    const CounterRng mode_rng(derive_seed(config.seed, "modes"));
    std::vector<std::vector<double>> modes(static_cast<size_t>(config.rank));
    for (int m = 0; m < config.rank; ++m) {
        auto& phi = modes[static_cast<size_t>(m)];
        phi.assign(static_cast<size_t>(cells), 0.0);
        for (int b = 0; b < kBumpsPerMode; ++b) {
            const std::uint64_t base = (static_cast<std::uint64_t>(m) * kBumpsPerMode + b) * 8;
            const double ci = mode_rng.uniform(base + 0) * (rows - 1);
            const double cj = mode_rng.uniform(base + 1) * (cols - 1);
            // Localized bumps leave genuinely quiet regions between them, the
            // way ice-locked areas sit next to mixing zones.
            const double si = rows / 12.0 + mode_rng.uniform(base + 2) * rows / 6.0;
            const double sj = cols / 12.0 + mode_rng.uniform(base + 3) * cols / 6.0;
            const double w = mode_rng.uniform(base + 4) < 0.5 ? -1.0 : 1.0;
            for (int r = 0; r < rows; ++r)
                for (int c = 0; c < cols; ++c) {
                    const double dr = (r - ci) / si;
                    const double dc = (c - cj) / sj;
                    phi[static_cast<size_t>(r) * cols + c] +=
                        w * std::exp(-0.5 * (dr * dr + dc * dc));
                }
        }
        double sumsq = 0.0;
        int n_sea = 0;
        for (int i = 0; i < cells; ++i)
            if (!land[static_cast<size_t>(i)]) {
                sumsq += phi[static_cast<size_t>(i)] * phi[static_cast<size_t>(i)];
                ++n_sea;
            }
        const double rms = std::sqrt(sumsq / std::max(1, n_sea));
        if (rms > 0)
            for (auto& v : phi) v /= rms;
    }

    // Mode amplitudes: stationary AR(1) plus a phase-shifted annual harmonic.
    // Sequential in t, so computed up front; the spatial fill below is the
    // parallel part.
    const CounterRng amp_rng(derive_seed(config.seed, "amplitudes"));
    std::vector<double> amp(static_cast<size_t>(config.rank) * T);
    const double inn_sigma = std::sqrt(1.0 - kArCoeff * kArCoeff);
    for (int m = 0; m < config.rank; ++m) {
        const std::uint64_t lane = static_cast<std::uint64_t>(m) * (T + 1);
        double ar = amp_rng.normal(lane); // stationary start, unit variance
        const double phase = kTwoPi * m / std::max(1, config.rank);
        for (int t = 0; t < T; ++t) {
            if (t > 0) ar = kArCoeff * ar + inn_sigma * amp_rng.normal(lane + 1 + t);
            const int day = t % kDaysPerYear + 1;
            const double season = 0.5 * std::cos(kTwoPi * (day - 1) / kDaysPerYear + phase);
            amp[static_cast<size_t>(m) * T + t] = config.mode_amp * (ar + season);
        }
    }

    const CounterRng noise_rng(derive_seed(config.seed, "noise"));
    std::vector<double> values(static_cast<size_t>(T) * cells);

#pragma omp parallel for schedule(static)
    for (int t = 0; t < T; ++t) {
        const int year = t / kDaysPerYear + 1;
        const int day = t % kDaysPerYear + 1;
        const double cycle_t = std::cos(kTwoPi * (day - 1) / kDaysPerYear);
        const double drift = config.drift_amp * (year - 1);
        double* slab = values.data() + static_cast<size_t>(t) * cells;
        for (int r = 0; r < rows; ++r) {
            const double grad = rows > 1 ? 0.5 + static_cast<double>(r) / (rows - 1) : 1.0;
            const double band = (r >= config.front_row_lo && r <= config.front_row_hi)
                                    ? kFrontGain
                                    : 1.0;
            for (int c = 0; c < cols; ++c) {
                const int idx = r * cols + c;
                if (land[static_cast<size_t>(idx)]) {
                    slab[idx] = kLandSentinel;
                    continue;
                }
                double v = config.seasonal_amp * cycle_t * grad + drift;
                double mode_sum = 0.0;
                for (int m = 0; m < config.rank; ++m)
                    mode_sum += amp[static_cast<size_t>(m) * T + t] *
                                modes[static_cast<size_t>(m)][static_cast<size_t>(idx)];
                v += band * mode_sum;
                if (config.noise_sigma > 0)
                    v += config.noise_sigma *
                         noise_rng.normal(static_cast<std::uint64_t>(t) * cells + idx);
                slab[idx] = v;
            }
        }
    }

    FieldSeries series(config.shape, land);
    for (int t = 0; t < T; ++t)
        series.append({values.data() + static_cast<size_t>(t) * cells,
                       static_cast<size_t>(cells)},
                      TimeStamp{t / kDaysPerYear + 1, t % kDaysPerYear + 1});
    return series;
}

} // namespace entroplace
