#include "entroplace/prior.hpp"

#include <algorithm>
#include <cmath>

#include "entroplace/errors.hpp"
#include "entroplace/rng.hpp"

namespace entroplace {

namespace {

constexpr double kTieEps = 1e-9; // pushes over-budget ties just below firing

} // namespace

PriorField sensor_prior(const EntropyField& entropy, double tau) {
    if (!(tau > 0)) throw std::invalid_argument("prior: tau must be > 0");
    const Field& H = entropy.H;

    double hmax = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < H.shape.cells(); ++i) {
        if (H.is_land(i)) continue;
        const double v = H.values[static_cast<size_t>(i)];
        if (std::isfinite(v)) hmax = std::max(hmax, v);
    }
    if (!std::isfinite(hmax)) throw data_error("prior: every sea cell is flagged");

    PriorField prior;
    prior.tau = tau;
    prior.p = Field(H.shape, 0.0);
    prior.p.land = H.land;

    double z = 0.0;
    for (int i = 0; i < H.shape.cells(); ++i) {
        if (H.is_land(i)) {
            prior.p.values[static_cast<size_t>(i)] = 0.0;
            continue;
        }
        const double v = H.values[static_cast<size_t>(i)];
        const double e = std::isfinite(v) ? std::exp((v - hmax) / tau) : 0.0;
        prior.p.values[static_cast<size_t>(i)] = e;
        z += e;
    }
    for (auto& v : prior.p.values) v /= z;
    return prior;
}

SensorSet sample_sensors(const PriorField& prior, int k, std::uint64_t seed) {
    std::vector<std::pair<double, int>> keyed; // (ln p + gumbel, cell)
    const CounterRng rng(derive_seed(seed, "gumbel-top-k"));
    for (int i = 0; i < prior.p.shape.cells(); ++i) {
        const double p = prior.p.values[static_cast<size_t>(i)];
        if (prior.p.is_land(i) || !(p > 0)) continue;
        keyed.emplace_back(std::log(p) + rng.gumbel(static_cast<std::uint64_t>(i)), i);
    }
    if (k < 1 || k > static_cast<int>(keyed.size()))
        throw std::invalid_argument("sample_sensors: k exceeds positive-probability cells");

    std::partial_sort(keyed.begin(), keyed.begin() + k, keyed.end(),
                      [](const auto& a, const auto& b) {
                          return a.first != b.first ? a.first > b.first : a.second < b.second;
                      });

    SensorSet set;
    set.seed = seed;
    set.locations.reserve(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) {
        const int cell = keyed[static_cast<size_t>(i)].second;
        set.locations.emplace_back(cell / prior.p.shape.cols, cell % prior.p.shape.cols);
    }
    return set;
}

MaskParams init_mask_params(const PriorField& prior, int target_count) {
    const SeaIndex sea(prior.p.land);
    const int n = sea.count();
    if (target_count < 1 || target_count > n)
        throw std::invalid_argument("init_mask_params: target count out of 1..n_sea");

    // ln p with zero-probability (flagged) sea cells mapped to a finite value
    // below every real one: initially off, still trainable.
    double min_pos = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        const double p = prior.p.values[static_cast<size_t>(sea.cell_of[static_cast<size_t>(i)])];
        if (p > 0) min_pos = std::min(min_pos, std::log(p));
    }
    if (!std::isfinite(min_pos)) min_pos = 0.0;

    std::vector<double> lp(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double p = prior.p.values[static_cast<size_t>(sea.cell_of[static_cast<size_t>(i)])];
        lp[static_cast<size_t>(i)] = p > 0 ? std::log(p) : min_pos - 10.0;
    }

    std::vector<int> by_lp(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) by_lp[static_cast<size_t>(i)] = i;
    std::sort(by_lp.begin(), by_lp.end(), [&](int a, int b) {
        const double la = lp[static_cast<size_t>(a)];
        const double lb = lp[static_cast<size_t>(b)];
        return la != lb ? la < lb : a < b;
    });
    const double q = lp[static_cast<size_t>(by_lp[static_cast<size_t>(n - target_count)])];

    int above = 0;
    for (int i = 0; i < n; ++i) above += lp[static_cast<size_t>(i)] > q;
    int tie_budget = target_count - above; // ties allowed to fire, index order

    MaskParams params;
    params.w = Field(prior.p.shape, 0.0);
    params.w.land = prior.p.land;
    const double neg_inf = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < prior.p.shape.cells(); ++i)
        if (params.w.is_land(i)) params.w.values[static_cast<size_t>(i)] = neg_inf;

    for (int i = 0; i < n; ++i) {
        const double v = lp[static_cast<size_t>(i)];
        double wv = v - q;
        if (v == q) {
            if (tie_budget > 0) {
                --tie_budget;
                wv = 0.0;
            } else {
                wv = -kTieEps;
            }
        }
        params.w.values[static_cast<size_t>(sea.cell_of[static_cast<size_t>(i)])] = wv;
    }
    return params;
}

} // namespace entroplace
