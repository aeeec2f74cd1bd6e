#include "entroplace/entropy.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>

#include "entroplace/errors.hpp"
#include "entroplace/rng.hpp"

namespace entroplace {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kGaussConst = 0.5 + 0.5 * kLog2Pi; // entropy of N(0,1)

// Distinct patch centers and, per center, the pooled rows of every patch
// whose center lies within `radius` in Chebyshev distance.
struct BinLayout {
    std::vector<std::pair<int, int>> centers;
    std::vector<std::vector<int>> member_rows;
};

BinLayout build_bins(const PatchSet& patches, int radius) {
    std::map<std::pair<int, int>, std::vector<int>> groups;
    for (int i = 0; i < patches.count(); ++i)
        groups[patches.centers[static_cast<size_t>(i)]].push_back(i);

    BinLayout layout;
    layout.centers.reserve(groups.size());
    for (const auto& [center, rows] : groups) layout.centers.push_back(center);

    layout.member_rows.resize(layout.centers.size());
    for (size_t b = 0; b < layout.centers.size(); ++b) {
        auto& rows = layout.member_rows[b];
        const auto [cr, cc] = layout.centers[b];
        for (const auto& [center, members] : groups) {
            if (std::abs(center.first - cr) <= radius &&
                std::abs(center.second - cc) <= radius)
                rows.insert(rows.end(), members.begin(), members.end());
        }
        std::sort(rows.begin(), rows.end());
    }
    return layout;
}

// Gaussian MLE of one bin with shrinkage; rows are indices into `patches`,
// already bootstrap-resampled if requested.
PatchBin fit_bin(const PatchSet& patches, std::pair<int, int> center,
                 std::vector<int> rows, double shrinkage_rel) {
    const int d = patches.dim();
    const int n = static_cast<int>(rows.size());

    Eigen::MatrixXd A(n, d);
    for (int i = 0; i < n; ++i) {
        const auto p = patches.patch(rows[static_cast<size_t>(i)]);
        for (int j = 0; j < d; ++j) A(i, j) = p[static_cast<size_t>(j)];
    }

    PatchBin bin;
    bin.center = center;
    bin.count = n;
    bin.mean = A.colwise().mean();
    A.rowwise() -= bin.mean.transpose();
    Eigen::MatrixXd sigma = (A.transpose() * A) / n;

    double delta = shrinkage_rel * sigma.diagonal().mean();
    if (!(delta > 0)) delta = shrinkage_rel; // zero-variance sample: absolute floor
    sigma.diagonal().array() += delta;
    bin.shrinkage = delta;

    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success)
        throw numeric_error("patch model: Cholesky failed after shrinkage");
    bin.chol = llt.matrixL();
    bin.sample_rows = std::move(rows);
    return bin;
}

std::vector<int> bootstrap_rows(const std::vector<int>& rows, std::uint64_t seed) {
    SplitMix rng(seed);
    std::vector<int> out(rows.size());
    for (auto& r : out) r = rows[static_cast<size_t>(rng.below(rows.size()))];
    return out;
}

const PatchBin& checked_bin(const PatchModel& model, int bin) {
    if (bin < 0 || bin >= static_cast<int>(model.bins.size()))
        throw std::invalid_argument("patch model: bin index out of range");
    return model.bins[static_cast<size_t>(bin)];
}

int checked_prefix_dim(const PatchModel& model, int scale) {
    if (scale < 1 || scale > model.ordering.size)
        throw std::invalid_argument("entropy scale must lie in 1..L");
    return scale * scale;
}

// Forward substitution over the leading dp x dp Cholesky block; returns the
// joint NLL and the sum of per-pixel conditional NLLs (equal up to rounding).
std::pair<double, double> nll_two_routes(const PatchBin& bin, std::span<const double> patch,
                                         int dp) {
    std::vector<double> z(static_cast<size_t>(dp));
    double quad = 0.0, logdet_half = 0.0, cond_sum = 0.0;
    for (int i = 0; i < dp; ++i) {
        double s = patch[static_cast<size_t>(i)] - bin.mean(i);
        for (int j = 0; j < i; ++j) s -= bin.chol(i, j) * z[static_cast<size_t>(j)];
        const double lii = bin.chol(i, i);
        const double zi = s / lii;
        z[static_cast<size_t>(i)] = zi;
        quad += zi * zi;
        logdet_half += std::log(lii);
        cond_sum += 0.5 * zi * zi + std::log(lii) + 0.5 * kLog2Pi;
    }
    const double joint = 0.5 * quad + logdet_half + 0.5 * dp * kLog2Pi;
    return {joint, cond_sum};
}

} // namespace

void EntropyConfig::validate() const {
    if (patch_size < 1) throw std::invalid_argument("entropy: patch_size must be >= 1");
    if (scale < 1 || scale > patch_size)
        throw std::invalid_argument("entropy: scale must lie in 1..patch_size");
    if (bin_stride < 1) throw std::invalid_argument("entropy: bin_stride must be >= 1");
    if (min_samples < 2) throw std::invalid_argument("entropy: min_samples must be >= 2");
    if (!(shrinkage_rel > 0)) throw std::invalid_argument("entropy: shrinkage must be > 0");
    if (ensemble < 1) throw std::invalid_argument("entropy: ensemble must be >= 1");
    if (mc_samples < 1) throw std::invalid_argument("entropy: mc_samples must be >= 1");
    if (smooth_window < 1 || smooth_window % 2 == 0)
        throw std::invalid_argument("entropy: smooth_window must be odd and >= 1");
}

PixelStats fit_pixel_gaussian(const FieldSeries& train) {
    const int T = train.times();
    if (T < 2) throw data_error("pixel statistics need at least 2 time steps");
    const int cells = train.shape().cells();

    PixelStats stats{Field(train.shape()), Field(train.shape())};
    stats.mu.land = train.land();
    stats.sigma.land = train.land();

#pragma omp parallel for schedule(static)
    for (int i = 0; i < cells; ++i) {
        if (train.is_land(i)) {
            stats.mu.values[static_cast<size_t>(i)] = kLandSentinel;
            stats.sigma.values[static_cast<size_t>(i)] = kLandSentinel;
            continue;
        }
        double sum = 0.0;
        for (int t = 0; t < T; ++t) sum += train.slab(t)[static_cast<size_t>(i)];
        const double mu = sum / T;
        double ss = 0.0;
        for (int t = 0; t < T; ++t) {
            const double d = train.slab(t)[static_cast<size_t>(i)] - mu;
            ss += d * d;
        }
        stats.mu.values[static_cast<size_t>(i)] = mu;
        stats.sigma.values[static_cast<size_t>(i)] = std::sqrt(ss / (T - 1));
    }
    return stats;
}

EntropyField pixel_entropy(const PixelStats& stats) {
    EntropyField out;
    out.H = Field(stats.sigma.shape);
    out.H.land = stats.sigma.land;
    out.scale = 1;
    out.ensemble_size = 1;
    for (int i = 0; i < stats.sigma.shape.cells(); ++i) {
        if (stats.sigma.is_land(i)) {
            out.H.values[static_cast<size_t>(i)] = kLandSentinel;
            continue;
        }
        const double s = stats.sigma.values[static_cast<size_t>(i)];
        out.H.values[static_cast<size_t>(i)] =
            s > 0 ? std::log(s) + kGaussConst : -std::numeric_limits<double>::infinity();
    }
    return out;
}

PatchModel fit_patch_model(const PatchSet& patches, const EntropyConfig& config,
                           std::uint64_t resample_seed) {
    config.validate();
    if (patches.count() == 0) throw data_error("patch model: no patches");
    if (patches.patch_size != config.patch_size)
        throw std::invalid_argument("patch model: patch size mismatch");

    const BinLayout layout = build_bins(patches, config.bin_stride);
    PatchModel model;
    model.ordering = patches.ordering;
    model.bins.reserve(layout.centers.size());

    for (size_t b = 0; b < layout.centers.size(); ++b) {
        const auto& rows = layout.member_rows[b];
        if (static_cast<int>(rows.size()) < config.min_samples) {
            model.warnings.push_back(
                "bin (" + std::to_string(layout.centers[b].first) + "," +
                std::to_string(layout.centers[b].second) + ") dropped: " +
                std::to_string(rows.size()) + " < " + std::to_string(config.min_samples) +
                " samples");
            continue;
        }
        std::vector<int> use = rows;
        if (resample_seed != 0)
            use = bootstrap_rows(rows, mix64(resample_seed + kGolden * (b + 1)));
        model.bins.push_back(fit_bin(patches, layout.centers[b], std::move(use),
                                     config.shrinkage_rel));
    }
    if (model.bins.empty()) throw data_error("patch model: every bin was dropped");
    return model;
}

double patch_nll(const PatchModel& model, int bin, std::span<const double> patch) {
    const PatchBin& pb = checked_bin(model, bin);
    if (static_cast<int>(patch.size()) != model.dim())
        throw std::invalid_argument("patch_nll: dimension mismatch");
    const auto [joint, cond_sum] = nll_two_routes(pb, patch, model.dim());
    const double tol = 1e-10 * std::max(1.0, std::abs(joint));
    if (std::abs(joint - cond_sum) > tol)
        throw numeric_error("patch_nll: joint and conditional routes disagree");
    return joint;
}

double patch_nll_prefix(const PatchModel& model, int bin, std::span<const double> patch,
                        int scale) {
    const PatchBin& pb = checked_bin(model, bin);
    const int dp = checked_prefix_dim(model, scale);
    if (static_cast<int>(patch.size()) < dp)
        throw std::invalid_argument("patch_nll_prefix: patch shorter than prefix");
    return nll_two_routes(pb, patch, dp).first;
}

double entropy_closed_form(const PatchModel& model, int bin, int scale) {
    const PatchBin& pb = checked_bin(model, bin);
    const int dp = checked_prefix_dim(model, scale);
    double h = 0.0;
    for (int i = 0; i < dp; ++i) h += std::log(pb.chol(i, i));
    h += dp * kGaussConst;
    return h / dp;
}

McResult entropy_monte_carlo(const PatchModel& model, int bin, int scale, int n_samples,
                             std::uint64_t seed) {
    const PatchBin& pb = checked_bin(model, bin);
    const int dp = checked_prefix_dim(model, scale);
    if (n_samples < 1) throw std::invalid_argument("mc entropy: n_samples must be >= 1");

    const CounterRng rng(derive_seed(seed, "mc-entropy"));
    std::vector<double> nll(static_cast<size_t>(n_samples));

#pragma omp parallel for schedule(static)
    for (int s = 0; s < n_samples; ++s) {
        std::vector<double> x(static_cast<size_t>(dp));
        // x = mean + L z over the leading block
        for (int i = 0; i < dp; ++i) {
            x[static_cast<size_t>(i)] = pb.mean(i);
        }
        for (int j = 0; j < dp; ++j) {
            const double zj = rng.normal(static_cast<std::uint64_t>(s) * dp + j);
            for (int i = j; i < dp; ++i)
                x[static_cast<size_t>(i)] += pb.chol(i, j) * zj;
        }
        nll[static_cast<size_t>(s)] = nll_two_routes(pb, x, dp).first;
    }

    double sum = 0.0;
    for (double v : nll) sum += v;
    const double mean = sum / n_samples;
    double var = 0.0;
    for (double v : nll) var += (v - mean) * (v - mean);
    var = n_samples > 1 ? var / (n_samples - 1) : 0.0;

    McResult res;
    res.per_cell = mean / dp;
    res.std_error = std::sqrt(var / n_samples) / dp;
    return res;
}

EntropyField entropy_field(const FieldSeries& train, const EntropyConfig& config) {
    config.validate();
    const int L = config.patch_size;
    const Ordering ordering = make_ordering(config.ordering, L);
    const PatchSet patches = extract_patches(train, L, config.bin_stride, ordering);
    if (patches.count() == 0) throw data_error("entropy field: no sea patches");

    const BinLayout layout = build_bins(patches, config.bin_stride);
    const int nb = static_cast<int>(layout.centers.size());
    const int B = config.ensemble;
    const int dp = config.scale * config.scale;

    // Member seeds; 0 is reserved for "no resampling".
    std::vector<std::uint64_t> member_seed(static_cast<size_t>(B), 0);
    if (config.bootstrap)
        for (int b = 0; b < B; ++b) {
            std::uint64_t s = derive_seed(config.seed, "bootstrap-" + std::to_string(b));
            member_seed[static_cast<size_t>(b)] = s ? s : 1;
        }

    // Held-in per-cell entropy per (member, bin); NaN marks dropped bins.
    std::vector<double> H(static_cast<size_t>(B) * nb,
                          std::numeric_limits<double>::quiet_NaN());
    std::atomic<bool> failed{false};

#pragma omp parallel for schedule(dynamic)
    for (int mk = 0; mk < B * nb; ++mk) {
        if (failed.load(std::memory_order_relaxed)) continue;
        try {
            const int b = mk / nb;
            const int k = mk % nb;
            const auto& rows = layout.member_rows[static_cast<size_t>(k)];
            if (static_cast<int>(rows.size()) < config.min_samples) continue;

            std::vector<int> use = rows;
            const std::uint64_t seed = member_seed[static_cast<size_t>(b)];
            if (seed != 0)
                use = bootstrap_rows(
                    rows, mix64(seed + kGolden * (static_cast<std::uint64_t>(k) + 1)));
            const PatchBin bin =
                fit_bin(patches, layout.centers[static_cast<size_t>(k)], std::move(use),
                        config.shrinkage_rel);

            double sum = 0.0;
            for (int r : bin.sample_rows)
                sum += nll_two_routes(bin, patches.patch(r), dp).first;
            H[static_cast<size_t>(mk)] = sum / (static_cast<double>(bin.count) * dp);
        } catch (...) {
            failed.store(true, std::memory_order_relaxed);
        }
    }
    if (failed.load()) throw numeric_error("entropy field: a bin fit failed");

    // Ensemble average per bin, in bin order then member order.
    std::vector<double> bin_H(static_cast<size_t>(nb),
                              std::numeric_limits<double>::quiet_NaN());
    int live_bins = 0;
    for (int k = 0; k < nb; ++k) {
        double sum = 0.0;
        int n = 0;
        for (int b = 0; b < B; ++b) {
            const double v = H[static_cast<size_t>(b) * nb + k];
            if (!std::isnan(v)) {
                sum += v;
                ++n;
            }
        }
        if (n == B) { // a bin is either fitted by all members or dropped
            bin_H[static_cast<size_t>(k)] = sum / n;
            ++live_bins;
        }
    }
    if (live_bins == 0) throw data_error("entropy field: every bin was dropped");

    // Splat bin values onto the bin-center lattice and spread bilinearly.
    const int stride = config.bin_stride;
    const GridShape shape = train.shape();
    const int nb_r = (shape.rows - L) / stride + 1;
    const int nb_c = (shape.cols - L) / stride + 1;
    std::vector<double> lattice(static_cast<size_t>(nb_r) * nb_c,
                                std::numeric_limits<double>::quiet_NaN());
    for (int k = 0; k < nb; ++k) {
        const auto [cr, cc] = layout.centers[static_cast<size_t>(k)];
        const int bi = (cr - L / 2) / stride;
        const int bj = (cc - L / 2) / stride;
        lattice[static_cast<size_t>(bi) * nb_c + bj] = bin_H[static_cast<size_t>(k)];
    }

    EntropyField out;
    out.H = Field(shape);
    out.H.land = train.land();
    out.scale = config.scale;
    out.ensemble_size = B;

    const double neg_inf = -std::numeric_limits<double>::infinity();
#pragma omp parallel for schedule(static)
    for (int r = 0; r < shape.rows; ++r) {
        for (int c = 0; c < shape.cols; ++c) {
            const int idx = r * shape.cols + c;
            if (train.is_land(idx)) {
                out.H.values[static_cast<size_t>(idx)] = kLandSentinel;
                continue;
            }
            double u = (static_cast<double>(r) - L / 2) / stride;
            double v = (static_cast<double>(c) - L / 2) / stride;
            u = std::clamp(u, 0.0, static_cast<double>(nb_r - 1));
            v = std::clamp(v, 0.0, static_cast<double>(nb_c - 1));
            const int i0 = std::min(static_cast<int>(u), nb_r - 1);
            const int j0 = std::min(static_cast<int>(v), nb_c - 1);
            const double fu = u - i0;
            const double fv = v - j0;

            double acc = 0.0, wsum = 0.0;
            for (int di = 0; di <= 1; ++di)
                for (int dj = 0; dj <= 1; ++dj) {
                    const int ii = i0 + di, jj = j0 + dj;
                    if (ii >= nb_r || jj >= nb_c) continue;
                    const double w = (di ? fu : 1.0 - fu) * (dj ? fv : 1.0 - fv);
                    const double val = lattice[static_cast<size_t>(ii) * nb_c + jj];
                    if (w > 0 && !std::isnan(val)) {
                        acc += w * val;
                        wsum += w;
                    }
                }
            out.H.values[static_cast<size_t>(idx)] = wsum > 0 ? acc / wsum : neg_inf;
        }
    }

    out.H = boxcar_smooth(out.H, config.smooth_window);
    return out;
}

} // namespace entroplace
