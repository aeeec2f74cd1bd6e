#include "entroplace/reference.hpp"

#include <cmath>
#include <stdexcept>

#include "entroplace/rng.hpp"

namespace entroplace::reference {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

} // namespace

Field boxcar_smooth(const Field& field, int window) {
    if (window < 1 || window % 2 == 0)
        throw std::invalid_argument("boxcar window must be odd and >= 1");
    if (window == 1) return field;
    const int rows = field.shape.rows;
    const int cols = field.shape.cols;
    const int half = window / 2;
    Field out = field;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            if (field.is_land(r, c) || !std::isfinite(field.at(r, c))) continue;
            double sum = 0.0;
            int n = 0;
            for (int i = std::max(0, r - half); i <= std::min(rows - 1, r + half); ++i)
                for (int j = std::max(0, c - half); j <= std::min(cols - 1, c + half); ++j)
                    if (!field.is_land(i, j) && std::isfinite(field.at(i, j))) {
                        sum += field.at(i, j);
                        ++n;
                    }
            out.at(r, c) = sum / n;
        }
    return out;
}

PatchSet extract_patches(const FieldSeries& series, int patch_size, int stride,
                         const Ordering& ordering) {
    const GridShape shape = series.shape();
    if (patch_size < 1 || patch_size > std::min(shape.rows, shape.cols))
        throw std::invalid_argument("patch size must fit inside the grid");
    if (stride < 1) throw std::invalid_argument("stride must be >= 1");

    PatchSet set;
    set.patch_size = patch_size;
    set.ordering = ordering;
    const int dim = patch_size * patch_size;

    for (int t = 0; t < series.times(); ++t) {
        for (int r = 0; r + patch_size <= shape.rows; r += stride) {
            for (int c = 0; c + patch_size <= shape.cols; c += stride) {
                bool clean = true;
                for (int i = 0; i < patch_size && clean; ++i)
                    for (int j = 0; j < patch_size; ++j)
                        if (series.is_land(r + i, c + j)) {
                            clean = false;
                            break;
                        }
                if (!clean) continue;
                set.centers.emplace_back(r + patch_size / 2, c + patch_size / 2);
                set.time_index.push_back(t);
                for (int k = 0; k < dim; ++k) {
                    const auto [pr, pc] = ordering.sequence[static_cast<size_t>(k)];
                    set.data.push_back(series.at(t, r + pr, c + pc));
                }
            }
        }
    }
    set.no_valid_window = set.centers.empty();
    return set;
}

PixelStats fit_pixel_gaussian(const FieldSeries& train) {
    const int T = train.times();
    if (T < 2) throw std::invalid_argument("pixel statistics need at least 2 time steps");
    PixelStats stats{Field(train.shape()), Field(train.shape())};
    stats.mu.land = train.land();
    stats.sigma.land = train.land();
    for (int i = 0; i < train.shape().cells(); ++i) {
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

void gaussian_moments(const Eigen::MatrixXd& samples, Eigen::VectorXd& mean,
                      Eigen::MatrixXd& cov) {
    const Eigen::Index n = samples.rows();
    const Eigen::Index d = samples.cols();
    mean = Eigen::VectorXd::Zero(d);
    for (Eigen::Index k = 0; k < n; ++k)
        for (Eigen::Index i = 0; i < d; ++i) mean(i) += samples(k, i);
    mean /= static_cast<double>(n);

    cov = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index k = 0; k < n; ++k)
        for (Eigen::Index i = 0; i < d; ++i)
            for (Eigen::Index j = 0; j < d; ++j)
                cov(i, j) += (samples(k, i) - mean(i)) * (samples(k, j) - mean(j));
    cov /= static_cast<double>(n);
}

McResult entropy_monte_carlo(const PatchModel& model, int bin, int scale, int n_samples,
                             std::uint64_t seed) {
    const PatchBin& pb = model.bins[static_cast<size_t>(bin)];
    const int dp = scale * scale;
    const CounterRng rng(derive_seed(seed, "mc-entropy"));

    double sum = 0.0, sumsq = 0.0;
    Eigen::VectorXd z(dp), x(dp);
    const auto L = pb.chol.topLeftCorner(dp, dp);
    for (int s = 0; s < n_samples; ++s) {
        for (int i = 0; i < dp; ++i)
            z(i) = rng.normal(static_cast<std::uint64_t>(s) * dp + i);
        x = pb.mean.head(dp) + L * z;

        // NLL via a dense triangular solve, independent of the production
        // forward-substitution path.
        Eigen::VectorXd zz =
            L.template triangularView<Eigen::Lower>().solve(x - pb.mean.head(dp));
        double logdet = 0.0;
        for (int i = 0; i < dp; ++i) logdet += std::log(pb.chol(i, i));
        const double nll = 0.5 * zz.squaredNorm() + logdet + 0.5 * dp * kLog2Pi;
        sum += nll;
        sumsq += nll * nll;
    }
    const double mean = sum / n_samples;
    const double var =
        n_samples > 1 ? std::max(0.0, (sumsq - n_samples * mean * mean) / (n_samples - 1))
                      : 0.0;
    McResult res;
    res.per_cell = mean / dp;
    res.std_error = std::sqrt(var / n_samples) / dp;
    return res;
}

Field bias_field(const FieldSeries& recon, const FieldSeries& ref) {
    Field out(ref.shape(), 0.0);
    out.land = ref.land();
    for (int i = 0; i < ref.shape().cells(); ++i) {
        if (ref.is_land(i)) {
            out.values[static_cast<size_t>(i)] = kLandSentinel;
            continue;
        }
        double sum = 0.0;
        for (int t = 0; t < ref.times(); ++t)
            sum += recon.slab(t)[static_cast<size_t>(i)] - ref.slab(t)[static_cast<size_t>(i)];
        out.values[static_cast<size_t>(i)] = sum / ref.times();
    }
    return out;
}

Field rmse_field(const FieldSeries& recon, const FieldSeries& ref) {
    Field out(ref.shape(), 0.0);
    out.land = ref.land();
    for (int i = 0; i < ref.shape().cells(); ++i) {
        if (ref.is_land(i)) {
            out.values[static_cast<size_t>(i)] = kLandSentinel;
            continue;
        }
        double sum = 0.0;
        for (int t = 0; t < ref.times(); ++t) {
            const double d =
                recon.slab(t)[static_cast<size_t>(i)] - ref.slab(t)[static_cast<size_t>(i)];
            sum += d * d;
        }
        out.values[static_cast<size_t>(i)] = std::sqrt(sum / ref.times());
    }
    return out;
}

} // namespace entroplace::reference
