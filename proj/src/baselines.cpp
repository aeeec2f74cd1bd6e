#include "entroplace/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "entroplace/errors.hpp"

namespace entroplace {

Climatology fit_climatology(const FieldSeries& train) {
    if (train.times() == 0) throw data_error("climatology: empty series");
    const GridShape shape = train.shape();
    const int cells = shape.cells();

    Climatology clim;
    clim.day_mean.assign(kDaysPerYear, Field(shape, 0.0));
    clim.day_counts.assign(kDaysPerYear, std::vector<int>(static_cast<size_t>(cells), 0));
    for (auto& f : clim.day_mean) f.land = train.land();

    for (int t = 0; t < train.times(); ++t) {
        const int d = train.stamp(t).day - 1;
        const auto slab = train.slab(t);
        auto& mean = clim.day_mean[static_cast<size_t>(d)];
        auto& counts = clim.day_counts[static_cast<size_t>(d)];
        for (int i = 0; i < cells; ++i) {
            if (train.is_land(i)) continue;
            mean.values[static_cast<size_t>(i)] += slab[static_cast<size_t>(i)];
            ++counts[static_cast<size_t>(i)];
        }
    }

    std::string missing;
    for (int d = 0; d < kDaysPerYear; ++d) {
        bool any = false;
        for (int c : clim.day_counts[static_cast<size_t>(d)])
            if (c > 0) {
                any = true;
                break;
            }
        if (!any) {
            if (!missing.empty()) missing += ",";
            missing += std::to_string(d + 1);
        }
    }
    if (!missing.empty())
        throw data_error("climatology: days of year missing from train set: " + missing);

    for (int d = 0; d < kDaysPerYear; ++d) {
        auto& mean = clim.day_mean[static_cast<size_t>(d)];
        const auto& counts = clim.day_counts[static_cast<size_t>(d)];
        for (int i = 0; i < cells; ++i) {
            if (train.is_land(i)) {
                mean.values[static_cast<size_t>(i)] = kLandSentinel;
                continue;
            }
            mean.values[static_cast<size_t>(i)] /= counts[static_cast<size_t>(i)];
        }
    }
    return clim;
}

const Field& climatology_at(const Climatology& clim, int day) {
    if (day < 1 || day > kDaysPerYear)
        throw std::invalid_argument("climatology: day of year out of 1..365");
    return clim.day_mean[static_cast<size_t>(day - 1)];
}

PODBasis fit_pod(const FieldSeries& train, int r) {
    const SeaIndex sea(train.land());
    const int n = sea.count();
    const int T = train.times();
    if (r < 1 || r > std::min(T, n))
        throw std::invalid_argument("pod: r must lie in 1..min(T, n_sea)");

    Eigen::MatrixXd snapshots(n, T);
    for (int t = 0; t < T; ++t) {
        const auto slab = train.slab(t);
        for (int i = 0; i < n; ++i)
            snapshots(i, t) = slab[static_cast<size_t>(sea.cell_of[static_cast<size_t>(i)])];
    }

    PODBasis basis;
    basis.mu = Field(train.shape(), 0.0);
    basis.mu.land = train.land();
    for (int i = 0; i < train.shape().cells(); ++i)
        if (train.is_land(i)) basis.mu.values[static_cast<size_t>(i)] = kLandSentinel;

    const Eigen::VectorXd mean = snapshots.rowwise().mean();
    for (int i = 0; i < n; ++i)
        basis.mu.values[static_cast<size_t>(sea.cell_of[static_cast<size_t>(i)])] = mean(i);
    snapshots.colwise() -= mean;

    Eigen::BDCSVD<Eigen::MatrixXd> svd(snapshots, Eigen::ComputeThinU);
    if (!(svd.singularValues()(0) > 0))
        throw numeric_error("pod: centered data has zero variance");
    basis.modes = svd.matrixU().leftCols(r);
    basis.singular_values = svd.singularValues().head(r);
    return basis;
}

std::vector<int> qr_pivot_sensors(PODBasis& basis) {
    const int r = static_cast<int>(basis.modes.cols());
    const int n = static_cast<int>(basis.modes.rows());

    // Businger-Golub column pivoting on the r x n matrix modes^T.  Pivot
    // order is the sensor order; |R_kk| below tolerance truncates.
    Eigen::MatrixXd A = basis.modes.transpose();
    std::vector<int> cols(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) cols[static_cast<size_t>(j)] = j;
    Eigen::VectorXd norms = A.colwise().squaredNorm();

    std::vector<int> pivots;
    for (int k = 0; k < r; ++k) {
        int best = k;
        double best_norm = -1.0;
        for (int j = k; j < n; ++j)
            if (norms(j) > best_norm) {
                best_norm = norms(j);
                best = j;
            }
        if (best != k) {
            A.col(k).swap(A.col(best));
            std::swap(norms(k), norms(best));
            std::swap(cols[static_cast<size_t>(k)], cols[static_cast<size_t>(best)]);
        }

        // Householder on rows k.. of column k.
        Eigen::VectorXd x = A.col(k).segment(k, r - k);
        double alpha = x.norm();
        if (alpha < 1e-12) {
            basis.warnings.push_back("qr pivoting: rank " + std::to_string(k) +
                                     " < requested " + std::to_string(r) +
                                     "; fewer sensors returned");
            break;
        }
        if (x(0) > 0) alpha = -alpha;
        Eigen::VectorXd v = x;
        v(0) -= alpha;
        const double vnorm2 = v.squaredNorm();
        if (vnorm2 > 0) {
            for (int j = k; j < n; ++j) {
                Eigen::Ref<Eigen::VectorXd> col = A.col(j).segment(k, r - k);
                col -= (2.0 * v.dot(col) / vnorm2) * v;
            }
        }
        pivots.push_back(cols[static_cast<size_t>(k)]);
        for (int j = k + 1; j < n; ++j)
            norms(j) = A.col(j).segment(k + 1, r - k - 1).squaredNorm();
    }

    const SeaIndex sea(basis.mu.land);
    std::vector<int> sensors;
    sensors.reserve(pivots.size());
    for (int p : pivots) sensors.push_back(sea.cell_of[static_cast<size_t>(p)]);
    basis.sensors = sensors;
    return sensors;
}

Eigen::VectorXd measure_at_sensors(const PODBasis& basis, const Field& snapshot) {
    Eigen::VectorXd m(static_cast<Eigen::Index>(basis.sensors.size()));
    for (size_t i = 0; i < basis.sensors.size(); ++i)
        m(static_cast<Eigen::Index>(i)) =
            snapshot.values[static_cast<size_t>(basis.sensors[i])];
    return m;
}

Field pod_reconstruct(const PODBasis& basis, const Eigen::VectorXd& measurements) {
    const int k = static_cast<int>(basis.sensors.size());
    if (k == 0) throw std::invalid_argument("pod: no sensors selected");
    if (measurements.size() != k)
        throw std::invalid_argument("pod: measurement count does not match sensors");

    // When pivoting truncated the sensor list, reconstruct in the matching
    // leading mode subspace so the square system stays determined.
    const SeaIndex sea(basis.mu.land);
    const Eigen::MatrixXd W = basis.modes.leftCols(k);
    Eigen::MatrixXd PsW(k, k);
    Eigen::VectorXd mu_s(k);
    for (int i = 0; i < k; ++i) {
        const int si = sea.sea_of[static_cast<size_t>(basis.sensors[static_cast<size_t>(i)])];
        PsW.row(i) = W.row(si);
        mu_s(i) = basis.mu.values[static_cast<size_t>(basis.sensors[static_cast<size_t>(i)])];
    }

    Eigen::FullPivLU<Eigen::MatrixXd> lu(PsW);
    if (!lu.isInvertible())
        throw numeric_error("pod: sensor system is singular");
    const Eigen::VectorXd coeffs = lu.solve(measurements - mu_s);
    const Eigen::VectorXd recon = W * coeffs;

    Field out = basis.mu;
    for (int i = 0; i < static_cast<int>(sea.cell_of.size()); ++i)
        out.values[static_cast<size_t>(sea.cell_of[static_cast<size_t>(i)])] += recon(i);
    return out;
}

} // namespace entroplace
