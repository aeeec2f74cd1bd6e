#include "entroplace/patches.hpp"

#include <stdexcept>

namespace entroplace {

namespace {

// Top-left corners of fully-sea windows on the stride lattice, row-major.
std::vector<std::pair<int, int>> sea_windows(const FieldSeries& series, int patch_size,
                                             int stride) {
    std::vector<std::pair<int, int>> out;
    const GridShape shape = series.shape();
    for (int r = 0; r + patch_size <= shape.rows; r += stride) {
        for (int c = 0; c + patch_size <= shape.cols; c += stride) {
            bool clean = true;
            for (int i = 0; i < patch_size && clean; ++i)
                for (int j = 0; j < patch_size; ++j)
                    if (series.is_land(r + i, c + j)) {
                        clean = false;
                        break;
                    }
            if (clean) out.emplace_back(r, c);
        }
    }
    return out;
}

} // namespace

PatchSet extract_patches(const FieldSeries& series, int patch_size, int stride,
                         const Ordering& ordering) {
    const GridShape shape = series.shape();
    if (patch_size < 1 || patch_size > std::min(shape.rows, shape.cols))
        throw std::invalid_argument("patch size must fit inside the grid");
    if (stride < 1) throw std::invalid_argument("stride must be >= 1");
    if (ordering.size != patch_size)
        throw std::invalid_argument("ordering size does not match patch size");

    const auto windows = sea_windows(series, patch_size, stride);
    const int dim = patch_size * patch_size;
    const int T = series.times();
    const int nw = static_cast<int>(windows.size());

    PatchSet set;
    set.patch_size = patch_size;
    set.ordering = ordering;
    if (nw == 0) {
        set.no_valid_window = true;
        return set;
    }

    const int n = T * nw;
    set.centers.resize(static_cast<size_t>(n));
    set.time_index.resize(static_cast<size_t>(n));
    set.data.resize(static_cast<size_t>(n) * dim);

    // Each patch writes its own slot: deterministic regardless of threads.
#pragma omp parallel for schedule(static)
    for (int p = 0; p < n; ++p) {
        const int t = p / nw;
        const auto [wr, wc] = windows[static_cast<size_t>(p % nw)];
        set.centers[static_cast<size_t>(p)] = {wr + patch_size / 2, wc + patch_size / 2};
        set.time_index[static_cast<size_t>(p)] = t;
        const auto slab = series.slab(t);
        double* dst = set.data.data() + static_cast<size_t>(p) * dim;
        for (int k = 0; k < dim; ++k) {
            const auto [pr, pc] = ordering.sequence[static_cast<size_t>(k)];
            dst[k] = slab[static_cast<size_t>(wr + pr) * shape.cols + (wc + pc)];
        }
    }
    return set;
}

Field boxcar_smooth(const Field& field, int window) {
    if (window < 1 || window % 2 == 0)
        throw std::invalid_argument("boxcar window must be odd and >= 1");
    if (window == 1) return field;

    const int rows = field.shape.rows;
    const int cols = field.shape.cols;
    const int half = window / 2;
    Field out = field;

#pragma omp parallel for schedule(static)
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            // Flagged (non-finite) sea cells pass through unchanged and do not
            // contaminate their neighbors' averages.
            if (field.is_land(r, c) || !std::isfinite(field.at(r, c))) continue;
            double sum = 0.0;
            int n = 0;
            const int r0 = std::max(0, r - half), r1 = std::min(rows - 1, r + half);
            const int c0 = std::max(0, c - half), c1 = std::min(cols - 1, c + half);
            for (int i = r0; i <= r1; ++i)
                for (int j = c0; j <= c1; ++j)
                    if (!field.is_land(i, j) && std::isfinite(field.at(i, j))) {
                        sum += field.at(i, j);
                        ++n;
                    }
            out.at(r, c) = sum / n; // n >= 1: the cell itself counts
        }
    }
    return out;
}

} // namespace entroplace
