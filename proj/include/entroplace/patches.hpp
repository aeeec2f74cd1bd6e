#pragma once

#include <utility>
#include <vector>

#include "entroplace/grid.hpp"
#include "entroplace/ordering.hpp"

namespace entroplace {

// Patches cut from a FieldSeries, serialized in a chosen Ordering.  Windows
// touching land are dropped outright; `no_valid_window` flags the degenerate
// all-land case.
struct PatchSet {
    int patch_size = 0;
    Ordering ordering;                        // serialization order of each patch
    std::vector<std::pair<int, int>> centers; // grid coords, top-left + L/2
    std::vector<int> time_index;              // per patch
    std::vector<double> data;                 // row-major, count x L*L
    bool no_valid_window = false;

    int count() const { return static_cast<int>(centers.size()); }
    int dim() const { return patch_size * patch_size; }
    std::span<const double> patch(int i) const {
        return {data.data() + static_cast<size_t>(i) * dim(), static_cast<size_t>(dim())};
    }
};

// All fully-sea L x L windows whose top-left lies on the stride lattice, one
// patch per time step per window.  Traversal is time-major, then row-major
// over window positions.
PatchSet extract_patches(const FieldSeries& series, int patch_size, int stride,
                         const Ordering& ordering);

// Sea-aware boxcar mean: each sea cell becomes the mean over sea cells in its
// window x window neighborhood; land cells are untouched.  window must be odd.
Field boxcar_smooth(const Field& field, int window);

} // namespace entroplace
