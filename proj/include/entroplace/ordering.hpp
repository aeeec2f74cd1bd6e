#pragma once

#include <string>
#include <utility>
#include <vector>

namespace entroplace {

// A bijective traversal order of the L x L patch lattice.  The autoregressive
// factorization of the patch density follows this sequence, so prefix
// truncation of the sequence selects the spatial sub-scale.
struct Ordering {
    int size = 0; // L
    std::vector<std::pair<int, int>> sequence; // (row, col) within the patch, length L*L
};

// Row-major traversal.
Ordering raster_ordering(int size);

// Boustrophedon: row-major with every odd row reversed.
Ordering s_curve_ordering(int size);

// Filtered unbounded spiral from anchor (ceil(L/2)-1, ceil(L/2)-1), turning
// right -> down -> left -> up with run lengths 1,1,2,2,3,3,...  Out-of-bounds
// steps are skipped.  For every k <= L the first k*k cells form a contiguous
// k x k square, which is what makes one fitted model serve several scales.
Ordering spiral_ordering(int size);

enum class OrderingKind { raster, s_curve, spiral };

Ordering make_ordering(OrderingKind kind, int size);

const char* ordering_name(OrderingKind kind);
OrderingKind ordering_from_name(const std::string& name);

} // namespace entroplace
