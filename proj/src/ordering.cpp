#include "entroplace/ordering.hpp"

#include <stdexcept>
#include <string>

namespace entroplace {

namespace {

void require_size(int size) {
    if (size < 1) throw std::invalid_argument("ordering size must be >= 1");
}

} // namespace

Ordering raster_ordering(int size) {
    require_size(size);
    Ordering o{size, {}};
    o.sequence.reserve(static_cast<size_t>(size) * size);
    for (int r = 0; r < size; ++r)
        for (int c = 0; c < size; ++c)
            o.sequence.emplace_back(r, c);
    return o;
}

Ordering s_curve_ordering(int size) {
    require_size(size);
    Ordering o{size, {}};
    o.sequence.reserve(static_cast<size_t>(size) * size);
    for (int r = 0; r < size; ++r) {
        if (r % 2 == 0) {
            for (int c = 0; c < size; ++c) o.sequence.emplace_back(r, c);
        } else {
            for (int c = size - 1; c >= 0; --c) o.sequence.emplace_back(r, c);
        }
    }
    return o;
}

Ordering spiral_ordering(int size) {
    require_size(size);
    Ordering o{size, {}};
    const size_t total = static_cast<size_t>(size) * size;
    o.sequence.reserve(total);

    int r = (size + 1) / 2 - 1; // anchor: ceil(L/2) - 1
    int c = r;
    auto emit = [&](int rr, int cc) {
        if (rr >= 0 && rr < size && cc >= 0 && cc < size)
            o.sequence.emplace_back(rr, cc);
    };
    emit(r, c);

    // Direction cycle right, down, left, up; run lengths 1,1,2,2,3,3,...
    static constexpr int dr[4] = {0, 1, 0, -1};
    static constexpr int dc[4] = {1, 0, -1, 0};
    int dir = 0;
    int run = 1;
    while (o.sequence.size() < total) {
        for (int leg = 0; leg < 2 && o.sequence.size() < total; ++leg) {
            for (int step = 0; step < run && o.sequence.size() < total; ++step) {
                r += dr[dir];
                c += dc[dir];
                emit(r, c);
            }
            dir = (dir + 1) % 4;
        }
        ++run;
    }
    return o;
}

Ordering make_ordering(OrderingKind kind, int size) {
    switch (kind) {
    case OrderingKind::raster: return raster_ordering(size);
    case OrderingKind::s_curve: return s_curve_ordering(size);
    case OrderingKind::spiral: return spiral_ordering(size);
    }
    throw std::invalid_argument("unknown ordering kind");
}

const char* ordering_name(OrderingKind kind) {
    switch (kind) {
    case OrderingKind::raster: return "raster";
    case OrderingKind::s_curve: return "s-curve";
    case OrderingKind::spiral: return "spiral";
    }
    return "?";
}

OrderingKind ordering_from_name(const std::string& name) {
    if (name == "raster") return OrderingKind::raster;
    if (name == "s-curve" || name == "s_curve") return OrderingKind::s_curve;
    if (name == "spiral") return OrderingKind::spiral;
    throw std::invalid_argument("unknown ordering name: " + name);
}

} // namespace entroplace
