#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "entroplace/errors.hpp"

namespace entroplace {

inline constexpr double kLandSentinel = std::numeric_limits<double>::quiet_NaN();
inline constexpr int kDaysPerYear = 365; // fixed calendar, no leap handling

struct GridShape {
    int rows = 0;
    int cols = 0;

    int cells() const { return rows * cols; }
    bool operator==(const GridShape&) const = default;

    void validate() const {
        if (rows < 1 || cols < 1)
            throw std::invalid_argument("grid shape must be at least 1x1");
    }
};

// A single 2-D grid of physical values.  Land cells hold NaN and are excluded
// from every statistic.
struct Field {
    GridShape shape;
    std::vector<double> values; // row-major
    std::vector<std::uint8_t> land; // 1 = land/excluded

    Field() = default;
    Field(GridShape s, double fill = 0.0)
        : shape(s), values(static_cast<size_t>(s.cells()), fill),
          land(static_cast<size_t>(s.cells()), 0) {
        shape.validate();
    }

    double& at(int r, int c) { return values[static_cast<size_t>(r) * shape.cols + c]; }
    double at(int r, int c) const { return values[static_cast<size_t>(r) * shape.cols + c]; }
    bool is_land(int r, int c) const { return land[static_cast<size_t>(r) * shape.cols + c] != 0; }
    bool is_land(int idx) const { return land[static_cast<size_t>(idx)] != 0; }

    int sea_count() const {
        int n = 0;
        for (auto v : land) n += (v == 0);
        return n;
    }
};

struct TimeStamp {
    int year = 0;
    int day = 0; // day of year, 1..365

    bool operator==(const TimeStamp&) const = default;
    bool operator<(const TimeStamp& o) const {
        return year != o.year ? year < o.year : day < o.day;
    }
};

// Time-indexed stack of fields sharing one shape and land mask.  Values are
// stored time-major so a snapshot is a contiguous slab.
class FieldSeries {
public:
    FieldSeries() = default;
    FieldSeries(GridShape shape, std::vector<std::uint8_t> land)
        : shape_(shape), land_(std::move(land)) {
        shape_.validate();
        if (land_.size() != static_cast<size_t>(shape_.cells()))
            throw std::invalid_argument("land mask size does not match shape");
    }

    void append(std::span<const double> slab, TimeStamp stamp) {
        if (slab.size() != static_cast<size_t>(shape_.cells()))
            throw std::invalid_argument("snapshot size does not match shape");
        if (!stamps_.empty() && !(stamps_.back() < stamp))
            throw std::invalid_argument("time stamps must be strictly increasing");
        if (stamp.day < 1 || stamp.day > kDaysPerYear)
            throw std::invalid_argument("day of year out of 1..365");
        values_.insert(values_.end(), slab.begin(), slab.end());
        stamps_.push_back(stamp);
    }

    int times() const { return static_cast<int>(stamps_.size()); }
    const GridShape& shape() const { return shape_; }
    const std::vector<std::uint8_t>& land() const { return land_; }
    const std::vector<TimeStamp>& stamps() const { return stamps_; }
    TimeStamp stamp(int t) const { return stamps_[static_cast<size_t>(t)]; }

    bool is_land(int r, int c) const { return land_[static_cast<size_t>(r) * shape_.cols + c] != 0; }
    bool is_land(int idx) const { return land_[static_cast<size_t>(idx)] != 0; }

    std::span<const double> slab(int t) const {
        return {values_.data() + static_cast<size_t>(t) * shape_.cells(),
                static_cast<size_t>(shape_.cells())};
    }
    std::span<double> slab(int t) {
        return {values_.data() + static_cast<size_t>(t) * shape_.cells(),
                static_cast<size_t>(shape_.cells())};
    }

    double at(int t, int r, int c) const {
        return values_[(static_cast<size_t>(t) * shape_.rows + r) * shape_.cols + c];
    }

    // Materialize one snapshot as a standalone Field (copies the mask).
    Field field(int t) const {
        Field f(shape_);
        f.land = land_;
        auto s = slab(t);
        std::copy(s.begin(), s.end(), f.values.begin());
        return f;
    }

    int sea_count() const {
        int n = 0;
        for (auto v : land_) n += (v == 0);
        return n;
    }

    // Chronological prefix/suffix split at floor(fraction * T).
    std::pair<FieldSeries, FieldSeries> split(double fraction) const;

private:
    GridShape shape_;
    std::vector<std::uint8_t> land_;
    std::vector<double> values_;
    std::vector<TimeStamp> stamps_;
};

// Enumeration of sea cells in row-major order; the coordinate system used by
// decoders and POD bases ("sea vector" space).
struct SeaIndex {
    std::vector<int> cell_of;   // sea index -> flat cell index
    std::vector<int> sea_of;    // flat cell index -> sea index, -1 on land

    explicit SeaIndex(const std::vector<std::uint8_t>& land) {
        sea_of.assign(land.size(), -1);
        for (size_t i = 0; i < land.size(); ++i) {
            if (land[i] == 0) {
                sea_of[i] = static_cast<int>(cell_of.size());
                cell_of.push_back(static_cast<int>(i));
            }
        }
    }

    int count() const { return static_cast<int>(cell_of.size()); }
};

} // namespace entroplace
