#include "entroplace/fsr_io.hpp"

#include <cstring>
#include <fstream>
#include <vector>

#include "entroplace/errors.hpp"

namespace entroplace {

namespace {

void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 24)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

void put_u16(std::ostream& os, std::uint16_t v) {
    unsigned char b[2] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8)};
    os.write(reinterpret_cast<const char*>(b), 2);
}

void put_f32(std::ostream& os, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32(os, bits);
}

std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

std::uint16_t get_u16(std::istream& is) {
    unsigned char b[2];
    is.read(reinterpret_cast<char*>(b), 2);
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

float get_f32(std::istream& is) {
    const std::uint32_t bits = get_u32(is);
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
}

} // namespace

void write_fsr(const std::string& path, const FieldSeries& series) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw data_error("cannot open for writing: " + path);

    const GridShape shape = series.shape();
    os.write("FSR1", 4);
    put_u32(os, static_cast<std::uint32_t>(shape.rows));
    put_u32(os, static_cast<std::uint32_t>(shape.cols));
    put_u32(os, static_cast<std::uint32_t>(series.times()));
    os.write(reinterpret_cast<const char*>(series.land().data()),
             static_cast<std::streamsize>(series.land().size()));

    const float nanf = std::numeric_limits<float>::quiet_NaN();
    for (int t = 0; t < series.times(); ++t) {
        const auto slab = series.slab(t);
        for (size_t i = 0; i < slab.size(); ++i)
            put_f32(os, series.is_land(static_cast<int>(i)) ? nanf
                                                            : static_cast<float>(slab[i]));
    }
    for (const auto& st : series.stamps()) {
        put_u16(os, static_cast<std::uint16_t>(st.year));
        put_u16(os, static_cast<std::uint16_t>(st.day));
    }
    if (!os) throw data_error("write failed: " + path);
}

FieldSeries read_fsr(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw data_error("cannot open: " + path);

    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "FSR1", 4) != 0)
        throw data_error("not an FSR1 file: " + path);

    const auto rows = get_u32(is);
    const auto cols = get_u32(is);
    const auto T = get_u32(is);
    if (!is || rows < 1 || cols < 1)
        throw data_error("corrupt FSR1 header: " + path);

    const GridShape shape{static_cast<int>(rows), static_cast<int>(cols)};
    std::vector<std::uint8_t> land(static_cast<size_t>(shape.cells()));
    is.read(reinterpret_cast<char*>(land.data()), static_cast<std::streamsize>(land.size()));
    for (auto v : land)
        if (v > 1) throw data_error("corrupt land mask: " + path);

    FieldSeries series(shape, land);
    std::vector<std::vector<double>> slabs(T);
    for (std::uint32_t t = 0; t < T; ++t) {
        auto& slab = slabs[t];
        slab.resize(static_cast<size_t>(shape.cells()));
        for (auto& v : slab) v = get_f32(is);
        for (size_t i = 0; i < slab.size(); ++i)
            if (land[i]) slab[i] = kLandSentinel;
    }
    for (std::uint32_t t = 0; t < T; ++t) {
        const int year = get_u16(is);
        const int day = get_u16(is);
        if (!is) throw data_error("truncated FSR1 file: " + path);
        series.append(slabs[t], TimeStamp{year, day});
    }
    if (!is) throw data_error("truncated FSR1 file: " + path);
    return series;
}

} // namespace entroplace
