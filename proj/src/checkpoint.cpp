#include "entroplace/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "entroplace/errors.hpp"

namespace entroplace {

namespace {

void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 24)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_f64(std::ostream& os, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 8);
}

double get_f64(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

} // namespace

void write_checkpoint(const std::string& path, const Checkpoint& sections) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw data_error("cannot open for writing: " + path);
    os.write("CKP1", 4);
    put_u32(os, static_cast<std::uint32_t>(sections.size()));
    for (const auto& [name, mat] : sections) {
        if (name.size() > 8) throw std::invalid_argument("checkpoint: section name too long");
        char buf[8] = {};
        std::memcpy(buf, name.data(), name.size());
        os.write(buf, 8);
        put_u32(os, static_cast<std::uint32_t>(mat.rows()));
        put_u32(os, static_cast<std::uint32_t>(mat.cols()));
        for (Eigen::Index r = 0; r < mat.rows(); ++r)
            for (Eigen::Index c = 0; c < mat.cols(); ++c) put_f64(os, mat(r, c));
    }
    if (!os) throw data_error("write failed: " + path);
}

Checkpoint read_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw data_error("cannot open: " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "CKP1", 4) != 0)
        throw data_error("not a CKP1 checkpoint: " + path);

    Checkpoint out;
    const std::uint32_t count = get_u32(is);
    for (std::uint32_t s = 0; s < count; ++s) {
        char buf[9] = {};
        is.read(buf, 8);
        const std::uint32_t rows = get_u32(is);
        const std::uint32_t cols = get_u32(is);
        if (!is) throw data_error("truncated checkpoint: " + path);
        Eigen::MatrixXd mat(rows, cols);
        for (std::uint32_t r = 0; r < rows; ++r)
            for (std::uint32_t c = 0; c < cols; ++c) mat(r, c) = get_f64(is);
        if (!is) throw data_error("truncated checkpoint: " + path);
        out.emplace(std::string(buf), std::move(mat));
    }
    return out;
}

} // namespace entroplace
