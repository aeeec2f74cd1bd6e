#include "entroplace/table_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "entroplace/errors.hpp"

namespace entroplace {

std::string format_double(double v) {
    if (std::isnan(v)) return "NaN";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

void write_field_csv(const std::string& path, const Field& field) {
    std::ofstream os(path);
    if (!os) throw data_error("cannot open for writing: " + path);
    for (int r = 0; r < field.shape.rows; ++r) {
        for (int c = 0; c < field.shape.cols; ++c) {
            if (c) os << ',';
            os << (field.is_land(r, c) ? "NaN" : format_double(field.at(r, c)));
        }
        os << '\n';
    }
    if (!os) throw data_error("write failed: " + path);
}

Field read_field_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw data_error("cannot open: " + path);

    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            if (cell == "NaN" || cell == "nan") {
                row.push_back(kLandSentinel);
            } else if (cell == "-inf") {
                row.push_back(-std::numeric_limits<double>::infinity());
            } else if (cell == "inf") {
                row.push_back(std::numeric_limits<double>::infinity());
            } else {
                row.push_back(std::stod(cell));
            }
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw data_error("empty field CSV: " + path);
    const int nr = static_cast<int>(rows.size());
    const int nc = static_cast<int>(rows.front().size());
    for (const auto& r : rows)
        if (static_cast<int>(r.size()) != nc) throw data_error("ragged field CSV: " + path);

    Field f(GridShape{nr, nc});
    for (int r = 0; r < nr; ++r)
        for (int c = 0; c < nc; ++c) {
            const double v = rows[static_cast<size_t>(r)][static_cast<size_t>(c)];
            f.at(r, c) = v;
            if (std::isnan(v)) f.land[static_cast<size_t>(r) * nc + c] = 1;
        }
    return f;
}

void write_field_pgm(const std::string& path, const Field& field) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < field.shape.cells(); ++i) {
        const double v = field.values[static_cast<size_t>(i)];
        if (field.is_land(i) || !std::isfinite(v)) continue;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const bool flat = !(hi > lo);

    std::ofstream os(path, std::ios::binary);
    if (!os) throw data_error("cannot open for writing: " + path);
    os << "P5\n" << field.shape.cols << ' ' << field.shape.rows << "\n255\n";
    for (int i = 0; i < field.shape.cells(); ++i) {
        const double v = field.values[static_cast<size_t>(i)];
        unsigned char px = 0;
        if (!field.is_land(i) && std::isfinite(v))
            px = flat ? 128
                      : static_cast<unsigned char>(
                            std::lround(255.0 * (v - lo) / (hi - lo)));
        os.put(static_cast<char>(px));
    }

    std::ofstream sc(path + ".txt");
    sc << "min=" << format_double(std::isfinite(lo) ? lo : 0.0) << '\n'
       << "max=" << format_double(std::isfinite(hi) ? hi : 0.0) << '\n'
       << "note=linear gray scaling over finite sea cells; land and flagged cells are 0\n";
}

void write_sensor_csv(const std::string& path,
                      const std::vector<std::pair<int, int>>& locations) {
    std::ofstream os(path);
    if (!os) throw data_error("cannot open for writing: " + path);
    os << "row,col\n";
    for (const auto& [r, c] : locations) os << r << ',' << c << '\n';
}

std::vector<std::pair<int, int>> read_sensor_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw data_error("cannot open: " + path);
    std::vector<std::pair<int, int>> out;
    std::string line;
    bool first = true;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (line.rfind("row", 0) == 0) continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw data_error("bad sensor CSV line: " + line);
        out.emplace_back(std::stoi(line.substr(0, comma)), std::stoi(line.substr(comma + 1)));
    }
    return out;
}

} // namespace entroplace
