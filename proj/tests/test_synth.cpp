#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "entroplace/fsr_io.hpp"
#include "entroplace/synth.hpp"

using namespace entroplace;

namespace {

SynthConfig small_config() {
    SynthConfig cfg;
    cfg.shape = {24, 24};
    cfg.years = 2;
    cfg.front_row_lo = 8;
    cfg.front_row_hi = 15;
    cfg.seed = 11;
    return cfg;
}

std::string file_bytes(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(is), {}};
}

} // namespace

TEST_CASE("same seed yields byte-identical FSR1 files") {
    const auto dir = std::filesystem::temp_directory_path() / "entroplace_synth_test";
    std::filesystem::create_directories(dir);
    const SynthConfig cfg = small_config();
    write_fsr((dir / "a.fsr").string(), generate(cfg));
    write_fsr((dir / "b.fsr").string(), generate(cfg));
    CHECK(file_bytes((dir / "a.fsr").string()) == file_bytes((dir / "b.fsr").string()));

    SynthConfig other = cfg;
    other.seed = 12;
    write_fsr((dir / "c.fsr").string(), generate(other));
    CHECK(file_bytes((dir / "a.fsr").string()) != file_bytes((dir / "c.fsr").string()));
    std::filesystem::remove_all(dir);
}

TEST_CASE("silenced modes, drift and noise leave the pure day-of-year cycle") {
    SynthConfig cfg = small_config();
    cfg.mode_amp = 0.0;
    cfg.drift_amp = 0.0;
    cfg.noise_sigma = 0.0;
    const FieldSeries s = generate(cfg);
    const int T = s.times();
    REQUIRE(T == 2 * 365);
    // Periodic: day d of year 1 equals day d of year 2 at every sea cell.
    for (int t = 0; t < 365; t += 37)
        for (int i = 0; i < s.shape().cells(); ++i) {
            if (s.is_land(i)) continue;
            CHECK(s.slab(t)[static_cast<size_t>(i)] ==
                  doctest::Approx(s.slab(t + 365)[static_cast<size_t>(i)]).epsilon(1e-12));
        }
}

TEST_CASE("single mode with everything else silenced is numerically rank one") {
    SynthConfig cfg = small_config();
    cfg.rank = 1;
    cfg.seasonal_amp = 0.0;
    cfg.drift_amp = 0.0;
    cfg.noise_sigma = 0.0;
    const FieldSeries s = generate(cfg);

    const SeaIndex sea(s.land());
    Eigen::MatrixXd M(sea.count(), s.times());
    for (int t = 0; t < s.times(); ++t)
        for (int i = 0; i < sea.count(); ++i)
            M(i, t) = s.slab(t)[static_cast<size_t>(sea.cell_of[static_cast<size_t>(i)])];
    Eigen::BDCSVD<Eigen::MatrixXd> svd(M);
    const auto& sv = svd.singularValues();
    REQUIRE(sv(0) > 0);
    CHECK(sv(1) < 1e-9 * sv(0));
}

TEST_CASE("front band carries more temporal variance than the rest") {
    const SynthConfig cfg = small_config();
    const FieldSeries s = generate(cfg);
    std::vector<double> inside, outside;
    for (int r = 0; r < cfg.shape.rows; ++r)
        for (int c = 0; c < cfg.shape.cols; ++c) {
            if (s.is_land(r * cfg.shape.cols + c)) continue;
            double sum = 0.0, sq = 0.0;
            for (int t = 0; t < s.times(); ++t) {
                const double v = s.at(t, r, c);
                sum += v;
                sq += v * v;
            }
            const double var = sq / s.times() - (sum / s.times()) * (sum / s.times());
            (r >= cfg.front_row_lo && r <= cfg.front_row_hi ? inside : outside).push_back(var);
        }
    auto median = [](std::vector<double> v) {
        std::nth_element(v.begin(), v.begin() + static_cast<long>(v.size() / 2), v.end());
        return v[v.size() / 2];
    };
    CHECK(median(inside) > median(outside));
}

TEST_CASE("land columns carry no data") {
    SynthConfig cfg = small_config();
    cfg.land_fraction = 0.25;
    const FieldSeries s = generate(cfg);
    const int land_cols = static_cast<int>(0.25 * cfg.shape.cols);
    REQUIRE(land_cols == 6);
    for (int r = 0; r < cfg.shape.rows; ++r)
        for (int c = 0; c < cfg.shape.cols; ++c) {
            CHECK(s.is_land(r, c) == (c < land_cols));
            if (s.is_land(r, c)) CHECK(std::isnan(s.at(0, r, c)));
        }
}

TEST_CASE("invalid configurations are rejected") {
    SynthConfig cfg = small_config();
    cfg.years = 1;
    CHECK_THROWS_AS(generate(cfg), std::invalid_argument);
    cfg = small_config();
    cfg.rank = 0;
    CHECK_THROWS_AS(generate(cfg), std::invalid_argument);
    cfg = small_config();
    cfg.noise_sigma = -1;
    CHECK_THROWS_AS(generate(cfg), std::invalid_argument);
    cfg = small_config();
    cfg.land_fraction = 1.0;
    CHECK_THROWS_AS(generate(cfg), std::invalid_argument);
    cfg = small_config();
    cfg.front_row_hi = cfg.shape.rows;
    CHECK_THROWS_AS(generate(cfg), std::invalid_argument);
}
