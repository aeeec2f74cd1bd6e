#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "entroplace/entropy.hpp"
#include "entroplace/errors.hpp"
#include "entroplace/rng.hpp"
#include "entroplace/synth.hpp"

using namespace entroplace;

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kUnitGaussH = 1.4189385332046727; // 0.5 * (1 + ln 2pi)

FieldSeries constant_series(GridShape shape, int T, double value) {
    FieldSeries s(shape, std::vector<std::uint8_t>(static_cast<size_t>(shape.cells()), 0));
    std::vector<double> slab(static_cast<size_t>(shape.cells()), value);
    for (int t = 0; t < T; ++t) s.append(slab, TimeStamp{t / 365 + 1, t % 365 + 1});
    return s;
}

PatchModel handmade_model(const Eigen::VectorXd& mean, const Eigen::MatrixXd& chol, int L) {
    PatchModel model;
    model.ordering = raster_ordering(L);
    PatchBin bin;
    bin.center = {L / 2, L / 2};
    bin.count = 1;
    bin.mean = mean;
    bin.chol = chol;
    bin.shrinkage = 0.0;
    model.bins.push_back(std::move(bin));
    return model;
}

Eigen::MatrixXd random_spd(int d, std::uint64_t seed) {
    const CounterRng rng(seed);
    Eigen::MatrixXd A(d, d);
    std::uint64_t c = 0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) A(i, j) = rng.normal(c++);
    return A * A.transpose() / d + 0.1 * Eigen::MatrixXd::Identity(d, d);
}

// One-bin patch set with the given rows.
PatchSet patches_from_matrix(const Eigen::MatrixXd& rows, int L) {
    PatchSet set;
    set.patch_size = L;
    set.ordering = raster_ordering(L);
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        set.centers.emplace_back(L / 2, L / 2);
        set.time_index.push_back(static_cast<int>(i));
        for (Eigen::Index j = 0; j < rows.cols(); ++j) set.data.push_back(rows(i, j));
    }
    return set;
}

} // namespace

TEST_CASE("per-pixel Gaussian statistics") {
    SUBCASE("constant series has zero sigma") {
        const auto stats = fit_pixel_gaussian(constant_series({3, 3}, 5, 2.5));
        for (int i = 0; i < 9; ++i) {
            CHECK(stats.mu.values[static_cast<size_t>(i)] == doctest::Approx(2.5));
            CHECK(stats.sigma.values[static_cast<size_t>(i)] == doctest::Approx(0.0));
        }
    }
    SUBCASE("alternating +-1 with T=2 gives the unbiased sqrt(2)") {
        FieldSeries s(GridShape{1, 1}, {0});
        s.append(std::vector<double>{-1.0}, {1, 1});
        s.append(std::vector<double>{1.0}, {1, 2});
        const auto stats = fit_pixel_gaussian(s);
        CHECK(stats.mu.values[0] == doctest::Approx(0.0));
        CHECK(stats.sigma.values[0] == doctest::Approx(std::sqrt(2.0)));
    }
    SUBCASE("land cells stay flagged") {
        FieldSeries s(GridShape{1, 2}, {1, 0});
        s.append(std::vector<double>{kLandSentinel, 1.0}, {1, 1});
        s.append(std::vector<double>{kLandSentinel, 3.0}, {1, 2});
        const auto stats = fit_pixel_gaussian(s);
        CHECK(std::isnan(stats.mu.values[0]));
        CHECK(stats.mu.values[1] == doctest::Approx(2.0));
    }
    SUBCASE("fewer than two steps is insufficient") {
        CHECK_THROWS_AS(fit_pixel_gaussian(constant_series({2, 2}, 1, 0.0)), data_error);
    }
}

TEST_CASE("pixel entropy values and monotonicity") {
    FieldSeries s(GridShape{1, 3}, {0, 0, 0});
    s.append(std::vector<double>{0, 0, 0}, {1, 1});
    s.append(std::vector<double>{0, 0, 0}, {1, 2});
    PixelStats stats = fit_pixel_gaussian(s);
    stats.sigma.values = {1.0, 2.0, 0.0};
    const EntropyField H = pixel_entropy(stats);
    CHECK(H.H.values[0] == doctest::Approx(1.418939).epsilon(1e-6));
    CHECK(H.H.values[1] == doctest::Approx(2.112086).epsilon(1e-6));
    CHECK(std::isinf(H.H.values[2]));
    CHECK(H.H.values[2] < 0);

    // Monotone increasing in sigma.
    double prev = -1e300;
    for (double sigma : {0.1, 0.5, 1.0, 3.0, 10.0}) {
        stats.sigma.values = {sigma, sigma, sigma};
        const double h = pixel_entropy(stats).H.values[0];
        CHECK(h > prev);
        prev = h;
    }
}

TEST_CASE("patch model fitting") {
    EntropyConfig cfg;
    cfg.patch_size = 2;
    cfg.scale = 2;
    cfg.min_samples = 8;
    cfg.shrinkage_rel = 1e-3;

    SUBCASE("identical patches give mean v and sqrt(delta) * I") {
        Eigen::MatrixXd rows(10, 4);
        Eigen::VectorXd v(4);
        v << 1.0, -2.0, 0.5, 3.0;
        for (int i = 0; i < 10; ++i) rows.row(i) = v.transpose();
        const PatchModel model = fit_patch_model(patches_from_matrix(rows, 2), cfg);
        REQUIRE(model.bins.size() == 1);
        const auto& bin = model.bins[0];
        CHECK((bin.mean - v).norm() == doctest::Approx(0.0));
        CHECK(bin.shrinkage == doctest::Approx(1e-3)); // absolute floor
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                CHECK(bin.chol(i, j) ==
                      doctest::Approx(i == j ? std::sqrt(1e-3) : 0.0).epsilon(1e-9));
    }
    SUBCASE("iid standard normal pixels recover the identity covariance") {
        const CounterRng rng(99);
        Eigen::MatrixXd rows(10000, 4);
        std::uint64_t c = 0;
        for (int i = 0; i < 10000; ++i)
            for (int j = 0; j < 4; ++j) rows(i, j) = rng.normal(c++);
        const PatchModel model = fit_patch_model(patches_from_matrix(rows, 2), cfg);
        const auto& bin = model.bins[0];
        const Eigen::MatrixXd sigma = bin.chol * bin.chol.transpose();
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                if (i == j)
                    CHECK(sigma(i, i) == doctest::Approx(1.0).epsilon(0.05));
                else
                    CHECK(std::abs(sigma(i, j)) < 0.05);
            }
    }
    SUBCASE("bins below min_samples are dropped with a warning") {
        Eigen::MatrixXd rows(4, 4);
        rows.setZero();
        PatchSet set = patches_from_matrix(rows, 2);
        // A second center far away with too few members.
        set.centers.back() = {30, 30};
        CHECK_THROWS_AS(fit_patch_model(patches_from_matrix(Eigen::MatrixXd::Zero(1, 4), 2), cfg),
                        data_error); // single bin below min_samples: everything dropped
        cfg.min_samples = 3;
        const PatchModel model = fit_patch_model(set, cfg);
        CHECK(model.bins.size() == 1);
        REQUIRE(model.warnings.size() == 1);
        CHECK(model.warnings[0].find("dropped") != std::string::npos);
    }
}

TEST_CASE("patch NLL equals the dense-inverse oracle and both routes agree") {
    SUBCASE("standard normal point mass values") {
        const auto m1 = handmade_model(Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1), 1);
        CHECK(patch_nll(m1, 0, std::vector<double>{0.0}) ==
              doctest::Approx(0.918939).epsilon(1e-6));
        const auto m2 = handmade_model(Eigen::VectorXd::Zero(4), Eigen::MatrixXd::Identity(4, 4), 2);
        CHECK(patch_nll(m2, 0, std::vector<double>{0, 0, 0, 0}) ==
              doctest::Approx(3.675754).epsilon(1e-6));
    }
    SUBCASE("random covariance vs explicit inverse") {
        const int d = 9;
        const Eigen::MatrixXd sigma = random_spd(d, 1234);
        const Eigen::LLT<Eigen::MatrixXd> llt(sigma);
        Eigen::VectorXd mean(d), x(d);
        const CounterRng rng(77);
        for (int i = 0; i < d; ++i) {
            mean(i) = rng.normal(2 * i);
            x(i) = rng.normal(2 * i + 1);
        }
        const auto model = handmade_model(mean, llt.matrixL(), 3);
        const std::vector<double> patch(x.data(), x.data() + d);
        const double got = patch_nll(model, 0, patch);

        const Eigen::VectorXd diff = x - mean;
        const double oracle = 0.5 * diff.dot(sigma.inverse() * diff) +
                              0.5 * std::log(sigma.determinant()) + 0.5 * d * kLog2Pi;
        CHECK(got == doctest::Approx(oracle).epsilon(1e-10));
    }
    SUBCASE("dimension mismatch is rejected") {
        const auto m = handmade_model(Eigen::VectorXd::Zero(4), Eigen::MatrixXd::Identity(4, 4), 2);
        CHECK_THROWS_AS(patch_nll(m, 0, std::vector<double>{1.0, 2.0}), std::invalid_argument);
    }
}

TEST_CASE("closed-form entropy with prefix truncation") {
    SUBCASE("identity covariance gives the unit Gaussian constant at every scale") {
        const auto m = handmade_model(Eigen::VectorXd::Zero(9), Eigen::MatrixXd::Identity(9, 9), 3);
        for (int scale = 1; scale <= 3; ++scale)
            CHECK(entropy_closed_form(m, 0, scale) == doctest::Approx(kUnitGaussH).epsilon(1e-12));
    }
    SUBCASE("diagonal 1,4,9,16 in ordering") {
        Eigen::MatrixXd chol = Eigen::MatrixXd::Zero(4, 4);
        chol.diagonal() << 1.0, 2.0, 3.0, 4.0; // sqrt of the variances
        const auto m = handmade_model(Eigen::VectorXd::Zero(4), chol, 2);
        CHECK(entropy_closed_form(m, 0, 1) == doctest::Approx(kUnitGaussH).epsilon(1e-12));
        // Oracle: (d * const + 0.5 * sum ln sigma_i^2) / d computed by hand.
        const double oracle = (4.0 * kUnitGaussH + 0.5 * std::log(576.0)) / 4.0;
        CHECK(entropy_closed_form(m, 0, 2) == doctest::Approx(oracle).epsilon(1e-12));
        CHECK(oracle == doctest::Approx(2.2134520).epsilon(1e-6));
        CHECK_THROWS_AS(entropy_closed_form(m, 0, 3), std::invalid_argument);
    }
}

TEST_CASE("chain rule: prefix conditional sums equal joint entropies of leading blocks") {
    for (int trial = 0; trial < 20; ++trial) {
        const int d = 9;
        const Eigen::MatrixXd sigma = random_spd(d, 5000 + static_cast<std::uint64_t>(trial));
        const Eigen::LLT<Eigen::MatrixXd> llt(sigma);
        const Eigen::MatrixXd L = llt.matrixL();
        for (int k = 1; k <= d; ++k) {
            double cond_sum = 0.0; // sum of the first k conditional entropies
            for (int i = 0; i < k; ++i)
                cond_sum += 0.5 * std::log(L(i, i) * L(i, i)) + kUnitGaussH;
            // Independent route: LU determinant of the leading principal block.
            const double joint =
                0.5 * std::log(sigma.topLeftCorner(k, k).determinant()) + k * kUnitGaussH;
            CHECK(cond_sum == doctest::Approx(joint).epsilon(1e-10));
        }
    }
}

TEST_CASE("Monte-Carlo entropy") {
    const auto m = handmade_model(Eigen::VectorXd::Zero(4), Eigen::MatrixXd::Identity(4, 4), 2);
    SUBCASE("unit Gaussian at scale 1 lands on the constant") {
        const McResult r = entropy_monte_carlo(m, 0, 1, 100000, 42);
        CHECK(std::abs(r.per_cell - kUnitGaussH) < 0.01);
        CHECK(std::abs(r.per_cell - kUnitGaussH) < 3.0 * r.std_error);
    }
    SUBCASE("single sample is deterministic per seed") {
        const McResult a = entropy_monte_carlo(m, 0, 2, 1, 7);
        const McResult b = entropy_monte_carlo(m, 0, 2, 1, 7);
        CHECK(a.per_cell == b.per_cell);
        const McResult c = entropy_monte_carlo(m, 0, 2, 1, 8);
        CHECK(a.per_cell != c.per_cell);
    }
    SUBCASE("converges to closed form within three standard errors") {
        const Eigen::MatrixXd sigma = random_spd(4, 31337);
        const Eigen::LLT<Eigen::MatrixXd> llt(sigma);
        const auto model = handmade_model(Eigen::VectorXd::Zero(4), llt.matrixL(), 2);
        for (int scale = 1; scale <= 2; ++scale) {
            const double cf = entropy_closed_form(model, 0, scale);
            const McResult r = entropy_monte_carlo(model, 0, scale, 100000, 99);
            CHECK(std::abs(r.per_cell - cf) < 3.0 * r.std_error);
        }
    }
}

TEST_CASE("full-patch entropy is ordering-invariant, prefixes are not") {
    SynthConfig scfg;
    scfg.shape = {20, 20};
    scfg.years = 2;
    scfg.front_row_lo = 6;
    scfg.front_row_hi = 12;
    scfg.seed = 5;
    const FieldSeries series = generate(scfg);

    EntropyConfig cfg;
    cfg.patch_size = 4;
    cfg.scale = 4;
    cfg.bin_stride = 4;
    cfg.min_samples = 32;

    const auto fit_with = [&](OrderingKind kind) {
        const PatchSet p = extract_patches(series, 4, 4, make_ordering(kind, 4));
        EntropyConfig c = cfg;
        c.ordering = kind;
        return fit_patch_model(p, c);
    };
    const PatchModel raster = fit_with(OrderingKind::raster);
    const PatchModel spiral = fit_with(OrderingKind::spiral);
    REQUIRE(raster.bins.size() == spiral.bins.size());
    for (size_t b = 0; b < raster.bins.size(); ++b) {
        const double hr = entropy_closed_form(raster, static_cast<int>(b), 4);
        const double hs = entropy_closed_form(spiral, static_cast<int>(b), 4);
        CHECK(hr == doctest::Approx(hs).epsilon(1e-10));
    }
    // Prefix entropy looks at different cells, so it differs in general.
    double max_prefix_gap = 0.0;
    for (size_t b = 0; b < raster.bins.size(); ++b)
        max_prefix_gap = std::max(
            max_prefix_gap,
            std::abs(entropy_closed_form(raster, static_cast<int>(b), 1) -
                     entropy_closed_form(spiral, static_cast<int>(b), 1)));
    CHECK(max_prefix_gap > 1e-6);
}

TEST_CASE("bootstrap ensembling lowers rerun variance") {
    const CounterRng rng(2024);
    Eigen::MatrixXd rows(400, 4);
    std::uint64_t c = 0;
    for (int i = 0; i < 400; ++i)
        for (int j = 0; j < 4; ++j) rows(i, j) = rng.normal(c++);
    const PatchSet set = patches_from_matrix(rows, 2);
    EntropyConfig cfg;
    cfg.patch_size = 2;
    cfg.scale = 2;
    cfg.min_samples = 8;

    std::vector<double> single, ensemble;
    for (std::uint64_t seed = 1; seed <= 24; ++seed) {
        single.push_back(
            entropy_closed_form(fit_patch_model(set, cfg, derive_seed(seed, "s")), 0, 2));
        double sum = 0.0;
        for (int b = 0; b < 8; ++b)
            sum += entropy_closed_form(
                fit_patch_model(set, cfg, derive_seed(seed, "m" + std::to_string(b))), 0, 2);
        ensemble.push_back(sum / 8);
    }
    auto variance = [](const std::vector<double>& v) {
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        double var = 0.0;
        for (double x : v) var += (x - mean) * (x - mean);
        return var / static_cast<double>(v.size() - 1);
    };
    CHECK(variance(ensemble) < variance(single));
}

TEST_CASE("entropy field end to end") {
    SUBCASE("recovers the high-variability band") {
        SynthConfig scfg;
        scfg.shape = {32, 32};
        scfg.years = 2;
        scfg.front_row_lo = 10;
        scfg.front_row_hi = 20;
        scfg.seed = 3;
        const FieldSeries series = generate(scfg);

        EntropyConfig cfg;
        cfg.patch_size = 8;
        cfg.scale = 4;
        cfg.bin_stride = 4;
        cfg.ensemble = 2;
        cfg.seed = 17;
        const EntropyField H = entropy_field(series, cfg);

        std::vector<double> inside, outside;
        for (int r = 0; r < 32; ++r)
            for (int c2 = 0; c2 < 32; ++c2) {
                const double v = H.H.at(r, c2);
                if (!std::isfinite(v)) continue;
                (r >= scfg.front_row_lo && r <= scfg.front_row_hi ? inside : outside)
                    .push_back(v);
            }
        auto median = [](std::vector<double> v) {
            std::nth_element(v.begin(), v.begin() + static_cast<long>(v.size() / 2), v.end());
            return v[v.size() / 2];
        };
        REQUIRE(!inside.empty());
        REQUIRE(!outside.empty());
        CHECK(median(inside) > median(outside));
    }
    SUBCASE("without bootstrap the ensemble size does not matter") {
        SynthConfig scfg;
        scfg.shape = {20, 20};
        scfg.years = 2;
        scfg.front_row_lo = 6;
        scfg.front_row_hi = 12;
        const FieldSeries series = generate(scfg);
        EntropyConfig cfg;
        cfg.patch_size = 4;
        cfg.scale = 4;
        cfg.bootstrap = false;
        cfg.ensemble = 1;
        const EntropyField h1 = entropy_field(series, cfg);
        cfg.ensemble = 3;
        const EntropyField h3 = entropy_field(series, cfg);
        for (int i = 0; i < 400; ++i) {
            const double a = h1.H.values[static_cast<size_t>(i)];
            const double b = h3.H.values[static_cast<size_t>(i)];
            if (std::isfinite(a) || std::isfinite(b))
                CHECK(a == doctest::Approx(b).epsilon(1e-12));
        }
    }
    SUBCASE("constant series lands on the shrinkage floor") {
        const FieldSeries series = constant_series({12, 12}, 40, 7.0);
        EntropyConfig cfg;
        cfg.patch_size = 8;
        cfg.scale = 2;
        cfg.smooth_window = 1;
        cfg.bootstrap = false;
        cfg.ensemble = 1;
        const EntropyField H = entropy_field(series, cfg);
        const double floor = 0.5 * std::log(2.0 * 3.14159265358979323846 * 1e-3);
        for (int i = 0; i < 144; ++i) {
            const double v = H.H.values[static_cast<size_t>(i)];
            if (std::isfinite(v)) CHECK(v == doctest::Approx(floor).epsilon(1e-9));
        }
    }
}
