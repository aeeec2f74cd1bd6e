#include "entroplace/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "entroplace/errors.hpp"

namespace entroplace {

namespace {

void check_aligned(const FieldSeries& recon, const FieldSeries& ref) {
    if (!(recon.shape() == ref.shape()) || recon.land() != ref.land())
        throw std::invalid_argument("metrics: grids differ");
    if (recon.stamps() != ref.stamps())
        throw std::invalid_argument("metrics: time stamps are misaligned");
    if (recon.times() == 0) throw std::invalid_argument("metrics: empty series");
}

} // namespace

Field bias_field(const FieldSeries& recon, const FieldSeries& ref) {
    check_aligned(recon, ref);
    const int cells = ref.shape().cells();
    const int T = ref.times();
    Field out(ref.shape(), 0.0);
    out.land = ref.land();

#pragma omp parallel for schedule(static)
    for (int i = 0; i < cells; ++i) {
        if (ref.is_land(i)) {
            out.values[static_cast<size_t>(i)] = kLandSentinel;
            continue;
        }
        double sum = 0.0;
        for (int t = 0; t < T; ++t)
            sum += recon.slab(t)[static_cast<size_t>(i)] - ref.slab(t)[static_cast<size_t>(i)];
        out.values[static_cast<size_t>(i)] = sum / T;
    }
    return out;
}

Field rmse_field(const FieldSeries& recon, const FieldSeries& ref) {
    check_aligned(recon, ref);
    const int cells = ref.shape().cells();
    const int T = ref.times();
    Field out(ref.shape(), 0.0);
    out.land = ref.land();

#pragma omp parallel for schedule(static)
    for (int i = 0; i < cells; ++i) {
        if (ref.is_land(i)) {
            out.values[static_cast<size_t>(i)] = kLandSentinel;
            continue;
        }
        double sum = 0.0;
        for (int t = 0; t < T; ++t) {
            const double d =
                recon.slab(t)[static_cast<size_t>(i)] - ref.slab(t)[static_cast<size_t>(i)];
            sum += d * d;
        }
        out.values[static_cast<size_t>(i)] = std::sqrt(sum / T);
    }
    return out;
}

std::vector<double> bias_series(const FieldSeries& recon, const FieldSeries& ref) {
    check_aligned(recon, ref);
    const int cells = ref.shape().cells();
    std::vector<double> out(static_cast<size_t>(ref.times()));

#pragma omp parallel for schedule(static)
    for (int t = 0; t < ref.times(); ++t) {
        double sum = 0.0;
        int n = 0;
        for (int i = 0; i < cells; ++i) {
            if (ref.is_land(i)) continue;
            sum += recon.slab(t)[static_cast<size_t>(i)] - ref.slab(t)[static_cast<size_t>(i)];
            ++n;
        }
        out[static_cast<size_t>(t)] = sum / n;
    }
    return out;
}

std::vector<double> rmse_series(const FieldSeries& recon, const FieldSeries& ref) {
    check_aligned(recon, ref);
    const int cells = ref.shape().cells();
    std::vector<double> out(static_cast<size_t>(ref.times()));

#pragma omp parallel for schedule(static)
    for (int t = 0; t < ref.times(); ++t) {
        double sum = 0.0;
        int n = 0;
        for (int i = 0; i < cells; ++i) {
            if (ref.is_land(i)) continue;
            const double d =
                recon.slab(t)[static_cast<size_t>(i)] - ref.slab(t)[static_cast<size_t>(i)];
            sum += d * d;
            ++n;
        }
        out[static_cast<size_t>(t)] = std::sqrt(sum / n);
    }
    return out;
}

double lower_median(std::vector<double> series) {
    if (series.empty()) throw std::invalid_argument("median of empty series");
    const size_t idx = (series.size() - 1) / 2;
    std::nth_element(series.begin(), series.begin() + static_cast<long>(idx), series.end());
    return series[idx];
}

EvalReport summarize(const std::string& method, int sensor_count,
                     const FieldSeries& recon, const FieldSeries& ref) {
    EvalReport report;
    report.method = method;
    report.sensor_count = sensor_count;
    report.bias_field = bias_field(recon, ref);
    report.rmse_field = rmse_field(recon, ref);
    report.bias_series = bias_series(recon, ref);
    report.rmse_series = rmse_series(recon, ref);
    report.med_bias = lower_median(report.bias_series);
    report.med_rmse = lower_median(report.rmse_series);
    return report;
}

std::string format_report_table(const std::vector<EvalReport>& reports) {
    char line[160];
    std::string out;
    std::snprintf(line, sizeof(line), "%-22s %10s %12s %12s\n", "Method", "Sensors",
                  "MED(Bias)", "MED(RMSE)");
    out += line;
    out += std::string(58, '-') + "\n";
    for (const auto& r : reports) {
        std::snprintf(line, sizeof(line), "%-22s %10d %12.4f %12.4f\n", r.method.c_str(),
                      r.sensor_count, r.med_bias, r.med_rmse);
        out += line;
    }
    return out;
}

std::string format_report_csv(const std::vector<EvalReport>& reports) {
    std::string out = "method,sensors,med_bias,med_rmse\n";
    char line[160];
    for (const auto& r : reports) {
        std::snprintf(line, sizeof(line), "%s,%d,%.6f,%.6f\n", r.method.c_str(),
                      r.sensor_count, r.med_bias, r.med_rmse);
        out += line;
    }
    return out;
}

} // namespace entroplace
