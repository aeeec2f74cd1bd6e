#pragma once

#include <string>
#include <vector>

#include "entroplace/grid.hpp"

namespace entroplace {

// Class-4 style verification summary for one reconstruction method.
struct EvalReport {
    std::string method;
    int sensor_count = 0;
    Field bias_field;
    Field rmse_field;
    std::vector<double> bias_series;
    std::vector<double> rmse_series;
    double med_bias = 0.0;
    double med_rmse = 0.0;
};

// Per-cell time-mean of (recon - ref); land excluded, stamps must align.
Field bias_field(const FieldSeries& recon, const FieldSeries& ref);

// Spatial mean over sea cells of (recon - ref), one value per time.
std::vector<double> bias_series(const FieldSeries& recon, const FieldSeries& ref);

// Root of the time-mean (resp. spatial-mean) squared error.
Field rmse_field(const FieldSeries& recon, const FieldSeries& ref);
std::vector<double> rmse_series(const FieldSeries& recon, const FieldSeries& ref);

// Lower median: for even length the smaller of the two central order
// statistics, so reported values always occur in the series.
double lower_median(std::vector<double> series);

EvalReport summarize(const std::string& method, int sensor_count,
                     const FieldSeries& recon, const FieldSeries& ref);

// Table-like text report (method, sensors, MED(Bias), MED(RMSE)) and the
// machine-readable CSV twin.
std::string format_report_table(const std::vector<EvalReport>& reports);
std::string format_report_csv(const std::vector<EvalReport>& reports);

} // namespace entroplace
