#pragma once

#include <array>
#include <string>
#include <vector>

namespace aoa {

// One scored sample: ground truth against the decoded model (or baseline)
// output. pred_angles always carries both decoded regression outputs,
// ascending; single-angle predictions store the angle twice so the
// head-averaging branch stays exact.
struct EvalRecord {
    int true_count = 1; // 1 or 2
    std::array<double, 2> true_angles_deg{0.0, 0.0};
    int pred_count = 1;
    std::array<double, 2> pred_angles_deg{0.0, 0.0};
    double snr_db = 0.0;
};

// Penalized metrics: misclassified records are scored under the true-count
// branch. The two-source branch sums both per-source errors per record
// before averaging, exactly as defined; the per-angle variant divides that
// sum by two for cross-paper comparability.
struct PenalizedErrors {
    double rmse = 0.0;
    double mae = 0.0;
    double rmse_per_angle = 0.0;
    double mae_per_angle = 0.0;
};

PenalizedErrors penalized_errors(const std::vector<EvalRecord>& records);
double penalized_rmse(const std::vector<EvalRecord>& records);
double penalized_mae(const std::vector<EvalRecord>& records);

// Squared and absolute error contribution of a single record (true-count
// branch).
double record_squared_error(const EvalRecord& record);
double record_abs_error(const EvalRecord& record);

// rows = predicted count, columns = true count, percentages normalized per
// column.
struct ConfusionMatrix {
    std::array<std::array<std::size_t, 2>, 2> counts{{{0, 0}, {0, 0}}};
    std::array<std::array<double, 2>, 2> percent{{{0.0, 0.0}, {0.0, 0.0}}};
    std::array<std::size_t, 2> column_totals{0, 0};

    double accuracy() const;
    std::string formatted() const;
};

ConfusionMatrix confusion_matrix(const std::vector<EvalRecord>& records);

// Empirical CDF of per-record RMSE evaluated on the given grid.
struct CdfPoint {
    double error_deg = 0.0;
    double fraction = 0.0;
};

std::vector<CdfPoint> error_cdf(const std::vector<EvalRecord>& records,
                                const std::vector<double>& grid_deg);

// Penalized RMSE per SNR level, with log10 for the plot output.
struct SnrSweepPoint {
    double snr_db = 0.0;
    double rmse_deg = 0.0;
    double log10_rmse = 0.0;
    std::size_t count = 0;
};

std::vector<SnrSweepPoint> snr_sweep(const std::vector<EvalRecord>& records);

} // namespace aoa
