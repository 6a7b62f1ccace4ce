#include "aoa/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace aoa {

namespace {

void check_records(const std::vector<EvalRecord>& records) {
    if (records.empty()) throw std::invalid_argument("metrics need at least one record");
    for (const EvalRecord& r : records) {
        if (r.true_count != 1 && r.true_count != 2)
            throw std::invalid_argument("true source count must be 1 or 2");
        if (r.pred_count != 1 && r.pred_count != 2)
            throw std::invalid_argument("predicted source count must be 1 or 2");
    }
}

} // namespace

double record_squared_error(const EvalRecord& r) {
    if (r.true_count == 1) {
        const double mean = 0.5 * (r.pred_angles_deg[0] + r.pred_angles_deg[1]);
        const double d = mean - r.true_angles_deg[0];
        return d * d;
    }
    const double d1 = r.pred_angles_deg[0] - r.true_angles_deg[0];
    const double d2 = r.pred_angles_deg[1] - r.true_angles_deg[1];
    return d1 * d1 + d2 * d2;
}

double record_abs_error(const EvalRecord& r) {
    if (r.true_count == 1) {
        const double mean = 0.5 * (r.pred_angles_deg[0] + r.pred_angles_deg[1]);
        return std::abs(mean - r.true_angles_deg[0]);
    }
    return std::abs(r.pred_angles_deg[0] - r.true_angles_deg[0]) +
           std::abs(r.pred_angles_deg[1] - r.true_angles_deg[1]);
}

PenalizedErrors penalized_errors(const std::vector<EvalRecord>& records) {
    check_records(records);
    double sq = 0.0, ab = 0.0, sq_norm = 0.0, ab_norm = 0.0;
    for (const EvalRecord& r : records) {
        const double s = record_squared_error(r);
        const double a = record_abs_error(r);
        const double angles = r.true_count == 2 ? 2.0 : 1.0;
        sq += s;
        ab += a;
        sq_norm += s / angles;
        ab_norm += a / angles;
    }
    const double n = static_cast<double>(records.size());
    PenalizedErrors out;
    out.rmse = std::sqrt(sq / n);
    out.mae = ab / n;
    out.rmse_per_angle = std::sqrt(sq_norm / n);
    out.mae_per_angle = ab_norm / n;
    return out;
}

double penalized_rmse(const std::vector<EvalRecord>& records) {
    return penalized_errors(records).rmse;
}

double penalized_mae(const std::vector<EvalRecord>& records) {
    return penalized_errors(records).mae;
}

ConfusionMatrix confusion_matrix(const std::vector<EvalRecord>& records) {
    check_records(records);
    ConfusionMatrix cm;
    for (const EvalRecord& r : records) {
        ++cm.counts[static_cast<std::size_t>(r.pred_count - 1)]
                   [static_cast<std::size_t>(r.true_count - 1)];
        ++cm.column_totals[static_cast<std::size_t>(r.true_count - 1)];
    }
    for (std::size_t col = 0; col < 2; ++col)
        for (std::size_t row = 0; row < 2; ++row)
            cm.percent[row][col] = cm.column_totals[col] == 0
                                       ? 0.0
                                       : 100.0 * static_cast<double>(cm.counts[row][col]) /
                                             static_cast<double>(cm.column_totals[col]);
    return cm;
}

double ConfusionMatrix::accuracy() const {
    const std::size_t total = column_totals[0] + column_totals[1];
    if (total == 0) return 0.0;
    return static_cast<double>(counts[0][0] + counts[1][1]) / static_cast<double>(total);
}

std::string ConfusionMatrix::formatted() const {
    std::ostringstream os;
    os << "                 true L=1     true L=2\n";
    char line[128];
    for (std::size_t row = 0; row < 2; ++row) {
        std::snprintf(line, sizeof(line), "pred L=%zu   %9zu (%6.3f%%) %9zu (%6.3f%%)\n", row + 1,
                      counts[row][0], percent[row][0], counts[row][1], percent[row][1]);
        os << line;
    }
    std::snprintf(line, sizeof(line), "total       %9zu           %9zu\n", column_totals[0],
                  column_totals[1]);
    os << line;
    return os.str();
}

std::vector<CdfPoint> error_cdf(const std::vector<EvalRecord>& records,
                                const std::vector<double>& grid_deg) {
    check_records(records);
    if (grid_deg.empty()) throw std::invalid_argument("cdf grid must be non-empty");
    std::vector<double> errors;
    errors.reserve(records.size());
    for (const EvalRecord& r : records) errors.push_back(std::sqrt(record_squared_error(r)));
    std::sort(errors.begin(), errors.end());
    std::vector<CdfPoint> out;
    out.reserve(grid_deg.size());
    for (double g : grid_deg) {
        const auto it = std::upper_bound(errors.begin(), errors.end(), g);
        out.push_back({g, static_cast<double>(it - errors.begin()) /
                              static_cast<double>(errors.size())});
    }
    return out;
}

std::vector<SnrSweepPoint> snr_sweep(const std::vector<EvalRecord>& records) {
    check_records(records);
    std::map<double, std::vector<EvalRecord>> groups;
    for (const EvalRecord& r : records) groups[r.snr_db].push_back(r);
    std::vector<SnrSweepPoint> out;
    for (const auto& [snr, group] : groups) {
        SnrSweepPoint point;
        point.snr_db = snr;
        point.rmse_deg = penalized_rmse(group);
        point.log10_rmse = std::log10(std::max(point.rmse_deg, 1e-12));
        point.count = group.size();
        out.push_back(point);
    }
    return out;
}

} // namespace aoa
