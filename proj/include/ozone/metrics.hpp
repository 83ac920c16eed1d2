#pragma once

#include <algorithm>
#include <cmath>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "ozone/errors.hpp"

namespace ozone {

/// Test-phase error indices. `nrmse` is a fraction; reports print it as a percentage.
struct MetricSet {
    double rmse = 0.0;
    double nrmse = 0.0;
    double mae = 0.0;
    double ia = 0.0;

    bool operator==(const MetricSet&) const = default;
};

/// RMSE, RMSE / mean(observed), MAE and Willmott's index of agreement
///
///   IA = 1 - sum (p - o)^2 / sum (|p - obar| + |o - obar|)^2
///
/// IA is clamped to [0, 1] against rounding.
/// Throws DataError for fewer than two pairs, non-finite values, a zero
/// observed mean (nRMSE undefined) or a zero IA denominator.
template <typename DerivedO, typename DerivedP>
MetricSet evaluate(const Eigen::MatrixBase<DerivedO>& observed, const Eigen::MatrixBase<DerivedP>& predicted) {
    if (observed.size() != predicted.size()) {
        throw ConfigError("evaluate: observed and predicted differ in length (" + std::to_string(observed.size()) +
                          " vs " + std::to_string(predicted.size()) + ")");
    }
    if (observed.size() < 2) throw DataError("evaluate needs at least 2 pairs");
    if (!observed.allFinite() || !predicted.allFinite()) throw DataError("evaluate: non-finite values");

    const auto o = observed.derived().template cast<double>().array();
    const auto p = predicted.derived().template cast<double>().array();
    const double n = static_cast<double>(observed.size());
    const double obar = o.sum() / n;

    MetricSet m;
    const double sse = (o - p).square().sum();
    m.rmse = std::sqrt(sse / n);
    m.mae = (o - p).abs().sum() / n;
    if (obar == 0.0) throw DataError("nRMSE undefined: observed mean is zero");
    m.nrmse = m.rmse / obar;
    const double potential = ((p - obar).abs() + (o - obar).abs()).square().sum();
    if (potential == 0.0) throw DataError("IA undefined: every observed and predicted value equals the observed mean");
    m.ia = std::clamp(1.0 - sse / potential, 0.0, 1.0);
    return m;
}

/// Component-wise arithmetic mean.
MetricSet average(std::span<const MetricSet> runs);

/// Header of machine-readable report rows.
inline constexpr std::string_view kReportHeader = "station,model,inputs,rmse,nrmse_pct,mae,ia,runs";

/// One report row at full precision; nrmse_pct = 100 * nrmse.
std::string report_row(std::string_view station, std::string_view model, std::string_view inputs,
                       const MetricSet& metrics, int runs);

}  // namespace ozone
