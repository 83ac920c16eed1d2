#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ozone/timeseries.hpp"

namespace ozone {

inline constexpr int kHorizonHours = 24;
inline constexpr int kMaxLagHours = 72;

/// Equal-width histogram layout used by ami(). Each axis spans the observed
/// range of its (pairwise non-missing) samples.
struct AmiConfig {
    int bins_x = 16;
    int bins_y = 16;
};

/// Average mutual information in bits between paired samples.
///
/// Pairs where either value is missing are dropped first. Empty joint cells
/// contribute nothing to the sum. Throws DataError when fewer than two pairs
/// remain or either side is constant, ConfigError for bin counts below 2.
double ami(std::span<const double> x, std::span<const double> y, const AmiConfig& config = {});

/// Equal-width bin of `v` among `bins` bins over [lo, hi]; `hi` lands in the top bin.
int equal_width_bin(double v, double lo, double hi, int bins);

struct AmiPoint {
    int lag;
    double bits;
};

struct AmiCurve {
    std::string predictor;
    std::vector<AmiPoint> points;
};

/// AMI between `predictor` delayed by L hours and `target`, for L = 0..max_lag.
/// `target` must already hold the value to be forecast at each stamp.
AmiCurve ami_curve(const HourlySeries& predictor, const HourlySeries& target, int max_lag = kMaxLagHours,
                   const AmiConfig& config = {});

/// Lags (hours) at which one predictor is fed to the network.
struct LagSet {
    std::string predictor;
    std::vector<int> lags;  // strictly increasing, within [0, 72]

    bool operator==(const LagSet&) const = default;
};

/// Picks `k` lags: strict local maxima first, ranked by AMI (ties to the
/// smaller lag), padded with the best remaining lags. Sorted ascending.
LagSet select_lags(const AmiCurve& curve, int k = 3);

struct TimeIndices {
    int weekday;  // 1 = Monday .. 7 = Sunday
    double hour_sin;
    double hour_cos;
};

TimeIndices time_indices(HourlyStamp stamp);

/// One input configuration: which predictors, at which lags, plus time indices.
struct FeatureSpec {
    std::string target = "o3";
    std::vector<LagSet> predictors;
    bool include_time_indices = false;
    int horizon = kHorizonHours;

    int input_count() const;
    int max_lag() const;
    std::vector<std::string> column_names() const;
    /// Throws ConfigError on horizon != 24, bad lags, or an empty predictor list.
    void validate() const;
};

/// Supervised matrices. Row r is issued at `issue_stamps[r]` and forecasts
/// the target at `issue_stamps[r] + horizon`.
struct DesignMatrix {
    Eigen::MatrixXd inputs;
    Eigen::VectorXd targets;
    std::vector<HourlyStamp> issue_stamps;
    std::vector<std::string> columns;

    Eigen::Index rows() const { return inputs.rows(); }
};

/// Weekday 1..7 mapped affinely onto [-1, 1] for use as a network input.
inline double scaled_weekday(int weekday) { return 2.0 * (weekday - 1) / 6.0 - 1.0; }

struct DesignOptions {
    /// Keep rows whose target lies past the end of the data (target = kMissing).
    bool require_target = true;
};

/// Builds inputs and targets for h+24 prediction. Columns: each predictor in
/// spec order expanded by its lags ascending, then scaled weekday, hour_sin,
/// hour_cos of the forecast stamp when time indices are enabled. Rows whose
/// history or target falls outside the span, or touches a missing value,
/// are dropped. Throws DataError if no row survives.
DesignMatrix build_design_matrix(const Dataset& dataset, const FeatureSpec& spec, const DesignOptions& options = {});

/// `series` advanced by `hours`: element t holds the value at t + hours (missing past the end).
HourlySeries shift_forward(const HourlySeries& series, int hours);

}  // namespace ozone
