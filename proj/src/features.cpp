#include "ozone/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace ozone {

int equal_width_bin(double v, double lo, double hi, int bins) {
    const int b = static_cast<int>(std::floor((v - lo) / (hi - lo) * bins));
    return std::clamp(b, 0, bins - 1);
}

double ami(std::span<const double> x, std::span<const double> y, const AmiConfig& config) {
    if (config.bins_x < 2 || config.bins_y < 2) throw ConfigError("AMI needs at least 2 bins per axis");
    if (x.size() != y.size()) {
        throw ConfigError("AMI inputs differ in length (" + std::to_string(x.size()) + " vs " +
                          std::to_string(y.size()) + ")");
    }

    std::vector<std::size_t> usable;
    usable.reserve(x.size());
    double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
    double y_lo = x_lo, y_hi = -x_lo;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (is_missing(x[i]) || is_missing(y[i])) continue;
        usable.push_back(i);
        x_lo = std::min(x_lo, x[i]);
        x_hi = std::max(x_hi, x[i]);
        y_lo = std::min(y_lo, y[i]);
        y_hi = std::max(y_hi, y[i]);
    }
    if (usable.size() < 2) throw DataError("AMI needs at least 2 paired samples, got " + std::to_string(usable.size()));
    if (!(x_hi > x_lo) || !(y_hi > y_lo)) throw DataError("AMI of a constant sequence: degenerate binning");

    const int nx = config.bins_x;
    const int ny = config.bins_y;
    Eigen::MatrixXd joint = Eigen::MatrixXd::Zero(nx, ny);
    for (const auto i : usable) {
        joint(equal_width_bin(x[i], x_lo, x_hi, nx), equal_width_bin(y[i], y_lo, y_hi, ny)) += 1.0;
    }
    joint /= static_cast<double>(usable.size());
    const Eigen::VectorXd px = joint.rowwise().sum();
    const Eigen::RowVectorXd py = joint.colwise().sum();

    double bits = 0.0;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const double p = joint(i, j);
            if (p > 0.0) bits += p * std::log2(p / (px[i] * py[j]));
        }
    }
    return std::max(bits, 0.0);
}

AmiCurve ami_curve(const HourlySeries& predictor, const HourlySeries& target, int max_lag, const AmiConfig& config) {
    if (predictor.start != target.start || predictor.size() != target.size()) {
        throw IntegrityError("ami_curve: series '" + predictor.name + "' and '" + target.name + "' are not aligned");
    }
    if (max_lag < 0) throw ConfigError("max_lag must be non-negative");
    if (max_lag >= predictor.size()) {
        throw DataError("ami_curve: max_lag " + std::to_string(max_lag) + " leaves no samples in a series of length " +
                        std::to_string(predictor.size()));
    }

    AmiCurve curve{predictor.name, {}};
    curve.points.reserve(static_cast<std::size_t>(max_lag) + 1);
    const auto n = static_cast<std::size_t>(predictor.size());
    const std::span<const double> x(predictor.values.data(), n);
    const std::span<const double> y(target.values.data(), n);
    for (int lag = 0; lag <= max_lag; ++lag) {
        const auto L = static_cast<std::size_t>(lag);
        try {
            curve.points.push_back({lag, ami(x.subspan(0, n - L), y.subspan(L), config)});
        } catch (const DataError& e) {
            throw DataError("AMI of '" + predictor.name + "' at lag " + std::to_string(lag) + ": " + e.what());
        }
    }
    return curve;
}

LagSet select_lags(const AmiCurve& curve, int k) {
    const auto& pts = curve.points;
    if (pts.empty()) throw ConfigError("select_lags: empty AMI curve");
    if (k < 1 || static_cast<std::size_t>(k) > pts.size()) {
        throw ConfigError("select_lags: k=" + std::to_string(k) + " outside 1.." + std::to_string(pts.size()));
    }

    // higher AMI first, smaller lag on ties
    auto better = [](const AmiPoint& a, const AmiPoint& b) {
        return a.bits != b.bits ? a.bits > b.bits : a.lag < b.lag;
    };

    std::vector<AmiPoint> peaks, rest;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const bool above_left = i == 0 || pts[i].bits > pts[i - 1].bits;
        const bool above_right = i + 1 == pts.size() || pts[i].bits > pts[i + 1].bits;
        (above_left && above_right ? peaks : rest).push_back(pts[i]);
    }
    std::sort(peaks.begin(), peaks.end(), better);
    std::sort(rest.begin(), rest.end(), better);

    std::vector<int> lags;
    for (const auto& p : peaks) {
        if (lags.size() == static_cast<std::size_t>(k)) break;
        lags.push_back(p.lag);
    }
    for (const auto& p : rest) {
        if (lags.size() == static_cast<std::size_t>(k)) break;
        lags.push_back(p.lag);
    }
    std::sort(lags.begin(), lags.end());
    return LagSet{curve.predictor, std::move(lags)};
}

TimeIndices time_indices(HourlyStamp stamp) {
    const double angle = 2.0 * std::numbers::pi * stamp.hour() / 24.0;
    return {stamp.weekday(), std::sin(angle), std::cos(angle)};
}

int FeatureSpec::input_count() const {
    int n = include_time_indices ? 3 : 0;
    for (const auto& p : predictors) n += static_cast<int>(p.lags.size());
    return n;
}

int FeatureSpec::max_lag() const {
    int m = 0;
    for (const auto& p : predictors) {
        if (!p.lags.empty()) m = std::max(m, p.lags.back());
    }
    return m;
}

std::vector<std::string> FeatureSpec::column_names() const {
    std::vector<std::string> cols;
    for (const auto& p : predictors) {
        for (const int lag : p.lags) cols.push_back(p.predictor + "@" + std::to_string(lag));
    }
    if (include_time_indices) {
        cols.emplace_back("weekday");
        cols.emplace_back("hour_sin");
        cols.emplace_back("hour_cos");
    }
    return cols;
}

void FeatureSpec::validate() const {
    if (horizon != kHorizonHours) {
        throw ConfigError("forecast horizon is fixed at 24 hours, got " + std::to_string(horizon));
    }
    if (predictors.empty()) throw ConfigError("feature spec names no predictor");
    std::set<std::string> seen;
    for (const auto& p : predictors) {
        if (!seen.insert(p.predictor).second) throw ConfigError("predictor '" + p.predictor + "' listed twice");
        if (p.lags.empty()) throw ConfigError("predictor '" + p.predictor + "' has no lags");
        for (std::size_t i = 0; i < p.lags.size(); ++i) {
            if (p.lags[i] < 0 || p.lags[i] > kMaxLagHours) {
                throw ConfigError("lag " + std::to_string(p.lags[i]) + " of '" + p.predictor + "' outside [0, 72]");
            }
            if (i > 0 && p.lags[i] <= p.lags[i - 1]) {
                throw ConfigError("lags of '" + p.predictor + "' are not strictly increasing");
            }
        }
    }
}

DesignMatrix build_design_matrix(const Dataset& dataset, const FeatureSpec& spec, const DesignOptions& options) {
    spec.validate();
    const auto& target = dataset.series(spec.target).values;
    std::vector<const Eigen::VectorXd*> sources;
    for (const auto& p : spec.predictors) sources.push_back(&dataset.series(p.predictor).values);

    const Eigen::Index n = dataset.size();
    const int first = spec.max_lag();
    const Eigen::Index last = options.require_target ? n - 1 - spec.horizon : n - 1;

    std::vector<Eigen::Index> rows;
    for (Eigen::Index t = first; t <= last; ++t) {
        bool ok = true;
        for (std::size_t k = 0; k < sources.size() && ok; ++k) {
            for (const int lag : spec.predictors[k].lags) {
                if (is_missing((*sources[k])[t - lag])) {
                    ok = false;
                    break;
                }
            }
        }
        if (ok && options.require_target && is_missing(target[t + spec.horizon])) ok = false;
        if (ok) rows.push_back(t);
    }
    if (rows.empty()) {
        throw DataError("design matrix is empty: " + std::to_string(n) + " hours cannot cover lag " +
                        std::to_string(first) + " plus horizon " + std::to_string(spec.horizon));
    }

    DesignMatrix dm;
    const auto R = static_cast<Eigen::Index>(rows.size());
    dm.inputs.resize(R, spec.input_count());
    dm.targets.resize(R);
    dm.issue_stamps.reserve(rows.size());
    dm.columns = spec.column_names();
    for (Eigen::Index r = 0; r < R; ++r) {
        const Eigen::Index t = rows[static_cast<std::size_t>(r)];
        Eigen::Index c = 0;
        for (std::size_t k = 0; k < sources.size(); ++k) {
            for (const int lag : spec.predictors[k].lags) dm.inputs(r, c++) = (*sources[k])[t - lag];
        }
        if (spec.include_time_indices) {
            const auto ti = time_indices(dataset.stamp(t + spec.horizon));
            dm.inputs(r, c++) = scaled_weekday(ti.weekday);
            dm.inputs(r, c++) = ti.hour_sin;
            dm.inputs(r, c++) = ti.hour_cos;
        }
        dm.targets[r] = t + spec.horizon < n ? target[t + spec.horizon] : kMissing;
        dm.issue_stamps.push_back(dataset.stamp(t));
    }
    return dm;
}

HourlySeries shift_forward(const HourlySeries& series, int hours) {
    HourlySeries out{series.name, series.start, Eigen::VectorXd::Constant(series.size(), kMissing)};
    const Eigen::Index keep = std::max<Eigen::Index>(series.size() - hours, 0);
    out.values.head(keep) = series.values.segment(hours, keep);
    return out;
}

}  // namespace ozone
