#pragma once

#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ozone/errors.hpp"

namespace ozone {

/// Sentinel stored in value vectors for a slot with no measurement.
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double v) { return std::isnan(v); }

inline constexpr int kHoursPerDay = 24;
inline constexpr int kHoursPerYear = 365 * kHoursPerDay;

/// One hour on a fixed-offset local clock (no daylight-saving jumps).
///
/// Internally a count of hours since 1970-01-01T00:00, so consecutive stamps
/// always differ by exactly one unit. Calendar fields are derived on demand
/// under the proleptic Gregorian calendar.
class HourlyStamp {
public:
    HourlyStamp() = default;

    static HourlyStamp from_hours(std::int64_t hours_since_epoch);
    static HourlyStamp from_civil(int year, int month, int day, int hour);

    /// Parses `YYYY-MM-DDTHH:00`. Throws ParseError.
    static HourlyStamp parse(std::string_view text);

    std::int64_t hours() const { return hours_; }

    int year() const;
    int month() const;
    int day() const;
    int day_of_year() const;  // 1..366
    int hour() const;         // 0..23
    int weekday() const;      // 1 = Monday .. 7 = Sunday

    /// Same month, day and hour `n` calendar years later; Feb 29 maps to Mar 1.
    HourlyStamp add_years(int n) const;

    std::string to_string() const;

    HourlyStamp operator+(std::int64_t h) const { return from_hours(hours_ + h); }
    HourlyStamp operator-(std::int64_t h) const { return from_hours(hours_ - h); }
    std::int64_t operator-(const HourlyStamp& other) const { return hours_ - other.hours_; }

    auto operator<=>(const HourlyStamp&) const = default;

private:
    explicit HourlyStamp(std::int64_t h) : hours_(h) {}
    std::int64_t hours_ = 0;
};

/// One named variable sampled hourly from `start`; missing slots hold kMissing.
struct HourlySeries {
    std::string name;
    HourlyStamp start;
    Eigen::VectorXd values;

    Eigen::Index size() const { return values.size(); }
    HourlyStamp stamp(Eigen::Index i) const { return start + i; }
    Eigen::Index missing_count() const { return values.array().isNaN().count(); }
};

/// Time-aligned collection of series sharing one gap-free stamp axis.
class Dataset {
public:
    Dataset() = default;
    Dataset(HourlyStamp start, Eigen::Index length) : start_(start), length_(length) {}

    /// Appends a series. Throws IntegrityError on length mismatch or duplicate name.
    void add(std::string name, Eigen::VectorXd values);

    bool contains(std::string_view name) const;
    /// Throws ConfigError for an unknown name.
    const HourlySeries& series(std::string_view name) const;
    const std::vector<HourlySeries>& all() const { return series_; }
    std::vector<std::string> names() const;

    Eigen::Index size() const { return length_; }
    HourlyStamp start() const { return start_; }
    HourlyStamp last() const { return start_ + (length_ - 1); }
    HourlyStamp stamp(Eigen::Index i) const { return start_ + i; }
    std::optional<Eigen::Index> index_of(HourlyStamp s) const;

    /// Contiguous sub-range [begin, begin + count).
    Dataset slice(Eigen::Index begin, Eigen::Index count) const;

    /// Copy with `name` replaced by `values`.
    Dataset with_values(std::string_view name, Eigen::VectorXd values) const;

private:
    HourlyStamp start_;
    Eigen::Index length_ = 0;
    std::vector<HourlySeries> series_;
};

// ---------------------------------------------------------------------------
// CSV

/// Reads the hourly CSV format: a `timestamp` column (`YYYY-MM-DDTHH:00`)
/// followed by one column per variable; empty cells are missing. Absent
/// hours are inserted as all-missing rows. An empty `schema` loads every
/// column, otherwise only the listed ones (each must be present).
Dataset ingest_csv(const std::filesystem::path& path, const std::vector<std::string>& schema = {});
Dataset parse_csv(std::istream& in, const std::vector<std::string>& schema = {},
                  std::string_view source = "<stream>");

void write_csv(const Dataset& dataset, std::ostream& out);
void write_csv(const Dataset& dataset, const std::filesystem::path& path);

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);
/// Fixed 17-significant-digit text.
std::string format_double17(double v);
/// Strict full-string parse. Throws ParseError.
double parse_double(std::string_view text);

// ---------------------------------------------------------------------------
// Imputation

struct ImputeOptions {
    /// Fill slots with no data in any year from the hour-of-day mean.
    bool hour_of_day_fallback = false;
};

struct MissingSlot {
    std::string variable;
    int day_of_year;
    int hour;
};

/// Raised when a missing slot has no observation at the same (day, hour) in any year.
class UnresolvableSlotError : public DataError {
public:
    explicit UnresolvableSlotError(std::vector<MissingSlot> slots);
    const std::vector<MissingSlot>& slots() const { return slots_; }

private:
    std::vector<MissingSlot> slots_;
};

/// Per-variable means at every (day-of-year, hour) slot, pooled across years.
/// Day 366 shares the day-365 slot.
class ImputationTable {
public:
    static constexpr int kSlots = 365 * kHoursPerDay;

    struct Stats {
        std::vector<double> slot_mean;
        std::vector<int> slot_count;
        std::array<double, kHoursPerDay> hour_mean{};
        std::array<int, kHoursPerDay> hour_count{};
    };

    /// Accumulates statistics over every variable of `dataset`.
    /// Requires at least one full year of data.
    static ImputationTable fit(const Dataset& dataset);

    static int slot_index(int day_of_year, int hour);

    std::optional<double> slot_mean(std::string_view variable, int day_of_year, int hour) const;
    int slot_count(std::string_view variable, int day_of_year, int hour) const;
    std::optional<double> hour_mean(std::string_view variable, int hour) const;

    bool contains(std::string_view variable) const;
    std::vector<std::string> variables() const;

    /// Replaces missing slots of every variable the table knows. Non-missing values are untouched.
    Dataset apply(const Dataset& dataset, const ImputeOptions& options = {}) const;

    /// CSV rows variable,day_of_year,hour,count,mean (mean empty when count is 0).
    /// Rows with day_of_year 0 carry the hour-of-day means.
    void write_csv(std::ostream& out) const;
    static ImputationTable read_csv(std::istream& in);

    const Stats& stats(std::string_view variable) const;

private:
    std::map<std::string, Stats, std::less<>> stats_;
};

/// Fills each missing value with the mean of the same variable at the same
/// day of the year and hour over all years of `dataset`.
Dataset impute_missing(const Dataset& dataset, const ImputeOptions& options = {});

// ---------------------------------------------------------------------------
// Scaling to [-1, 1]

struct ScalingRange {
    double min = 0.0;
    double max = 1.0;

    double forward(double v) const { return 2.0 * (v - min) / (max - min) - 1.0; }
    double inverse(double s) const { return (s + 1.0) * (0.5 * (max - min)) + min; }

    template <typename Derived>
    auto forward(const Eigen::ArrayBase<Derived>& v) const {
        return 2.0 * (v - min) / (max - min) - 1.0;
    }
    template <typename Derived>
    auto inverse(const Eigen::ArrayBase<Derived>& s) const {
        return (s + 1.0) * (0.5 * (max - min)) + min;
    }

    bool operator==(const ScalingRange&) const = default;
};

class ScalingParams {
public:
    void set(std::string name, ScalingRange range);
    bool contains(std::string_view name) const;
    /// Throws ConfigError for an unknown name.
    const ScalingRange& at(std::string_view name) const;
    const std::map<std::string, ScalingRange, std::less<>>& ranges() const { return ranges_; }

    bool operator==(const ScalingParams&) const = default;

private:
    std::map<std::string, ScalingRange, std::less<>> ranges_;
};

/// Records min and max of each named variable over the whole of `dataset`.
ScalingParams fit_scaling(const Dataset& dataset, const std::vector<std::string>& variables);

/// Maps every variable covered by `params` to 2(v-min)/(max-min) - 1, without clipping.
Dataset apply_scaling(const Dataset& dataset, const ScalingParams& params);
Dataset invert_scaling(const Dataset& dataset, const ScalingParams& params);

}  // namespace ozone
