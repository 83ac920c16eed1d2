#include "ozone/timeseries.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ozone {

namespace {

namespace chr = std::chrono;

constexpr std::int64_t kHoursPerDay64 = 24;

chr::sys_days to_days(std::int64_t hours) {
    // floor division so stamps before 1970 land on the right day
    std::int64_t d = hours / kHoursPerDay64;
    if (hours % kHoursPerDay64 < 0) --d;
    return chr::sys_days{chr::days{d}};
}

chr::year_month_day civil(std::int64_t hours) { return chr::year_month_day{to_days(hours)}; }

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t pos = 0;
    while (true) {
        const auto comma = line.find(',', pos);
        if (comma == std::string_view::npos) {
            cells.push_back(trim(line.substr(pos)));
            break;
        }
        cells.push_back(trim(line.substr(pos, comma - pos)));
        pos = comma + 1;
    }
    return cells;
}

bool parse_int(std::string_view s, int& out) {
    if (s.empty()) return false;
    const auto* end = s.data() + s.size();
    auto [p, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc{} && p == end;
}

}  // namespace

// ---------------------------------------------------------------------------
// HourlyStamp

HourlyStamp HourlyStamp::from_hours(std::int64_t hours_since_epoch) { return HourlyStamp{hours_since_epoch}; }

HourlyStamp HourlyStamp::from_civil(int year, int month, int day, int hour) {
    const chr::year_month_day ymd{chr::year{year}, chr::month{static_cast<unsigned>(month)},
                                  chr::day{static_cast<unsigned>(day)}};
    if (!ymd.ok() || hour < 0 || hour > 23) {
        throw ParseError("invalid calendar date " + std::to_string(year) + "-" + std::to_string(month) + "-" +
                         std::to_string(day) + " hour " + std::to_string(hour));
    }
    const auto days = chr::sys_days{ymd}.time_since_epoch().count();
    return HourlyStamp{static_cast<std::int64_t>(days) * kHoursPerDay64 + hour};
}

HourlyStamp HourlyStamp::parse(std::string_view text) {
    // YYYY-MM-DDTHH:00
    auto fail = [&]() -> HourlyStamp {
        throw ParseError("malformed timestamp '" + std::string(text) + "' (expected YYYY-MM-DDTHH:00)");
    };
    if (text.size() != 16 || text[4] != '-' || text[7] != '-' || text[10] != 'T' || text[13] != ':' ||
        text.substr(14) != "00") {
        return fail();
    }
    int y = 0, m = 0, d = 0, h = 0;
    if (!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), m) || !parse_int(text.substr(8, 2), d) ||
        !parse_int(text.substr(11, 2), h)) {
        return fail();
    }
    try {
        return from_civil(y, m, d, h);
    } catch (const ParseError&) {
        return fail();
    }
}

int HourlyStamp::year() const { return static_cast<int>(civil(hours_).year()); }
int HourlyStamp::month() const { return static_cast<int>(static_cast<unsigned>(civil(hours_).month())); }
int HourlyStamp::day() const { return static_cast<int>(static_cast<unsigned>(civil(hours_).day())); }

int HourlyStamp::day_of_year() const {
    const auto days = to_days(hours_);
    const auto jan1 = chr::sys_days{chr::year_month_day{days}.year() / chr::January / 1};
    return static_cast<int>((days - jan1).count()) + 1;
}

int HourlyStamp::hour() const {
    const auto h = hours_ % kHoursPerDay64;
    return static_cast<int>(h < 0 ? h + kHoursPerDay64 : h);
}

int HourlyStamp::weekday() const { return static_cast<int>(chr::weekday{to_days(hours_)}.iso_encoding()); }

HourlyStamp HourlyStamp::add_years(int n) const {
    const auto ymd = civil(hours_);
    auto target = chr::year_month_day{ymd.year() + chr::years{n}, ymd.month(), ymd.day()};
    // Feb 29 in a non-leap target year rolls to Mar 1
    const auto days = target.ok() ? chr::sys_days{target} : chr::sys_days{target.year() / chr::March / 1};
    return HourlyStamp{static_cast<std::int64_t>(days.time_since_epoch().count()) * kHoursPerDay64 + hour()};
}

std::string HourlyStamp::to_string() const {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:00", year(), month(), day(), hour());
    return buf;
}

// ---------------------------------------------------------------------------
// Dataset

void Dataset::add(std::string name, Eigen::VectorXd values) {
    if (values.size() != length_) {
        throw IntegrityError("series '" + name + "' has " + std::to_string(values.size()) +
                             " values, dataset axis has " + std::to_string(length_));
    }
    if (contains(name)) throw IntegrityError("duplicate series '" + name + "'");
    series_.push_back(HourlySeries{std::move(name), start_, std::move(values)});
}

bool Dataset::contains(std::string_view name) const {
    return std::any_of(series_.begin(), series_.end(), [&](const auto& s) { return s.name == name; });
}

const HourlySeries& Dataset::series(std::string_view name) const {
    for (const auto& s : series_) {
        if (s.name == name) return s;
    }
    throw ConfigError("unknown variable '" + std::string(name) + "'");
}

std::vector<std::string> Dataset::names() const {
    std::vector<std::string> out;
    out.reserve(series_.size());
    for (const auto& s : series_) out.push_back(s.name);
    return out;
}

std::optional<Eigen::Index> Dataset::index_of(HourlyStamp s) const {
    const auto offset = s - start_;
    if (offset < 0 || offset >= length_) return std::nullopt;
    return static_cast<Eigen::Index>(offset);
}

Dataset Dataset::slice(Eigen::Index begin, Eigen::Index count) const {
    if (begin < 0 || count < 0 || begin + count > length_) {
        throw ConfigError("slice [" + std::to_string(begin) + ", " + std::to_string(begin + count) +
                          ") outside dataset of length " + std::to_string(length_));
    }
    Dataset out(start_ + begin, count);
    for (const auto& s : series_) out.add(s.name, s.values.segment(begin, count));
    return out;
}

Dataset Dataset::with_values(std::string_view name, Eigen::VectorXd values) const {
    Dataset out(start_, length_);
    bool found = false;
    for (const auto& s : series_) {
        if (s.name == name) {
            out.add(s.name, values);
            found = true;
        } else {
            out.add(s.name, s.values);
        }
    }
    if (!found) throw ConfigError("unknown variable '" + std::string(name) + "'");
    return out;
}

// ---------------------------------------------------------------------------
// Number formatting

std::string format_double(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, p);
}

std::string format_double17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(std::string_view text) {
    text = trim(text);
    double v = 0.0;
    const auto* end = text.data() + text.size();
    auto [p, ec] = std::from_chars(text.data(), end, v);
    if (text.empty() || ec != std::errc{} || p != end || !std::isfinite(v)) {
        throw ParseError("malformed number '" + std::string(text) + "'");
    }
    return v;
}

// ---------------------------------------------------------------------------
// CSV

Dataset parse_csv(std::istream& in, const std::vector<std::string>& schema, std::string_view source) {
    const std::string src(source);
    std::string line;
    if (!std::getline(in, line)) throw ParseError(src + ": empty file, expected a header row");
    if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);

    const auto header = split_commas(line);
    if (header.empty() || header[0] != "timestamp") {
        throw ParseError(src + ": first header column must be 'timestamp'");
    }
    if (header.size() < 2) throw ParseError(src + ": header names no variable column");

    // column index in file -> output slot
    std::vector<std::string> names;
    std::vector<int> column_slot(header.size(), -1);
    if (schema.empty()) {
        for (std::size_t c = 1; c < header.size(); ++c) {
            const std::string name(header[c]);
            if (name.empty()) throw ParseError(src + ": empty column name in header");
            if (std::find(names.begin(), names.end(), name) != names.end()) {
                throw ParseError(src + ": duplicate column '" + name + "'");
            }
            column_slot[c] = static_cast<int>(names.size());
            names.push_back(name);
        }
    } else {
        for (const auto& want : schema) {
            const auto it = std::find(header.begin() + 1, header.end(), want);
            if (it == header.end()) throw ParseError(src + ": missing column '" + want + "'");
            column_slot[static_cast<std::size_t>(it - header.begin())] = static_cast<int>(names.size());
            names.push_back(want);
        }
    }

    std::vector<std::int64_t> hours;
    std::vector<std::vector<double>> columns(names.size());
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split_commas(line);
        const auto where = src + ":" + std::to_string(line_no);
        if (cells.size() != header.size()) {
            throw ParseError(where + ": expected " + std::to_string(header.size()) + " cells, found " +
                             std::to_string(cells.size()));
        }
        HourlyStamp stamp;
        try {
            stamp = HourlyStamp::parse(cells[0]);
        } catch (const ParseError& e) {
            throw ParseError(where + ": " + e.what());
        }
        if (!hours.empty()) {
            if (stamp.hours() == hours.back()) throw IntegrityError(where + ": duplicate stamp " + stamp.to_string());
            if (stamp.hours() < hours.back()) {
                throw IntegrityError(where + ": stamp " + stamp.to_string() + " is earlier than the previous row");
            }
        }
        hours.push_back(stamp.hours());
        for (std::size_t c = 1; c < cells.size(); ++c) {
            if (column_slot[c] < 0) continue;
            double v = kMissing;
            if (!cells[c].empty()) {
                try {
                    v = parse_double(cells[c]);
                } catch (const ParseError& e) {
                    throw ParseError(where + ", column '" + std::string(header[c]) + "': " + e.what());
                }
            }
            columns[static_cast<std::size_t>(column_slot[c])].push_back(v);
        }
    }
    if (hours.empty()) throw DataError(src + ": no data rows");

    const auto start = HourlyStamp::from_hours(hours.front());
    const auto length = static_cast<Eigen::Index>(hours.back() - hours.front() + 1);
    Dataset dataset(start, length);
    for (std::size_t k = 0; k < names.size(); ++k) {
        Eigen::VectorXd values = Eigen::VectorXd::Constant(length, kMissing);
        for (std::size_t r = 0; r < hours.size(); ++r) values[hours[r] - hours.front()] = columns[k][r];
        dataset.add(names[k], std::move(values));
    }
    return dataset;
}

Dataset ingest_csv(const std::filesystem::path& path, const std::vector<std::string>& schema) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    return parse_csv(in, schema, path.string());
}

void write_csv(const Dataset& dataset, std::ostream& out) {
    out << "timestamp";
    for (const auto& s : dataset.all()) out << ',' << s.name;
    out << '\n';
    for (Eigen::Index i = 0; i < dataset.size(); ++i) {
        out << dataset.stamp(i).to_string();
        for (const auto& s : dataset.all()) {
            out << ',';
            if (!is_missing(s.values[i])) out << format_double(s.values[i]);
        }
        out << '\n';
    }
}

void write_csv(const Dataset& dataset, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    write_csv(dataset, out);
}

// ---------------------------------------------------------------------------
// Imputation

namespace {

std::string describe_slots(const std::vector<MissingSlot>& slots) {
    std::ostringstream os;
    os << slots.size() << " missing slot(s) have no observation in any year:";
    const std::size_t shown = std::min<std::size_t>(slots.size(), 10);
    for (std::size_t i = 0; i < shown; ++i) {
        os << ' ' << slots[i].variable << "(d=" << slots[i].day_of_year << ",h=" << slots[i].hour << ")";
    }
    if (shown < slots.size()) os << " ...";
    return os.str();
}

}  // namespace

UnresolvableSlotError::UnresolvableSlotError(std::vector<MissingSlot> slots)
    : DataError(describe_slots(slots)), slots_(std::move(slots)) {}

int ImputationTable::slot_index(int day_of_year, int hour) {
    return (std::min(day_of_year, 365) - 1) * kHoursPerDay + hour;
}

ImputationTable ImputationTable::fit(const Dataset& dataset) {
    if (dataset.size() < kHoursPerYear) {
        throw DataError("imputation needs at least one full year of hourly data, got " +
                        std::to_string(dataset.size()) + " hours");
    }
    ImputationTable table;
    std::vector<int> slot_of(static_cast<std::size_t>(dataset.size()));
    std::vector<int> hour_of(slot_of.size());
    for (Eigen::Index i = 0; i < dataset.size(); ++i) {
        const auto stamp = dataset.stamp(i);
        hour_of[static_cast<std::size_t>(i)] = stamp.hour();
        slot_of[static_cast<std::size_t>(i)] = slot_index(stamp.day_of_year(), stamp.hour());
    }
    for (const auto& s : dataset.all()) {
        Stats st;
        std::vector<double> slot_sum(kSlots, 0.0);
        std::array<double, kHoursPerDay> hour_sum{};
        st.slot_count.assign(kSlots, 0);
        for (Eigen::Index i = 0; i < s.size(); ++i) {
            const double v = s.values[i];
            if (is_missing(v)) continue;
            const auto k = static_cast<std::size_t>(i);
            slot_sum[static_cast<std::size_t>(slot_of[k])] += v;
            ++st.slot_count[static_cast<std::size_t>(slot_of[k])];
            hour_sum[static_cast<std::size_t>(hour_of[k])] += v;
            ++st.hour_count[static_cast<std::size_t>(hour_of[k])];
        }
        st.slot_mean.assign(kSlots, kMissing);
        for (std::size_t k = 0; k < slot_sum.size(); ++k) {
            if (st.slot_count[k] > 0) st.slot_mean[k] = slot_sum[k] / st.slot_count[k];
        }
        st.hour_mean.fill(kMissing);
        for (std::size_t h = 0; h < hour_sum.size(); ++h) {
            if (st.hour_count[h] > 0) st.hour_mean[h] = hour_sum[h] / st.hour_count[h];
        }
        table.stats_.emplace(s.name, std::move(st));
    }
    return table;
}

const ImputationTable::Stats& ImputationTable::stats(std::string_view variable) const {
    const auto it = stats_.find(variable);
    if (it == stats_.end()) throw ConfigError("imputation table has no variable '" + std::string(variable) + "'");
    return it->second;
}

std::optional<double> ImputationTable::slot_mean(std::string_view variable, int day_of_year, int hour) const {
    const auto& st = stats(variable);
    const auto k = static_cast<std::size_t>(slot_index(day_of_year, hour));
    if (st.slot_count[k] == 0) return std::nullopt;
    return st.slot_mean[k];
}

int ImputationTable::slot_count(std::string_view variable, int day_of_year, int hour) const {
    return stats(variable).slot_count[static_cast<std::size_t>(slot_index(day_of_year, hour))];
}

std::optional<double> ImputationTable::hour_mean(std::string_view variable, int hour) const {
    const auto& st = stats(variable);
    const auto k = static_cast<std::size_t>(hour);
    if (st.hour_count[k] == 0) return std::nullopt;
    return st.hour_mean[k];
}

bool ImputationTable::contains(std::string_view variable) const { return stats_.find(variable) != stats_.end(); }

std::vector<std::string> ImputationTable::variables() const {
    std::vector<std::string> out;
    for (const auto& [name, st] : stats_) out.push_back(name);
    return out;
}

Dataset ImputationTable::apply(const Dataset& dataset, const ImputeOptions& options) const {
    Dataset out(dataset.start(), dataset.size());
    std::vector<MissingSlot> unresolved;
    for (const auto& s : dataset.all()) {
        if (!contains(s.name)) {
            out.add(s.name, s.values);
            continue;
        }
        Eigen::VectorXd values = s.values;
        for (Eigen::Index i = 0; i < values.size(); ++i) {
            if (!is_missing(values[i])) continue;
            const auto stamp = dataset.stamp(i);
            if (auto m = slot_mean(s.name, stamp.day_of_year(), stamp.hour())) {
                values[i] = *m;
            } else if (auto hm = hour_mean(s.name, stamp.hour()); options.hour_of_day_fallback && hm) {
                values[i] = *hm;
            } else {
                const MissingSlot slot{s.name, std::min(stamp.day_of_year(), 365), stamp.hour()};
                const bool seen = std::any_of(unresolved.begin(), unresolved.end(), [&](const MissingSlot& u) {
                    return u.variable == slot.variable && u.day_of_year == slot.day_of_year && u.hour == slot.hour;
                });
                if (!seen) unresolved.push_back(slot);
            }
        }
        out.add(s.name, std::move(values));
    }
    if (!unresolved.empty()) throw UnresolvableSlotError(std::move(unresolved));
    return out;
}

void ImputationTable::write_csv(std::ostream& out) const {
    out << "variable,day_of_year,hour,count,mean\n";
    for (const auto& [name, st] : stats_) {
        for (int h = 0; h < kHoursPerDay; ++h) {
            const auto k = static_cast<std::size_t>(h);
            out << name << ",0," << h << ',' << st.hour_count[k] << ',';
            if (st.hour_count[k] > 0) out << format_double17(st.hour_mean[k]);
            out << '\n';
        }
        for (int d = 1; d <= 365; ++d) {
            for (int h = 0; h < kHoursPerDay; ++h) {
                const auto k = static_cast<std::size_t>(slot_index(d, h));
                out << name << ',' << d << ',' << h << ',' << st.slot_count[k] << ',';
                if (st.slot_count[k] > 0) out << format_double17(st.slot_mean[k]);
                out << '\n';
            }
        }
    }
}

ImputationTable ImputationTable::read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || trim(line) != "variable,day_of_year,hour,count,mean") {
        throw ParseError("imputation table: unexpected header");
    }
    ImputationTable table;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split_commas(line);
        const auto where = "imputation table line " + std::to_string(line_no);
        int day = 0, hour = 0, count = 0;
        if (cells.size() != 5 || cells[0].empty() || !parse_int(cells[1], day) || !parse_int(cells[2], hour) ||
            !parse_int(cells[3], count) || day < 0 || day > 365 || hour < 0 || hour > 23 || count < 0 ||
            (count > 0) == cells[4].empty()) {
            throw ParseError(where + ": malformed row");
        }
        auto [it, inserted] = table.stats_.try_emplace(std::string(cells[0]));
        auto& st = it->second;
        if (inserted) {
            st.slot_mean.assign(kSlots, kMissing);
            st.slot_count.assign(kSlots, 0);
            st.hour_mean.fill(kMissing);
        }
        const double mean = count > 0 ? parse_double(cells[4]) : kMissing;
        if (day == 0) {
            st.hour_mean[static_cast<std::size_t>(hour)] = mean;
            st.hour_count[static_cast<std::size_t>(hour)] = count;
        } else {
            const auto k = static_cast<std::size_t>(slot_index(day, hour));
            st.slot_mean[k] = mean;
            st.slot_count[k] = count;
        }
    }
    return table;
}

Dataset impute_missing(const Dataset& dataset, const ImputeOptions& options) {
    return ImputationTable::fit(dataset).apply(dataset, options);
}

// ---------------------------------------------------------------------------
// Scaling

void ScalingParams::set(std::string name, ScalingRange range) {
    if (!(range.max > range.min)) {
        throw DataError("degenerate scaling range for '" + name + "': max must exceed min");
    }
    ranges_[std::move(name)] = range;
}

bool ScalingParams::contains(std::string_view name) const { return ranges_.find(name) != ranges_.end(); }

const ScalingRange& ScalingParams::at(std::string_view name) const {
    const auto it = ranges_.find(name);
    if (it == ranges_.end()) throw ConfigError("no scaling parameters for '" + std::string(name) + "'");
    return it->second;
}

ScalingParams fit_scaling(const Dataset& dataset, const std::vector<std::string>& variables) {
    ScalingParams params;
    for (const auto& name : variables) {
        const auto& v = dataset.series(name).values;
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            if (is_missing(v[i])) continue;
            lo = std::min(lo, v[i]);
            hi = std::max(hi, v[i]);
        }
        if (!(hi > lo)) {
            throw DataError("degenerate range for '" + name + "': fewer than two distinct non-missing values");
        }
        params.set(name, {lo, hi});
    }
    return params;
}

namespace {

template <typename Map>
Dataset transform(const Dataset& dataset, const ScalingParams& params, Map map) {
    for (const auto& [name, range] : params.ranges()) {
        if (!dataset.contains(name)) throw ConfigError("scaling parameters name unknown variable '" + name + "'");
    }
    Dataset out(dataset.start(), dataset.size());
    for (const auto& s : dataset.all()) {
        if (params.contains(s.name)) {
            out.add(s.name, map(params.at(s.name), s.values));
        } else {
            out.add(s.name, s.values);
        }
    }
    return out;
}

}  // namespace

Dataset apply_scaling(const Dataset& dataset, const ScalingParams& params) {
    return transform(dataset, params, [](const ScalingRange& r, const Eigen::VectorXd& v) -> Eigen::VectorXd {
        return r.forward(v.array()).matrix();
    });
}

Dataset invert_scaling(const Dataset& dataset, const ScalingParams& params) {
    return transform(dataset, params, [](const ScalingRange& r, const Eigen::VectorXd& v) -> Eigen::VectorXd {
        return r.inverse(v.array()).matrix();
    });
}

}  // namespace ozone
