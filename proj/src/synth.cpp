#include "ozone/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace ozone {

namespace {

constexpr double kHourlyAr = 0.8;

/// AR(1) step keeping the stationary deviation at `sd`.
double ar_step(double prev, double ar, double sd, std::mt19937_64& rng, std::normal_distribution<double>& unit) {
    return ar * prev + std::sqrt(1.0 - ar * ar) * sd * unit(rng);
}

double seasonal(double amplitude, double peak_day, int doy) {
    return amplitude * std::cos(2.0 * std::numbers::pi * (doy - peak_day) / 365.25);
}

bool is_weekend(HourlyStamp s) { return s.weekday() >= 6; }

/// Driver values on [first, first + count).
Eigen::VectorXd generate_driver(const DriverShape& shape, HourlyStamp first, Eigen::Index count,
                                std::mt19937_64& rng) {
    std::normal_distribution<double> unit(0.0, 1.0);
    Eigen::VectorXd out(count);
    double daily = shape.daily_sd * unit(rng);
    double hourly = shape.hourly_sd * unit(rng);
    for (Eigen::Index i = 0; i < count; ++i) {
        const auto stamp = first + i;
        if (i > 0 && stamp.hour() == 0) daily = ar_step(daily, shape.daily_ar, shape.daily_sd, rng, unit);
        if (i > 0) hourly = ar_step(hourly, kHourlyAr, shape.hourly_sd, rng, unit);
        const double t = static_cast<double>(stamp.hours());
        double v = shape.mean + shape.amplitude * std::cos(2.0 * std::numbers::pi * (t - shape.peak_hour) /
                                                           shape.period_hours);
        v += seasonal(shape.seasonal_amplitude, shape.seasonal_peak_day, stamp.day_of_year());
        v += daily + hourly;
        if (is_weekend(stamp)) v += shape.weekend_offset;
        out[i] = std::max(shape.floor, v);
    }
    return out;
}

const DriverShape& shape_of(const SynthConfig& c, const std::string& name) {
    if (name == "no2") return c.no2;
    if (name == "rad") return c.rad;
    if (name == "temp") return c.temp;
    if (name == "wind") return c.wind;
    throw ConfigError("unknown synthetic driver '" + name + "' (expected no2, rad, temp or wind)");
}

void write_shape(std::ostream& os, const std::string& name, const DriverShape& s) {
    os << name << ": mean=" << format_double(s.mean) << " amplitude=" << format_double(s.amplitude) << " peak_hour=" << format_double(s.peak_hour)
       << " period_hours=" << format_double(s.period_hours) << " seasonal_amplitude=" << format_double(s.seasonal_amplitude)
       << " seasonal_peak_day=" << format_double(s.seasonal_peak_day) << " daily_sd=" << format_double(s.daily_sd) << " daily_ar=" << format_double(s.daily_ar)
       << " hourly_sd=" << format_double(s.hourly_sd) << " weekend_offset=" << format_double(s.weekend_offset);
    if (s.floor > -1e299) os << " floor=" << format_double(s.floor);
    os << '\n';
}

}  // namespace

SynthConfig SynthConfig::defaults() {
    SynthConfig c;
    c.start_year = 2008;
    c.years = 5;
    c.seed = 2008;

    c.no2 = {.mean = 32.0, .amplitude = 12.0, .peak_hour = 8.0, .seasonal_amplitude = 6.0,
             .seasonal_peak_day = 15.0, .daily_sd = 9.0, .daily_ar = 0.3, .hourly_sd = 4.0,
             .weekend_offset = -10.0, .floor = 1.0};
    c.rad = {.mean = -150.0, .amplitude = 600.0, .peak_hour = 13.0, .seasonal_amplitude = 180.0,
             .seasonal_peak_day = 172.0, .daily_sd = 160.0, .daily_ar = 0.2, .hourly_sd = 20.0, .floor = 0.0};
    c.temp = {.mean = 16.0, .amplitude = 4.0, .peak_hour = 15.0, .seasonal_amplitude = 7.0,
              .seasonal_peak_day = 200.0, .daily_sd = 2.0, .daily_ar = 0.7, .hourly_sd = 0.5};
    c.wind = {.mean = 4.0, .amplitude = 1.5, .peak_hour = 15.0, .daily_sd = 1.5, .daily_ar = 0.5,
              .hourly_sd = 0.7, .floor = 0.0};

    c.o3.base = 62.0;
    c.o3.diurnal_amplitude = 16.0;
    c.o3.peak_hour = 15.0;
    c.o3.seasonal_amplitude = 12.0;
    c.o3.seasonal_peak_day = 180.0;
    c.o3.weekend_offset = 7.0;
    c.o3.terms = {{"no2", 24, -0.9}, {"rad", 24, 0.025}, {"temp", 24, 1.2}, {"wind", 24, -2.0}};
    c.o3.noise_sd = 6.0;
    c.o3.noise_ar = 0.9;
    c.missing_rate = 0.02;
    return c;
}

void SynthConfig::validate() const {
    if (years < 1) throw ConfigError("synthetic dataset needs years >= 1");
    if (!(missing_rate >= 0.0 && missing_rate < 1.0)) throw ConfigError("missing_rate must lie in [0, 1)");
    if (missing_rate > 0.0 && years < 2) {
        throw ConfigError("missing values need at least 2 years so every blanked slot keeps an observed year");
    }
    for (const auto* s : {&no2, &rad, &temp, &wind}) {
        if (!(s->period_hours > 0.0)) throw ConfigError("driver period_hours must be positive");
        if (!(s->daily_ar >= 0.0 && s->daily_ar < 1.0)) throw ConfigError("driver daily_ar must lie in [0, 1)");
    }
    if (!(o3.noise_ar >= 0.0 && o3.noise_ar < 1.0)) throw ConfigError("o3 noise_ar must lie in [0, 1)");
    if (o3.noise_sd < 0.0) throw ConfigError("o3 noise_sd must be non-negative");
    for (const auto& term : o3.terms) {
        shape_of(*this, term.variable);
        if (term.lag < 0) throw ConfigError("driver lag must be non-negative");
    }
}

Dataset generate(const SynthConfig& config) {
    config.validate();
    const auto start = HourlyStamp::from_civil(config.start_year, 1, 1, 0);
    const auto length = static_cast<Eigen::Index>(start.add_years(config.years) - start);
    int burn = 0;
    for (const auto& term : config.o3.terms) burn = std::max(burn, term.lag);

    std::mt19937_64 rng(config.seed);
    std::normal_distribution<double> unit(0.0, 1.0);

    // drivers start `burn` hours early so lagged terms exist at the first stamp
    const auto first = start - burn;
    const std::vector<std::string> drivers{"no2", "rad", "temp", "wind"};
    std::vector<Eigen::VectorXd> extended;
    for (const auto& name : drivers) extended.push_back(generate_driver(shape_of(config, name), first, length + burn, rng));

    const auto& eq = config.o3;
    Eigen::VectorXd o3(length);
    double noise = eq.noise_sd * unit(rng);
    for (Eigen::Index i = 0; i < length; ++i) {
        const auto stamp = start + i;
        if (i > 0) noise = ar_step(noise, eq.noise_ar, eq.noise_sd, rng, unit);
        double v = eq.base + eq.diurnal_amplitude * std::cos(2.0 * std::numbers::pi * (stamp.hour() - eq.peak_hour) / 24.0);
        v += seasonal(eq.seasonal_amplitude, eq.seasonal_peak_day, stamp.day_of_year());
        for (const auto& term : eq.terms) {
            const auto k = static_cast<std::size_t>(std::find(drivers.begin(), drivers.end(), term.variable) - drivers.begin());
            const double driver = extended[k][burn + i - term.lag];
            v += term.weight * (driver - shape_of(config, term.variable).mean);
        }
        if (is_weekend(stamp)) v += eq.weekend_offset;
        o3[i] = std::max(0.0, v + noise);
    }
    if (!(o3.mean() > 0.0)) throw ConfigError("synthetic o3 has a non-positive mean; adjust base or weights");

    Dataset out(start, length);
    out.add("o3", std::move(o3));
    for (std::size_t k = 0; k < drivers.size(); ++k) out.add(drivers[k], extended[k].tail(length));

    if (config.missing_rate > 0.0) {
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        Dataset blanked(start, length);
        for (const auto& s : out.all()) {
            Eigen::VectorXd values = s.values;
            std::vector<bool> used(ImputationTable::kSlots, false);
            for (Eigen::Index i = 0; i < length; ++i) {
                if (u01(rng) >= config.missing_rate) continue;
                const auto stamp = start + i;
                const auto slot = static_cast<std::size_t>(ImputationTable::slot_index(stamp.day_of_year(), stamp.hour()));
                if (used[slot]) continue;
                used[slot] = true;
                values[i] = kMissing;
            }
            blanked.add(s.name, std::move(values));
        }
        out = std::move(blanked);
    }
    return out;
}

std::string describe(const SynthConfig& config) {
    std::ostringstream os;
    os << "# synthetic hourly dataset\n"
       << "start=" << config.start_year << "-01-01T00:00 years=" << config.years << " seed=" << config.seed
       << " missing_rate=" << format_double(config.missing_rate) << "\n\n"
       << "driver law (t in hours since 1970-01-01T00:00, doy = day of year):\n"
       << "  v(t) = max(floor, mean + amplitude*cos(2*pi*(t - peak_hour)/period_hours)\n"
       << "             + seasonal_amplitude*cos(2*pi*(doy - seasonal_peak_day)/365.25)\n"
       << "             + daily(day) + hourly(t) + weekend_offset*[Sat/Sun])\n"
       << "  daily: AR(1) over days, coefficient daily_ar, stationary sd daily_sd\n"
       << "  hourly: AR(1) over hours, coefficient " << format_double(kHourlyAr) << ", stationary sd hourly_sd\n";
    write_shape(os, "  no2", config.no2);
    write_shape(os, "  rad", config.rad);
    write_shape(os, "  temp", config.temp);
    write_shape(os, "  wind", config.wind);
    const auto& eq = config.o3;
    os << "\nozone law:\n"
       << "  o3(t) = max(0, " << format_double(eq.base) << " + " << format_double(eq.diurnal_amplitude) << "*cos(2*pi*(hour - " << format_double(eq.peak_hour)
       << ")/24)\n"
       << "          + " << format_double(eq.seasonal_amplitude) << "*cos(2*pi*(doy - " << format_double(eq.seasonal_peak_day) << ")/365.25)\n";
    for (const auto& term : eq.terms) {
        os << "          + " << format_double(term.weight) << "*(" << term.variable << "(t-" << term.lag << ") - "
           << format_double(shape_of(config, term.variable).mean) << ")\n";
    }
    os << "          + " << format_double(eq.weekend_offset) << "*[Sat/Sun] + noise(t))\n"
       << "  noise: AR(1) over hours, coefficient " << format_double(eq.noise_ar) << ", stationary sd " << format_double(eq.noise_sd) << "\n";
    return os.str();
}

}  // namespace ozone
