#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ozone/timeseries.hpp"

namespace ozone {

/// Generating law of one driver variable:
///
///   v(t) = max(floor, mean + amplitude cos(2 pi (t - peak_hour) / period_hours)
///                    + seasonal_amplitude cos(2 pi (doy - seasonal_peak_day) / 365.25)
///                    + daily(day) + hourly(t) + weekend_offset [Sat/Sun])
///
/// with t in hours since 1970-01-01T00:00, daily() an AR(1) over days with
/// coefficient daily_ar and stationary deviation daily_sd, and hourly() an
/// AR(1) over hours with coefficient 0.8 and stationary deviation hourly_sd.
struct DriverShape {
    double mean = 0.0;
    double amplitude = 0.0;
    double peak_hour = 0.0;
    double period_hours = 24.0;
    double seasonal_amplitude = 0.0;
    double seasonal_peak_day = 172.0;
    double daily_sd = 0.0;
    double daily_ar = 0.0;
    double hourly_sd = 0.0;
    double weekend_offset = 0.0;
    double floor = -1e300;
};

/// o3 responds to `variable` observed `lag` hours earlier: weight * (v(t - lag) - shape.mean).
struct DriverTerm {
    std::string variable;
    int lag = 24;
    double weight = 0.0;
};

/// o3(t) = max(0, base + diurnal + seasonal + sum of driver terms
///               + weekend_offset [Sat/Sun] + noise(t)),
/// noise an AR(1) over hours with coefficient noise_ar and stationary deviation noise_sd.
struct OzoneEquation {
    double base = 60.0;
    double diurnal_amplitude = 0.0;
    double peak_hour = 15.0;
    double seasonal_amplitude = 0.0;
    double seasonal_peak_day = 180.0;
    double weekend_offset = 0.0;
    std::vector<DriverTerm> terms;
    double noise_sd = 0.0;
    double noise_ar = 0.0;
};

struct SynthConfig {
    int start_year = 2008;
    int years = 5;
    std::uint64_t seed = 1;
    DriverShape no2;
    DriverShape rad;
    DriverShape temp;
    DriverShape wind;
    OzoneEquation o3;
    /// Probability that a slot is blanked. A (day, hour) slot is blanked in at
    /// most one year per variable, so the same-slot mean always exists.
    double missing_rate = 0.0;

    /// The shipped configuration: daytime ozone driven by radiation and
    /// temperature, anticorrelated with NO2, higher on weekends.
    static SynthConfig defaults();

    /// Throws ConfigError on years < 1, missing_rate outside [0, 1), missing
    /// values requested for a single year, or an unknown driver.
    void validate() const;
};

inline const std::vector<std::string>& synth_variables() {
    static const std::vector<std::string> names{"o3", "no2", "rad", "temp", "wind"};
    return names;
}

/// Deterministic for a given config. Variables: o3, no2, rad, temp, wind.
/// Throws ConfigError if the generated o3 mean is not strictly positive.
Dataset generate(const SynthConfig& config);

/// Human-readable record of the generating equations and every config value.
std::string describe(const SynthConfig& config);

}  // namespace ozone
