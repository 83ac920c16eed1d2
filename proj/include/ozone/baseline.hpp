#pragma once

#include "ozone/features.hpp"
#include "ozone/timeseries.hpp"

namespace ozone {

/// Forecasts x(t + horizon) = x(t).
struct PersistenceModel {
    int horizon = kHorizonHours;
};

/// The input shifted forward by `horizon` hours: the result starts at
/// series.start + horizon and holds series[0 .. n - horizon). Requires a
/// series without missing values and at least horizon + 1 samples.
HourlySeries persistence_forecast(const HourlySeries& series, int horizon = kHorizonHours);

}  // namespace ozone
