#include "ozone/baseline.hpp"

namespace ozone {

HourlySeries persistence_forecast(const HourlySeries& series, int horizon) {
    if (horizon != kHorizonHours) {
        throw ConfigError("persistence horizon is fixed at 24 hours, got " + std::to_string(horizon));
    }
    if (series.size() < horizon + 1) {
        throw DataError("persistence needs at least " + std::to_string(horizon + 1) + " samples, got " +
                        std::to_string(series.size()));
    }
    if (series.missing_count() > 0) {
        throw DataError("persistence input '" + series.name + "' has missing values; impute first");
    }
    return HourlySeries{series.name, series.start + horizon, series.values.head(series.size() - horizon)};
}

}  // namespace ozone
