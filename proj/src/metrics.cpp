#include "ozone/metrics.hpp"

#include <sstream>

#include "ozone/timeseries.hpp"

namespace ozone {

MetricSet average(std::span<const MetricSet> runs) {
    if (runs.empty()) throw DataError("cannot average zero metric sets");
    MetricSet sum;
    for (const auto& r : runs) {
        sum.rmse += r.rmse;
        sum.nrmse += r.nrmse;
        sum.mae += r.mae;
        sum.ia += r.ia;
    }
    const double n = static_cast<double>(runs.size());
    return {sum.rmse / n, sum.nrmse / n, sum.mae / n, sum.ia / n};
}

std::string report_row(std::string_view station, std::string_view model, std::string_view inputs,
                       const MetricSet& metrics, int runs) {
    std::ostringstream os;
    os << station << ',' << model << ',' << inputs << ',' << format_double17(metrics.rmse) << ','
       << format_double17(100.0 * metrics.nrmse) << ',' << format_double17(metrics.mae) << ','
       << format_double17(metrics.ia) << ',' << runs;
    return os.str();
}

}  // namespace ozone
