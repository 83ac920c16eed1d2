#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "ozone/features.hpp"
#include "ozone/harness.hpp"
#include "ozone/mlp.hpp"
#include "ozone/timeseries.hpp"
#include "ozone/train.hpp"

namespace ozone {

/// A trained forecaster plus the pretreatment it was fitted with.
struct TrainedPipeline {
    FeatureSpec spec;
    ScalingParams scaling;
    ImputationTable imputation;
    MlpModel model;
    TrainHistory history;
};

/// Trains one network for `inputs` on the first config.split.train years,
/// early-stopping on the next config.split.val years. The test split is ignored.
TrainedPipeline train_pipeline(const Dataset& dataset, const ExperimentConfig& config, InputSet inputs,
                               std::uint64_t seed);

/// Directory layout: model.txt, pipeline.json (feature spec, scaling),
/// imputation.csv, history.csv.
void save_pipeline(const TrainedPipeline& pipeline, const std::filesystem::path& dir);
/// Loads what save_pipeline wrote; the history is not restored.
TrainedPipeline load_pipeline(const std::filesystem::path& dir);

struct ForecastRow {
    HourlyStamp stamp;  // forecast valid time
    double predicted;
    double observed;  // kMissing when not observed
};

/// h+24 forecasts for every stamp of `dataset` whose lagged inputs exist,
/// restricted to valid times inside the data span. `dataset` is imputed with
/// the pipeline's table (hour-of-day fallback enabled) before scaling.
std::vector<ForecastRow> predict(const TrainedPipeline& pipeline, const Dataset& dataset);

/// Persistence forecasts x(t+24) = x(t) of `target`. Missing inputs are
/// imputed from the dataset's own same-slot means.
std::vector<ForecastRow> predict_persistence(const Dataset& dataset, std::string_view target);

/// CSV columns timestamp,predicted,observed (observed empty when missing).
void write_forecast(const std::vector<ForecastRow>& rows, std::ostream& out);
std::vector<ForecastRow> read_forecast(std::istream& in);

/// Metrics over rows with an observation.
MetricSet evaluate_forecast(const std::vector<ForecastRow>& rows);

}  // namespace ozone
