#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ozone/features.hpp"
#include "ozone/metrics.hpp"
#include "ozone/mlp.hpp"
#include "ozone/synth.hpp"
#include "ozone/timeseries.hpp"
#include "ozone/train.hpp"

namespace ozone {

/// Input-data configurations compared in the ablation.
enum class InputSet { o3, o3_no2, o3_no2_met, o3_no2_ti, o3_no2_met_ti };

/// "O3", "O3+NO2", "O3+NO2+MET", "O3+NO2+TI", "O3+NO2+MET+TI"
std::string_view to_string(InputSet set);
/// Throws ConfigError for an unknown label.
InputSet parse_input_set(std::string_view label);
const std::vector<InputSet>& all_input_sets();

struct SplitYears {
    int train = 3;
    int val = 1;
    int test = 1;

    int total() const { return train + val + test; }
};

/// Dataset column names playing each role.
struct VariableRoles {
    std::string o3 = "o3";
    std::string no2 = "no2";
    std::vector<std::string> met{"rad", "temp", "wind"};
};

struct ExperimentConfig {
    std::string station = "synthetic";
    /// Hourly CSV to load; the synthetic generator is used when empty.
    std::optional<std::filesystem::path> data_csv;
    SynthConfig synth = SynthConfig::defaults();
    SplitYears split;
    std::vector<InputSet> input_sets = all_input_sets();
    int runs_per_cell = 7;
    std::uint64_t base_seed = 1;
    int hidden = 12;
    TrainConfig train;
    AmiConfig ami;
    int max_lag = kMaxLagHours;
    int lags_per_predictor = 3;
    VariableRoles variables;
    bool impute_fallback = false;
    /// Worker threads for (input set, run) cells; 0 uses the hardware concurrency.
    int threads = 0;

    void validate() const;
};

/// Reads the JSON experiment description. Relative `data_csv` paths resolve
/// against the config file's directory. Unknown keys are rejected.
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
ExperimentConfig parse_experiment_config(std::string_view json_text,
                                         const std::filesystem::path& base_dir = {});
/// Synthetic-generator settings alone, same JSON shape as the "synth" block.
SynthConfig parse_synth_config(std::string_view json_text);

struct SplitDatasets {
    Dataset train;
    Dataset val;
    Dataset test;
};

/// Consecutive calendar-year slices from the dataset start. Throws
/// ConfigError when the data cover fewer than split.total() years; hours
/// past the end of the test slice are not used. A zero-year test split
/// yields an empty test slice.
SplitDatasets split_chronological(const Dataset& dataset, const SplitYears& split);

struct RunResult {
    int run = 0;
    std::uint64_t seed = 0;
    MetricSet test;
    MlpModel model;
    TrainHistory history;
};

struct CellReport {
    InputSet inputs = InputSet::o3;
    FeatureSpec spec;
    std::vector<RunResult> runs;
    MetricSet mean;
    double seconds = 0.0;
};

struct ExperimentReport {
    std::string station;
    HourlyStamp train_start, val_start, test_start, test_last;
    /// Statistics derived from the training slice only.
    ImputationTable imputation;
    ScalingParams scaling;
    std::vector<AmiCurve> ami_curves;
    std::vector<LagSet> lags;
    MetricSet persistence;
    std::vector<CellReport> cells;
    double seconds = 0.0;
};

/// The predictor variables an input set feeds to the network, target first.
std::vector<std::string> predictors_for(InputSet set, const VariableRoles& roles);

/// Feature layout of one input set given the selected lags.
FeatureSpec spec_for(InputSet set, const ExperimentConfig& config, const std::vector<LagSet>& lags);

/// Everything needed to turn one raw slice into network inputs.
struct PreparedSlices {
    SplitDatasets raw;
    SplitDatasets imputed;  // original units
    SplitDatasets scaled;
    ImputationTable imputation;
    ScalingParams scaling;
    std::vector<AmiCurve> ami_curves;
    std::vector<LagSet> lags;
};

/// Splits, then fits imputation, lag selection and scaling on the training
/// slice alone and applies them to every slice. Only the variables named by
/// config.input_sets are used.
PreparedSlices prepare(const Dataset& dataset, const ExperimentConfig& config);

/// Test-slice metrics of `model` in original units against the raw
/// (non-imputed) observations.
MetricSet evaluate_on(const MlpModel& model, const FeatureSpec& spec, const PreparedSlices& slices,
                      const Dataset& scaled_slice, const Dataset& raw_slice);

ExperimentReport run_experiment(const ExperimentConfig& config);
ExperimentReport run_experiment(const ExperimentConfig& config, const Dataset& dataset);

/// Writes report.csv, runs.csv, report.md, splits.csv, scaling.csv,
/// imputation.csv, lags.csv, ami/<var>.csv, models/ and history/ under `dir`.
void write_report(const ExperimentReport& report, const std::filesystem::path& dir);

/// File-name stem for one trained model, e.g. "O3+NO2_run3".
std::string model_stem(InputSet set, int run);

}  // namespace ozone
