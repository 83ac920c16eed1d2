#include "ozone/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <thread>

#include "ozone/baseline.hpp"

namespace ozone {

namespace {

struct InputSetInfo {
    InputSet set;
    std::string_view label;
    bool no2;
    bool met;
    bool ti;
};

constexpr InputSetInfo kInputSets[] = {
    {InputSet::o3, "O3", false, false, false},
    {InputSet::o3_no2, "O3+NO2", true, false, false},
    {InputSet::o3_no2_met, "O3+NO2+MET", true, true, false},
    {InputSet::o3_no2_ti, "O3+NO2+TI", true, false, true},
    {InputSet::o3_no2_met_ti, "O3+NO2+MET+TI", true, true, true},
};

const InputSetInfo& info(InputSet set) {
    for (const auto& i : kInputSets) {
        if (i.set == set) return i;
    }
    throw ConfigError("unknown input set");
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const LagSet& lags_of(const std::vector<LagSet>& lags, const std::string& name) {
    for (const auto& l : lags) {
        if (l.predictor == name) return l;
    }
    throw ConfigError("no lag selection for '" + name + "'");
}


/// Paired (observed, predicted) in original units, skipping stamps whose raw observation is missing.
MetricSet evaluate_observed(const Eigen::VectorXd& raw_target, const std::vector<Eigen::Index>& target_index,
                            const Eigen::VectorXd& predicted) {
    std::vector<double> o, p;
    for (std::size_t r = 0; r < target_index.size(); ++r) {
        const double v = raw_target[target_index[r]];
        if (is_missing(v)) continue;
        o.push_back(v);
        p.push_back(predicted[static_cast<Eigen::Index>(r)]);
    }
    const Eigen::Map<const Eigen::VectorXd> ov(o.data(), static_cast<Eigen::Index>(o.size()));
    const Eigen::Map<const Eigen::VectorXd> pv(p.data(), static_cast<Eigen::Index>(p.size()));
    return evaluate(ov, pv);
}

/// Runs fn(0..count-1) on up to `threads` workers; rethrows the first failure.
template <typename Fn>
void parallel_for(int count, int threads, Fn fn) {
    if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    threads = std::min(threads, count);
    if (threads <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> workers;
    for (int w = 0; w < threads; ++w) {
        workers.emplace_back([&] {
            for (int i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : workers) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::string_view to_string(InputSet set) { return info(set).label; }

InputSet parse_input_set(std::string_view label) {
    for (const auto& i : kInputSets) {
        if (i.label == label) return i.set;
    }
    throw ConfigError("unknown input set '" + std::string(label) +
                      "' (expected O3, O3+NO2, O3+NO2+MET, O3+NO2+TI or O3+NO2+MET+TI)");
}

const std::vector<InputSet>& all_input_sets() {
    static const std::vector<InputSet> sets{InputSet::o3, InputSet::o3_no2, InputSet::o3_no2_met, InputSet::o3_no2_ti,
                                            InputSet::o3_no2_met_ti};
    return sets;
}

std::vector<std::string> predictors_for(InputSet set, const VariableRoles& roles) {
    const auto& i = info(set);
    std::vector<std::string> names{roles.o3};
    if (i.no2) names.push_back(roles.no2);
    if (i.met) names.insert(names.end(), roles.met.begin(), roles.met.end());
    return names;
}

FeatureSpec spec_for(InputSet set, const ExperimentConfig& config, const std::vector<LagSet>& lags) {
    FeatureSpec spec;
    spec.target = config.variables.o3;
    for (const auto& name : predictors_for(set, config.variables)) spec.predictors.push_back(lags_of(lags, name));
    spec.include_time_indices = info(set).ti;
    return spec;
}

std::string model_stem(InputSet set, int run) { return std::string(to_string(set)) + "_run" + std::to_string(run); }

void ExperimentConfig::validate() const {
    if (split.train < 1 || split.val < 1 || split.test < 1) throw ConfigError("every split needs at least one year");
    if (input_sets.empty()) throw ConfigError("no input sets requested");
    if (runs_per_cell < 1) throw ConfigError("runs_per_cell must be >= 1");
    if (hidden < 1) throw ConfigError("hidden must be >= 1");
    if (max_lag < 0 || max_lag > kMaxLagHours) throw ConfigError("max_lag must lie in [0, 72]");
    if (lags_per_predictor < 1 || lags_per_predictor > max_lag + 1) {
        throw ConfigError("lags_per_predictor must lie in [1, max_lag + 1]");
    }
    if (ami.bins_x < 2 || ami.bins_y < 2) throw ConfigError("AMI needs at least 2 bins");
    train.validate();
    if (!data_csv) synth.validate();
}

SplitDatasets split_chronological(const Dataset& dataset, const SplitYears& split) {
    if (split.train < 1 || split.val < 1 || split.test < 0) {
        throw ConfigError("training and validation need at least one year each");
    }
    const auto start = dataset.start();
    const auto val_start = start.add_years(split.train);
    const auto test_start = val_start.add_years(split.val);
    const auto end = test_start.add_years(split.test);
    if (end - start > dataset.size()) {
        throw ConfigError("split " + std::to_string(split.train) + "/" + std::to_string(split.val) + "/" +
                          std::to_string(split.test) + " needs " + std::to_string(split.total()) +
                          " years but the data span " + dataset.start().to_string() + " .. " +
                          dataset.last().to_string());
    }
    return {dataset.slice(0, val_start - start), dataset.slice(val_start - start, test_start - val_start),
            dataset.slice(test_start - start, end - test_start)};
}

PreparedSlices prepare(const Dataset& dataset, const ExperimentConfig& config) {
    PreparedSlices s;
    s.raw = split_chronological(dataset, config.split);

    std::vector<std::string> used;
    for (const auto set : config.input_sets) {
        for (auto& name : predictors_for(set, config.variables)) {
            if (std::find(used.begin(), used.end(), name) == used.end()) used.push_back(std::move(name));
        }
    }
    Dataset train_vars(s.raw.train.start(), s.raw.train.size());
    for (const auto& name : used) train_vars.add(name, s.raw.train.series(name).values);

    s.imputation = ImputationTable::fit(train_vars);
    const ImputeOptions impute{config.impute_fallback};
    s.imputed = {s.imputation.apply(s.raw.train, impute), s.imputation.apply(s.raw.val, impute),
                 s.imputation.apply(s.raw.test, impute)};

    const auto target = shift_forward(s.imputed.train.series(config.variables.o3), kHorizonHours);
    for (const auto& name : used) {
        auto curve = ami_curve(s.imputed.train.series(name), target, config.max_lag, config.ami);
        s.lags.push_back(select_lags(curve, config.lags_per_predictor));
        s.ami_curves.push_back(std::move(curve));
    }

    s.scaling = fit_scaling(s.imputed.train, used);
    s.scaled = {apply_scaling(s.imputed.train, s.scaling), apply_scaling(s.imputed.val, s.scaling),
                apply_scaling(s.imputed.test, s.scaling)};
    return s;
}

MetricSet evaluate_on(const MlpModel& model, const FeatureSpec& spec, const PreparedSlices& slices,
                      const Dataset& scaled_slice, const Dataset& raw_slice) {
    const auto dm = build_design_matrix(scaled_slice, spec);
    const Eigen::VectorXd predicted = slices.scaling.at(spec.target).inverse(model.predict(dm.inputs).array()).matrix();
    std::vector<Eigen::Index> target_index;
    target_index.reserve(dm.issue_stamps.size());
    for (const auto& stamp : dm.issue_stamps) target_index.push_back(*raw_slice.index_of(stamp + spec.horizon));
    return evaluate_observed(raw_slice.series(spec.target).values, target_index, predicted);
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
    config.validate();
    const Dataset data = config.data_csv ? ingest_csv(*config.data_csv) : generate(config.synth);
    return run_experiment(config, data);
}

ExperimentReport run_experiment(const ExperimentConfig& config, const Dataset& dataset) {
    config.validate();
    const auto t0 = std::chrono::steady_clock::now();
    const PreparedSlices slices = prepare(dataset, config);

    ExperimentReport report;
    report.station = config.station;
    report.train_start = slices.raw.train.start();
    report.val_start = slices.raw.val.start();
    report.test_start = slices.raw.test.start();
    report.test_last = slices.raw.test.last();
    report.imputation = slices.imputation;
    report.scaling = slices.scaling;
    report.ami_curves = slices.ami_curves;
    report.lags = slices.lags;

    {
        const auto& o3 = config.variables.o3;
        const auto forecast = persistence_forecast(slices.imputed.test.series(o3));
        std::vector<Eigen::Index> target_index;
        for (Eigen::Index i = 0; i < forecast.size(); ++i) target_index.push_back(kHorizonHours + i);
        report.persistence = evaluate_observed(slices.raw.test.series(o3).values, target_index, forecast.values);
    }

    struct Matrices {
        FeatureSpec spec;
        DesignMatrix train, val;
    };
    std::vector<Matrices> matrices;
    for (const auto set : config.input_sets) {
        auto spec = spec_for(set, config, slices.lags);
        matrices.push_back({spec, build_design_matrix(slices.scaled.train, spec),
                            build_design_matrix(slices.scaled.val, spec)});
    }

    const int runs = config.runs_per_cell;
    const int cells = static_cast<int>(config.input_sets.size());
    std::vector<RunResult> results(static_cast<std::size_t>(cells * runs));
    std::vector<double> seconds(results.size(), 0.0);
    parallel_for(cells * runs, config.threads, [&](int job) {
        const auto c = static_cast<std::size_t>(job / runs);
        const int run = job % runs;
        const auto& m = matrices[c];
        const auto t_cell = std::chrono::steady_clock::now();
        try {
            RunResult r;
            r.run = run;
            r.seed = config.base_seed + static_cast<std::uint64_t>(run);
            const Topology topo{m.spec.input_count(), config.hidden};
            auto trained = train_lm(init_model(topo, r.seed), m.train.inputs, m.train.targets, m.val.inputs,
                                    m.val.targets, config.train);
            r.model = std::move(trained.model);
            r.history = std::move(trained.history);
            r.test = evaluate_on(r.model, m.spec, slices, slices.scaled.test, slices.raw.test);
            results[static_cast<std::size_t>(job)] = std::move(r);
        } catch (const Error& e) {
            const std::string where = "input set " + std::string(to_string(config.input_sets[c])) + ", run " +
                                      std::to_string(run) + ": " + e.what();
            if (dynamic_cast<const NumericError*>(&e)) throw NumericError(where);
            if (dynamic_cast<const ConfigError*>(&e)) throw ConfigError(where);
            throw DataError(where);
        }
        seconds[static_cast<std::size_t>(job)] = seconds_since(t_cell);
    });

    for (int c = 0; c < cells; ++c) {
        CellReport cell;
        cell.inputs = config.input_sets[static_cast<std::size_t>(c)];
        cell.spec = matrices[static_cast<std::size_t>(c)].spec;
        std::vector<MetricSet> per_run;
        for (int run = 0; run < runs; ++run) {
            const auto k = static_cast<std::size_t>(c * runs + run);
            per_run.push_back(results[k].test);
            cell.seconds += seconds[k];
            cell.runs.push_back(std::move(results[k]));
        }
        cell.mean = average(per_run);
        report.cells.push_back(std::move(cell));
    }
    report.seconds = seconds_since(t0);
    return report;
}

}  // namespace ozone
