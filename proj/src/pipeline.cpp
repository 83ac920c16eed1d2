#include "ozone/pipeline.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "ozone/baseline.hpp"
#include "ozone/metrics.hpp"
#include "ozone/mlp_io.hpp"

namespace ozone {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kPipelineFormat = "ozone-pipeline 1";

std::ifstream open_in(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    return in;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    return out;
}

}  // namespace

TrainedPipeline train_pipeline(const Dataset& dataset, const ExperimentConfig& config, InputSet inputs,
                               std::uint64_t seed) {
    ExperimentConfig cfg = config;
    cfg.input_sets = {inputs};
    cfg.split.test = 0;
    const auto slices = prepare(dataset, cfg);

    TrainedPipeline p;
    p.spec = spec_for(inputs, cfg, slices.lags);
    p.scaling = slices.scaling;
    p.imputation = slices.imputation;

    const auto train = build_design_matrix(slices.scaled.train, p.spec);
    const auto val = build_design_matrix(slices.scaled.val, p.spec);
    auto result = train_lm(init_model(Topology{p.spec.input_count(), cfg.hidden}, seed), train.inputs, train.targets,
                           val.inputs, val.targets, cfg.train);
    p.model = std::move(result.model);
    p.history = std::move(result.history);
    return p;
}

void save_pipeline(const TrainedPipeline& pipeline, const fs::path& dir) {
    fs::create_directories(dir);
    write_model(pipeline.model, dir / "model.txt");

    json j;
    j["format"] = kPipelineFormat;
    j["target"] = pipeline.spec.target;
    j["horizon"] = pipeline.spec.horizon;
    j["include_time_indices"] = pipeline.spec.include_time_indices;
    j["predictors"] = json::array();
    for (const auto& l : pipeline.spec.predictors) j["predictors"].push_back({{"name", l.predictor}, {"lags", l.lags}});
    j["scaling"] = json::object();
    for (const auto& [name, r] : pipeline.scaling.ranges()) {
        // decimal strings keep the exact 17-digit text
        j["scaling"][name] = {{"min", format_double17(r.min)}, {"max", format_double17(r.max)}};
    }
    auto out = open_out(dir / "pipeline.json");
    out << j.dump(2) << '\n';

    auto imp = open_out(dir / "imputation.csv");
    pipeline.imputation.write_csv(imp);
    auto hist = open_out(dir / "history.csv");
    write_history(pipeline.history, hist);
}

TrainedPipeline load_pipeline(const fs::path& dir) {
    TrainedPipeline p;
    p.model = read_model(dir / "model.txt");
    {
        auto in = open_in(dir / "pipeline.json");
        json j;
        try {
            j = json::parse(in);
            if (j.at("format").get<std::string>() != kPipelineFormat) throw ParseError("unsupported pipeline format");
            p.spec.target = j.at("target").get<std::string>();
            p.spec.horizon = j.at("horizon").get<int>();
            p.spec.include_time_indices = j.at("include_time_indices").get<bool>();
            for (const auto& pred : j.at("predictors")) {
                p.spec.predictors.push_back({pred.at("name").get<std::string>(), pred.at("lags").get<std::vector<int>>()});
            }
            for (const auto& [name, r] : j.at("scaling").items()) {
                p.scaling.set(name, {parse_double(r.at("min").get<std::string>()),
                                     parse_double(r.at("max").get<std::string>())});
            }
        } catch (const json::exception& e) {
            throw ParseError((dir / "pipeline.json").string() + ": " + e.what());
        }
    }
    p.spec.validate();
    if (p.spec.input_count() != p.model.topology().inputs) {
        throw ParseError("pipeline feature count does not match the model's input count");
    }
    auto imp = open_in(dir / "imputation.csv");
    p.imputation = ImputationTable::read_csv(imp);
    return p;
}

std::vector<ForecastRow> predict(const TrainedPipeline& pipeline, const Dataset& dataset) {
    const Dataset imputed = pipeline.imputation.apply(dataset, ImputeOptions{true});
    const Dataset scaled = apply_scaling(imputed, pipeline.scaling);
    const auto dm = build_design_matrix(scaled, pipeline.spec, DesignOptions{false});
    const auto& target = pipeline.scaling.at(pipeline.spec.target);
    const Eigen::VectorXd predicted = target.inverse(pipeline.model.predict(dm.inputs).array()).matrix();
    const auto& observed = dataset.series(pipeline.spec.target).values;

    std::vector<ForecastRow> rows;
    for (std::size_t r = 0; r < dm.issue_stamps.size(); ++r) {
        const auto valid = dm.issue_stamps[r] + pipeline.spec.horizon;
        const auto idx = dataset.index_of(valid);
        if (!idx) continue;
        rows.push_back({valid, predicted[static_cast<Eigen::Index>(r)], observed[*idx]});
    }
    return rows;
}

std::vector<ForecastRow> predict_persistence(const Dataset& dataset, std::string_view target) {
    const auto& raw = dataset.series(target);
    HourlySeries input = raw;
    if (raw.missing_count() > 0) {
        Dataset single(dataset.start(), dataset.size());
        single.add(raw.name, raw.values);
        input = impute_missing(single, ImputeOptions{true}).series(target);
    }
    const auto forecast = persistence_forecast(input);
    std::vector<ForecastRow> rows;
    for (Eigen::Index i = 0; i < forecast.size(); ++i) {
        rows.push_back({forecast.stamp(i), forecast.values[i], raw.values[kHorizonHours + i]});
    }
    return rows;
}

void write_forecast(const std::vector<ForecastRow>& rows, std::ostream& out) {
    out << "timestamp,predicted,observed\n";
    for (const auto& r : rows) {
        out << r.stamp.to_string() << ',' << format_double(r.predicted) << ',';
        if (!is_missing(r.observed)) out << format_double(r.observed);
        out << '\n';
    }
}

std::vector<ForecastRow> read_forecast(std::istream& in) {
    const auto data = parse_csv(in, {"predicted", "observed"}, "forecast");
    const auto& p = data.series("predicted").values;
    const auto& o = data.series("observed").values;
    std::vector<ForecastRow> rows;
    for (Eigen::Index i = 0; i < data.size(); ++i) {
        if (is_missing(p[i])) continue;  // gap-filled hour
        rows.push_back({data.stamp(i), p[i], o[i]});
    }
    return rows;
}

MetricSet evaluate_forecast(const std::vector<ForecastRow>& rows) {
    std::vector<double> o, p;
    for (const auto& r : rows) {
        if (is_missing(r.observed)) continue;
        o.push_back(r.observed);
        p.push_back(r.predicted);
    }
    const Eigen::Map<const Eigen::VectorXd> ov(o.data(), static_cast<Eigen::Index>(o.size()));
    const Eigen::Map<const Eigen::VectorXd> pv(p.data(), static_cast<Eigen::Index>(p.size()));
    return evaluate(ov, pv);
}

}  // namespace ozone
