// ozonecast: 24 h-ahead hourly ozone forecasting from the command line.

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "ozone/baseline.hpp"
#include "ozone/features.hpp"
#include "ozone/harness.hpp"
#include "ozone/metrics.hpp"
#include "ozone/pipeline.hpp"
#include "ozone/synth.hpp"
#include "ozone/timeseries.hpp"

namespace fs = std::filesystem;
using namespace ozone;

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kNumeric = 3 };

constexpr const char* kSeriesSchema =
    "Series CSV: UTF-8, comma-delimited, one header row. First column `timestamp`\n"
    "(YYYY-MM-DDTHH:00, local time, hourly, strictly increasing), then one column per\n"
    "variable (e.g. o3,no2,rad,temp,wind). An empty cell is a missing value; absent\n"
    "hours are treated as missing.\n";

constexpr const char* kForecastSchema =
    "Forecast CSV: header `timestamp,predicted,observed`. `timestamp` is the valid time\n"
    "of the 24 h-ahead forecast (YYYY-MM-DDTHH:00); `observed` is empty when the target\n"
    "was not measured at that hour.\n";

constexpr const char* kAmiSchema =
    "AMI CSV: header `lag,ami_bits`, one row per lag 0..max-lag. Row L holds the average\n"
    "mutual information (bits) between predictor(t-L) and target(t+horizon).\n";

constexpr const char* kReportSchema =
    "Metrics CSV: header `station,model,inputs,rmse,nrmse_pct,mae,ia,runs` then one row;\n"
    "numbers use 17 significant digits, nrmse_pct is RMSE / mean(observed) * 100.\n";

constexpr const char* kModelLayout =
    "Model directory: model.txt (network parameters), pipeline.json (lags, time indices,\n"
    "scaling ranges), imputation.csv (`variable,day_of_year,hour,count,mean`, rows with\n"
    "day_of_year 0 hold hour-of-day means), history.csv (`epoch,train_mse,val_mse,damping`).\n";

void add_horizon(CLI::App* cmd, int& horizon) {
    cmd->add_option("--horizon", horizon, "Forecast horizon in hours (only 24 is supported)")
        ->default_val(kHorizonHours)
        ->check(CLI::IsMember({kHorizonHours}));
}

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    return out;
}

std::ifstream open_in(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    return in;
}

std::string read_text(const fs::path& path) {
    auto in = open_in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<int> years;
    std::optional<int> start_year;
    std::optional<double> missing_rate;
    std::string out;
};

void cmd_generate(const GenerateArgs& a) {
    SynthConfig cfg = a.config.empty() ? SynthConfig::defaults() : parse_synth_config(read_text(a.config));
    if (a.seed) cfg.seed = *a.seed;
    if (a.years) cfg.years = *a.years;
    if (a.start_year) cfg.start_year = *a.start_year;
    if (a.missing_rate) cfg.missing_rate = *a.missing_rate;
    const auto data = generate(cfg);
    {
        auto out = open_out(a.out);
        write_csv(data, out);
    }
    auto eq = open_out(a.out + ".equation.txt");
    eq << describe(cfg);
}

struct AmiArgs {
    std::string data;
    std::string predictor;
    std::string target = "o3";
    int max_lag = kMaxLagHours;
    int bins = 16;
    int horizon = kHorizonHours;
    int select = 0;
    std::string out;
};

void cmd_ami(const AmiArgs& a) {
    const auto data = ingest_csv(a.data);
    const auto target = shift_forward(data.series(a.target), a.horizon);
    const auto curve = ami_curve(data.series(a.predictor), target, a.max_lag, AmiConfig{a.bins, a.bins});
    auto out = open_out(a.out);
    out << "lag,ami_bits\n";
    for (const auto& p : curve.points) out << p.lag << ',' << format_double17(p.bits) << '\n';
    if (a.select > 0) {
        const auto lags = select_lags(curve, a.select);
        std::cout << a.predictor << " lags:";
        for (int l : lags.lags) std::cout << ' ' << l;
        std::cout << '\n';
    }
}

struct ModelArgs {
    std::string config;
    std::string data;
    std::string inputs = "O3+NO2+MET+TI";
    std::uint64_t seed = 1;
    std::optional<int> hidden, patience, max_epochs, bins, max_lag, lags_per_predictor, train_years, val_years;
    int horizon = kHorizonHours;
    std::string out;
};

void add_model_flags(CLI::App* cmd, ModelArgs& a) {
    cmd->add_option("--config", a.config, "Experiment config JSON supplying defaults for the flags below");
    cmd->add_option("--data", a.data, "Series CSV holding at least train+val years")->required();
    cmd->add_option("--inputs", a.inputs, "Input set: O3, O3+NO2, O3+NO2+MET, O3+NO2+TI, O3+NO2+MET+TI")
        ->capture_default_str();
    cmd->add_option("--seed", a.seed, "Weight-initialisation seed")->capture_default_str();
    cmd->add_option("--hidden", a.hidden, "Hidden neurons (default 12)");
    cmd->add_option("--patience", a.patience, "Early-stopping patience in epochs (default 6)");
    cmd->add_option("--max-epochs", a.max_epochs, "Epoch cap (default 1000)");
    cmd->add_option("--bins", a.bins, "AMI histogram bins per axis (default 16)");
    cmd->add_option("--max-lag", a.max_lag, "Largest lag scanned, hours (default 72)");
    cmd->add_option("--lags-per-predictor", a.lags_per_predictor, "Lags kept per predictor (default 3)");
    cmd->add_option("--train-years", a.train_years, "Training years from the series start (default 3)");
    cmd->add_option("--val-years", a.val_years, "Validation years after training (default 1)");
    add_horizon(cmd, a.horizon);
    cmd->add_option("--out", a.out, "Output model directory")->required();
}

ExperimentConfig model_config(const ModelArgs& a) {
    ExperimentConfig c = a.config.empty() ? ExperimentConfig{} : load_experiment_config(a.config);
    if (a.hidden) c.hidden = *a.hidden;
    if (a.patience) c.train.patience = *a.patience;
    if (a.max_epochs) c.train.max_epochs = *a.max_epochs;
    if (a.bins) c.ami = AmiConfig{*a.bins, *a.bins};
    if (a.max_lag) c.max_lag = *a.max_lag;
    if (a.lags_per_predictor) c.lags_per_predictor = *a.lags_per_predictor;
    if (a.train_years) c.split.train = *a.train_years;
    if (a.val_years) c.split.val = *a.val_years;
    c.data_csv = a.data;
    c.validate();
    return c;
}

void cmd_train(const ModelArgs& a) {
    const auto cfg = model_config(a);
    const auto data = ingest_csv(a.data);
    const auto pipeline = train_pipeline(data, cfg, parse_input_set(a.inputs), a.seed);
    save_pipeline(pipeline, a.out);
    const auto& h = pipeline.history;
    std::cout << "best epoch " << h.best_epoch << " of " << h.epochs.size() << " (" << to_string(h.stop_reason)
              << "), validation MSE " << format_double(h.epochs.at(static_cast<std::size_t>(h.best_epoch - 1)).val_mse)
              << '\n';
}

struct PredictArgs {
    std::string model;
    std::string data;
    std::string target = "o3";
    int horizon = kHorizonHours;
    std::string out;
};

void cmd_predict(const PredictArgs& a) {
    const auto data = ingest_csv(a.data);
    const auto rows = a.model == "persistence" ? predict_persistence(data, a.target)
                                               : predict(load_pipeline(a.model), data);
    auto out = open_out(a.out);
    write_forecast(rows, out);
}

struct EvaluateArgs {
    std::string forecast;
    std::string station = "station";
    std::string model_name = "MLP";
    std::string inputs = "O3";
    std::string out;
};

void cmd_evaluate(const EvaluateArgs& a) {
    auto in = open_in(a.forecast);
    const auto metrics = evaluate_forecast(read_forecast(in));
    auto out = open_out(a.out);
    out << kReportHeader << '\n' << report_row(a.station, a.model_name, a.inputs, metrics, 1) << '\n';
}

struct ExperimentArgs {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads, runs, hidden, patience, bins, max_lag, lags_per_predictor;
    int horizon = kHorizonHours;
    std::string out;
};

void cmd_experiment(const ExperimentArgs& a) {
    ExperimentConfig c = a.config.empty() ? ExperimentConfig{} : load_experiment_config(a.config);
    if (a.seed) c.base_seed = *a.seed;
    if (a.threads) c.threads = *a.threads;
    if (a.runs) c.runs_per_cell = *a.runs;
    if (a.hidden) c.hidden = *a.hidden;
    if (a.patience) c.train.patience = *a.patience;
    if (a.bins) c.ami = AmiConfig{*a.bins, *a.bins};
    if (a.max_lag) c.max_lag = *a.max_lag;
    if (a.lags_per_predictor) c.lags_per_predictor = *a.lags_per_predictor;
    const auto report = run_experiment(c);
    write_report(report, a.out);
    std::cout << "wrote " << (fs::path(a.out) / "report.csv").string() << " in " << format_double(report.seconds)
              << " s\n";
}

int run_guarded(const std::function<void()>& fn) {
    try {
        fn();
        return kOk;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kUsage;
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kNumeric;
    } catch (const Error& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kData;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"24 h-ahead hourly ozone forecasting with a Levenberg-Marquardt trained MLP"};
    app.require_subcommand(1);
    app.footer(std::string("\n") + kSeriesSchema + "\nExit codes: 0 success, 1 usage or configuration error, "
                                                    "2 data error or unreadable file, 3 numeric failure.");

    GenerateArgs gen;
    auto* generate_cmd = app.add_subcommand("generate", "Write a synthetic multi-year hourly dataset");
    generate_cmd->add_option("--config", gen.config, "Synthetic generator JSON (same shape as the config's synth block)");
    generate_cmd->add_option("--seed", gen.seed, "Random seed");
    generate_cmd->add_option("--years", gen.years, "Number of calendar years");
    generate_cmd->add_option("--start-year", gen.start_year, "First calendar year");
    generate_cmd->add_option("--missing-rate", gen.missing_rate, "Fraction of hours blanked per variable");
    generate_cmd->add_option("--out", gen.out, "Output series CSV; the equation goes to <out>.equation.txt")
        ->required();
    generate_cmd->footer(std::string("\n") + kSeriesSchema);

    AmiArgs ami_args;
    auto* ami_cmd = app.add_subcommand("ami", "Average mutual information of a predictor against the target");
    ami_cmd->add_option("--data", ami_args.data, "Series CSV")->required();
    ami_cmd->add_option("--predictor", ami_args.predictor, "Predictor column")->required();
    ami_cmd->add_option("--target", ami_args.target, "Target column")->capture_default_str();
    ami_cmd->add_option("--max-lag", ami_args.max_lag, "Largest lag in hours (0..72)")->capture_default_str();
    ami_cmd->add_option("--bins", ami_args.bins, "Equal-width histogram bins per axis")->capture_default_str();
    ami_cmd->add_option("--lags-per-predictor", ami_args.select, "Also print the selected lags to stdout");
    add_horizon(ami_cmd, ami_args.horizon);
    ami_cmd->add_option("--out", ami_args.out, "Output AMI CSV")->required();
    ami_cmd->footer(std::string("\n") + kSeriesSchema + "\n" + kAmiSchema);

    ModelArgs train_args;
    auto* train_cmd = app.add_subcommand("train", "Train one network and save it with its pretreatment");
    add_model_flags(train_cmd, train_args);
    train_cmd->footer(std::string("\n") + kSeriesSchema + "\n" + kModelLayout);

    PredictArgs pred;
    auto* predict_cmd = app.add_subcommand("predict", "Produce 24 h-ahead forecasts");
    predict_cmd->add_option("--model", pred.model, "Model directory written by `train`, or `persistence`")
        ->required();
    predict_cmd->add_option("--data", pred.data, "Series CSV")->required();
    predict_cmd->add_option("--target", pred.target, "Target column for persistence")->capture_default_str();
    add_horizon(predict_cmd, pred.horizon);
    predict_cmd->add_option("--out", pred.out, "Output forecast CSV")->required();
    predict_cmd->footer(std::string("\n") + kSeriesSchema + "\n" + kForecastSchema);

    EvaluateArgs ev;
    auto* evaluate_cmd = app.add_subcommand("evaluate", "Score a forecast CSV");
    evaluate_cmd->add_option("--forecast", ev.forecast, "Forecast CSV")->required();
    evaluate_cmd->add_option("--station", ev.station, "Station label")->capture_default_str();
    evaluate_cmd->add_option("--model-name", ev.model_name, "Model label")->capture_default_str();
    evaluate_cmd->add_option("--inputs", ev.inputs, "Input-set label")->capture_default_str();
    evaluate_cmd->add_option("--out", ev.out, "Output metrics CSV")->required();
    evaluate_cmd->footer(std::string("\n") + kForecastSchema + "\n" + kReportSchema);

    ExperimentArgs ex;
    auto* experiment_cmd = app.add_subcommand("experiment", "Run the full input-set comparison");
    experiment_cmd->add_option("--config", ex.config, "Experiment config JSON (defaults: synthetic data)");
    experiment_cmd->add_option("--seed", ex.seed, "Base initialisation seed");
    experiment_cmd->add_option("--threads", ex.threads, "Worker threads (0 = all cores)");
    experiment_cmd->add_option("--runs", ex.runs, "Runs per input set (default 7)");
    experiment_cmd->add_option("--hidden", ex.hidden, "Hidden neurons (default 12)");
    experiment_cmd->add_option("--patience", ex.patience, "Early-stopping patience (default 6)");
    experiment_cmd->add_option("--bins", ex.bins, "AMI bins per axis (default 16)");
    experiment_cmd->add_option("--max-lag", ex.max_lag, "Largest lag scanned (default 72)");
    experiment_cmd->add_option("--lags-per-predictor", ex.lags_per_predictor, "Lags kept per predictor (default 3)");
    add_horizon(experiment_cmd, ex.horizon);
    experiment_cmd->add_option("--out", ex.out, "Report directory")->required();
    experiment_cmd->footer(
        "\nReport directory: report.csv (`station,model,inputs,rmse,nrmse_pct,mae,ia,runs`), runs.csv,\n"
        "report.md, splits.csv, scaling.csv (`variable,min,max`), imputation.csv, lags.csv\n"
        "(`predictor,lags`, lags separated by ';'), ami/<variable>.csv (`lag,ami_bits`),\n"
        "models/<inputs>_run<k>.model, history/<inputs>_run<k>.csv.\n");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << e.what() << "\n\n";
        const CLI::App* scope = &app;
        for (const auto* sub : app.get_subcommands()) scope = sub;
        std::cerr << scope->help();
        return kUsage;
    }

    if (generate_cmd->parsed()) return run_guarded([&] { cmd_generate(gen); });
    if (ami_cmd->parsed()) return run_guarded([&] { cmd_ami(ami_args); });
    if (train_cmd->parsed()) return run_guarded([&] { cmd_train(train_args); });
    if (predict_cmd->parsed()) return run_guarded([&] { cmd_predict(pred); });
    if (evaluate_cmd->parsed()) return run_guarded([&] { cmd_evaluate(ev); });
    return run_guarded([&] { cmd_experiment(ex); });
}
