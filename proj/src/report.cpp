#include <cstdio>
#include <fstream>

#include "ozone/harness.hpp"
#include "ozone/mlp_io.hpp"

namespace ozone {

namespace {

namespace fs = std::filesystem;

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    return out;
}

std::string fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

std::string join_lags(const std::vector<int>& lags) {
    std::string s;
    for (std::size_t i = 0; i < lags.size(); ++i) {
        if (i) s += ';';
        s += std::to_string(lags[i]);
    }
    return s;
}

void write_markdown(const ExperimentReport& report, std::ostream& md) {
    md << "# Error indices: " << report.station << "\n\n"
       << "Training " << report.train_start.to_string() << " .. " << (report.val_start - 1).to_string()
       << ", validation " << report.val_start.to_string() << " .. " << (report.test_start - 1).to_string()
       << ", test " << report.test_start.to_string() << " .. " << report.test_last.to_string() << ".\n\n"
       << "| Model (with input datasets) | RMSE | nRMSE (%) | MAE | IA | runs |\n"
       << "|---|---:|---:|---:|---:|---:|\n"
       << "| Persistence | " << fixed(report.persistence.rmse, 2) << " | "
       << fixed(100.0 * report.persistence.nrmse, 2) << " | " << fixed(report.persistence.mae, 2) << " | "
       << fixed(report.persistence.ia, 2) << " | 1 |\n";
    for (const auto& cell : report.cells) {
        md << "| MLP (" << to_string(cell.inputs) << ") | " << fixed(cell.mean.rmse, 2) << " | "
           << fixed(100.0 * cell.mean.nrmse, 2) << " | " << fixed(cell.mean.mae, 2) << " | " << fixed(cell.mean.ia, 2)
           << " | " << cell.runs.size() << " |\n";
    }
    md << "\nMLP rows average the test indices of every run (seeds base+0 .. base+runs-1).\n"
       << "Imputation statistics, scaling ranges and lag selections were all computed on the training slice\n"
       << "and applied unchanged to the validation and test slices. Metrics compare forecasts with the\n"
       << "non-imputed observations, in original units.\n\n"
       << "## Selected lags (hours)\n\n";
    for (const auto& l : report.lags) md << "- " << l.predictor << ": " << join_lags(l.lags) << "\n";
    md << "\n## Timing\n\n";
    for (const auto& cell : report.cells) {
        md << "- " << to_string(cell.inputs) << ": " << fixed(cell.seconds, 1) << " s of training\n";
    }
    md << "- total: " << fixed(report.seconds, 1) << " s\n";
}

}  // namespace

void write_report(const ExperimentReport& report, const fs::path& dir) {
    fs::create_directories(dir / "models");
    fs::create_directories(dir / "history");
    fs::create_directories(dir / "ami");

    {
        auto out = open_out(dir / "report.csv");
        out << kReportHeader << '\n' << report_row(report.station, "Persistence", "O3", report.persistence, 1) << '\n';
        for (const auto& cell : report.cells) {
            out << report_row(report.station, "MLP", to_string(cell.inputs), cell.mean,
                              static_cast<int>(cell.runs.size()))
                << '\n';
        }
    }
    {
        auto out = open_out(dir / "runs.csv");
        out << "station,model,inputs,run,seed,rmse,nrmse_pct,mae,ia,best_epoch,epochs,stop_reason\n";
        for (const auto& cell : report.cells) {
            for (const auto& r : cell.runs) {
                out << report.station << ",MLP," << to_string(cell.inputs) << ',' << r.run << ',' << r.seed << ','
                    << format_double17(r.test.rmse) << ',' << format_double17(100.0 * r.test.nrmse) << ','
                    << format_double17(r.test.mae) << ',' << format_double17(r.test.ia) << ',' << r.history.best_epoch
                    << ',' << r.history.epochs.size() << ',' << to_string(r.history.stop_reason) << '\n';
                write_model(r.model, dir / "models" / (model_stem(cell.inputs, r.run) + ".model"));
                auto hist = open_out(dir / "history" / (model_stem(cell.inputs, r.run) + ".csv"));
                write_history(r.history, hist);
            }
        }
    }
    {
        auto out = open_out(dir / "report.md");
        write_markdown(report, out);
    }
    {
        auto out = open_out(dir / "splits.csv");
        out << "slice,first,last\n"
            << "train," << report.train_start.to_string() << ',' << (report.val_start - 1).to_string() << '\n'
            << "val," << report.val_start.to_string() << ',' << (report.test_start - 1).to_string() << '\n'
            << "test," << report.test_start.to_string() << ',' << report.test_last.to_string() << '\n';
    }
    {
        auto out = open_out(dir / "scaling.csv");
        out << "variable,min,max\n";
        for (const auto& [name, r] : report.scaling.ranges()) {
            out << name << ',' << format_double17(r.min) << ',' << format_double17(r.max) << '\n';
        }
    }
    {
        auto out = open_out(dir / "imputation.csv");
        report.imputation.write_csv(out);
    }
    {
        auto out = open_out(dir / "lags.csv");
        out << "predictor,lags\n";
        for (const auto& l : report.lags) out << l.predictor << ',' << join_lags(l.lags) << '\n';
    }
    for (const auto& curve : report.ami_curves) {
        auto out = open_out(dir / "ami" / (curve.predictor + ".csv"));
        out << "lag,ami_bits\n";
        for (const auto& p : curve.points) out << p.lag << ',' << format_double17(p.bits) << '\n';
    }
}

}  // namespace ozone
