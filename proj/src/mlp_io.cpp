#include "ozone/mlp_io.hpp"

#include <fstream>
#include <sstream>
#include <string>

#include "ozone/timeseries.hpp"

namespace ozone {

namespace {

constexpr const char* kMagic = "ozone-mlp 1";

std::string next_line(std::istream& in, const char* what) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError(std::string("model file truncated before ") + what);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

int keyed_int(std::istream& in, const std::string& key) {
    const auto line = next_line(in, key.c_str());
    std::istringstream is(line);
    std::string k;
    int v = 0;
    if (!(is >> k >> v) || k != key || v < 1) throw ParseError("model file: expected '" + key + " <positive int>'");
    return v;
}

}  // namespace

void write_model(const MlpModel& model, std::ostream& out) {
    const auto& topo = model.topology();
    out << kMagic << '\n'
        << "parameter-order " << kParameterOrderV1 << '\n'
        << "inputs " << topo.inputs << '\n'
        << "hidden " << topo.hidden << '\n'
        << "parameters " << topo.parameter_count() << '\n';
    const auto p = model.parameters();
    for (Eigen::Index i = 0; i < p.size(); ++i) out << format_double17(p[i]) << '\n';
}

void write_model(const MlpModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    write_model(model, out);
}

MlpModel read_model(std::istream& in) {
    if (next_line(in, "header") != kMagic) throw ParseError("not an ozone-mlp version 1 model file");
    if (next_line(in, "parameter-order") != std::string("parameter-order ") + kParameterOrderV1) {
        throw ParseError("model file: unsupported parameter ordering");
    }
    Topology topo;
    topo.inputs = keyed_int(in, "inputs");
    topo.hidden = keyed_int(in, "hidden");
    const int count = keyed_int(in, "parameters");
    if (count != topo.parameter_count()) {
        throw ParseError("model file: parameter count " + std::to_string(count) + " does not match topology (" +
                         std::to_string(topo.parameter_count()) + ")");
    }
    Eigen::VectorXd p(count);
    for (int i = 0; i < count; ++i) p[i] = parse_double(next_line(in, "all parameters"));
    MlpModel model(topo);
    model.set_parameters(p);
    return model;
}

MlpModel read_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    return read_model(in);
}

void write_history(const TrainHistory& history, std::ostream& out) {
    out << "epoch,train_mse,val_mse,damping\n";
    for (const auto& e : history.epochs) {
        out << e.epoch << ',' << format_double(e.train_mse) << ',' << format_double(e.val_mse) << ','
            << format_double(e.damping) << '\n';
    }
}

}  // namespace ozone
