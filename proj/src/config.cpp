#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "ozone/harness.hpp"

namespace ozone {

namespace {

using nlohmann::json;

/// Reads fields of one JSON object and rejects keys nobody asked for.
class ObjectReader {
public:
    ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_ + " must be a JSON object");
    }

    template <typename T>
    void get(const char* key, T& out) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        try {
            out = j_.at(key).get<T>();
        } catch (const json::exception& e) {
            throw ConfigError(path_ + "." + key + ": " + e.what());
        }
    }

    const json* child(const char* key) {
        seen_.insert(key);
        return j_.contains(key) ? &j_.at(key) : nullptr;
    }

    std::string path(const char* key) const { return path_ + "." + key; }

    void finish() const {
        for (const auto& [key, value] : j_.items()) {
            if (!seen_.count(key)) throw ConfigError("unknown key " + path_ + "." + key);
        }
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

json parse_json(std::string_view text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
}

void read_shape(const json& j, const std::string& path, DriverShape& s) {
    ObjectReader r(j, path);
    r.get("mean", s.mean);
    r.get("amplitude", s.amplitude);
    r.get("peak_hour", s.peak_hour);
    r.get("period_hours", s.period_hours);
    r.get("seasonal_amplitude", s.seasonal_amplitude);
    r.get("seasonal_peak_day", s.seasonal_peak_day);
    r.get("daily_sd", s.daily_sd);
    r.get("daily_ar", s.daily_ar);
    r.get("hourly_sd", s.hourly_sd);
    r.get("weekend_offset", s.weekend_offset);
    r.get("floor", s.floor);
    r.finish();
}

void read_ozone(const json& j, const std::string& path, OzoneEquation& eq) {
    ObjectReader r(j, path);
    r.get("base", eq.base);
    r.get("diurnal_amplitude", eq.diurnal_amplitude);
    r.get("peak_hour", eq.peak_hour);
    r.get("seasonal_amplitude", eq.seasonal_amplitude);
    r.get("seasonal_peak_day", eq.seasonal_peak_day);
    r.get("weekend_offset", eq.weekend_offset);
    r.get("noise_sd", eq.noise_sd);
    r.get("noise_ar", eq.noise_ar);
    if (const auto* terms = r.child("terms")) {
        if (!terms->is_array()) throw ConfigError(r.path("terms") + " must be an array");
        eq.terms.clear();
        for (std::size_t i = 0; i < terms->size(); ++i) {
            DriverTerm t;
            ObjectReader tr((*terms)[i], r.path("terms") + "[" + std::to_string(i) + "]");
            tr.get("variable", t.variable);
            tr.get("lag", t.lag);
            tr.get("weight", t.weight);
            tr.finish();
            eq.terms.push_back(t);
        }
    }
    r.finish();
}

void read_synth(const json& j, const std::string& path, SynthConfig& c) {
    ObjectReader r(j, path);
    r.get("start_year", c.start_year);
    r.get("years", c.years);
    r.get("seed", c.seed);
    r.get("missing_rate", c.missing_rate);
    if (const auto* s = r.child("no2")) read_shape(*s, r.path("no2"), c.no2);
    if (const auto* s = r.child("rad")) read_shape(*s, r.path("rad"), c.rad);
    if (const auto* s = r.child("temp")) read_shape(*s, r.path("temp"), c.temp);
    if (const auto* s = r.child("wind")) read_shape(*s, r.path("wind"), c.wind);
    if (const auto* s = r.child("o3")) read_ozone(*s, r.path("o3"), c.o3);
    r.finish();
}

}  // namespace

SynthConfig parse_synth_config(std::string_view json_text) {
    SynthConfig c = SynthConfig::defaults();
    read_synth(parse_json(json_text), "synth", c);
    c.validate();
    return c;
}

ExperimentConfig parse_experiment_config(std::string_view json_text, const std::filesystem::path& base_dir) {
    const json root = parse_json(json_text);
    ExperimentConfig c;
    ObjectReader r(root, "config");
    r.get("station", c.station);
    if (const auto* p = r.child("data_csv")) {
        if (!p->is_string()) throw ConfigError("config.data_csv must be a string");
        std::filesystem::path path = p->get<std::string>();
        c.data_csv = path.is_relative() ? base_dir / path : path;
    }
    if (const auto* s = r.child("synth")) read_synth(*s, "config.synth", c.synth);
    if (const auto* s = r.child("split")) {
        ObjectReader sr(*s, "config.split");
        sr.get("train_years", c.split.train);
        sr.get("val_years", c.split.val);
        sr.get("test_years", c.split.test);
        sr.finish();
    }
    if (const auto* s = r.child("input_sets")) {
        if (!s->is_array()) throw ConfigError("config.input_sets must be an array of labels");
        c.input_sets.clear();
        for (const auto& label : *s) {
            if (!label.is_string()) throw ConfigError("config.input_sets entries must be strings");
            c.input_sets.push_back(parse_input_set(label.get<std::string>()));
        }
    }
    r.get("runs_per_cell", c.runs_per_cell);
    r.get("base_seed", c.base_seed);
    if (const auto* s = r.child("mlp")) {
        ObjectReader mr(*s, "config.mlp");
        mr.get("hidden", c.hidden);
        mr.get("max_epochs", c.train.max_epochs);
        mr.get("patience", c.train.patience);
        mr.get("damping_init", c.train.damping_init);
        mr.get("damping_up", c.train.damping_up);
        mr.get("damping_down", c.train.damping_down);
        mr.get("damping_max", c.train.damping_max);
        mr.finish();
    }
    if (const auto* s = r.child("ami")) {
        ObjectReader ar(*s, "config.ami");
        int bins = 0;
        ar.get("bins", bins);
        if (bins) c.ami.bins_x = c.ami.bins_y = bins;
        ar.get("bins_x", c.ami.bins_x);
        ar.get("bins_y", c.ami.bins_y);
        ar.get("max_lag", c.max_lag);
        ar.get("lags_per_predictor", c.lags_per_predictor);
        ar.finish();
    }
    if (const auto* s = r.child("variables")) {
        ObjectReader vr(*s, "config.variables");
        vr.get("o3", c.variables.o3);
        vr.get("no2", c.variables.no2);
        vr.get("met", c.variables.met);
        vr.finish();
    }
    r.get("impute_fallback", c.impute_fallback);
    r.get("threads", c.threads);
    r.finish();
    c.train.seed = c.base_seed;
    c.validate();
    return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open config '" + path.string() + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_experiment_config(text.str(), path.parent_path());
}

}  // namespace ozone
