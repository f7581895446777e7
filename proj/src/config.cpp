#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tclae/experiments.hpp"

namespace tclae {

using nlohmann::json;

ExperimentConfig default_config(const std::string& experiment) {
    ExperimentConfig c;
    c.experiment = experiment;
    if (experiment == "prop-verify") {
        c.t_max = 15.0;
        c.dt = 0.1;
        c.fit = {2.0, 12.0, 1e-13};
    } else if (experiment == "rabi-truncation") {
        c.model = "rabi";
        c.rabi.g = 0.05;
        c.t_max = 50.0;
        c.dt = 1.0;
        c.fit = {5.0, 30.0, 1e-13};
        c.n_tr_list = {10, 20, 30};
    } else if (experiment == "choi") {
        c.model = "rabi";
        c.rabi.g = 0.1;
        c.t_max = 10.0;
        c.dt = 1e-3;
        c.record_dt = 0.01;
        c.fit = {0.0, 10.0, 1e-13};
    } else if (experiment == "laplace-compare") {
        c.rabi.n_tr = 8;
        c.sweep = {0.02, 0.04, 0.08};
    } else if (experiment == "equivalence") {
        c.t_max = 15.0;
        c.dt = 1e-3;
        c.record_dt = 0.1;
        c.fit = {2.0, 12.0, 1e-13};
        c.rabi.n_tr = 10;
    } else {
        throw Error(ErrorKind::Config, "unknown experiment " + experiment);
    }
    return c;
}

namespace {

template <class T>
void take(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

void read_three_level(const json& j, ThreeLevelParams& p) {
    take(j, "omega1", p.omega1);
    take(j, "omegaE", p.omegaE);
    take(j, "Gamma0", p.Gamma0);
    take(j, "Gamma1", p.Gamma1);
    take(j, "g0", p.g0);
    take(j, "g1", p.g1);
}

void read_rabi(const json& j, RabiParams& p) {
    take(j, "omega_ph", p.omega_ph);
    take(j, "omega_eg", p.omega_eg);
    take(j, "kappa", p.kappa);
    take(j, "g", p.g);
    take(j, "n_tr", p.n_tr);
}

json fit_json(const ExpFit& f) {
    return json{{"a", f.a}, {"b", f.b}, {"t_min", f.t_min}, {"t_max", f.t_max},
                {"residual", f.residual}, {"n_used", f.n_used}};
}

// JSON has no representation for inf/nan
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

} // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Config, std::string("invalid JSON: ") + e.what());
    }
    try {
        if (!j.contains("experiment")) throw Error(ErrorKind::Config, "config needs an \"experiment\" key");
        ExperimentConfig c = default_config(j.at("experiment").get<std::string>());
        if (j.contains("model")) {
            const json& m = j.at("model");
            take(m, "name", c.model);
            if (m.contains("three_level")) read_three_level(m.at("three_level"), c.three_level);
            if (m.contains("rabi")) read_rabi(m.at("rabi"), c.rabi);
            if (m.contains("params")) {
                if (c.model == "rabi")
                    read_rabi(m.at("params"), c.rabi);
                else
                    read_three_level(m.at("params"), c.three_level);
            }
        }
        if (j.contains("grid")) {
            const json& g = j.at("grid");
            take(g, "t_max", c.t_max);
            take(g, "dt", c.dt);
            take(g, "record_dt", c.record_dt);
        }
        if (j.contains("fit")) {
            const json& f = j.at("fit");
            take(f, "t_min", c.fit.t_min);
            take(f, "t_max", c.fit.t_max);
            take(f, "floor", c.fit.floor);
        }
        take(j, "sweep", c.sweep);
        take(j, "n_tr", c.n_tr_list);
        if (j.contains("tolerances"))
            for (auto& [k, v] : j.at("tolerances").items()) c.tolerances[k] = v.get<double>();
        if (j.contains("references"))
            for (auto& [k, v] : j.at("references").items()) c.references[k] = v.get<double>();
        if (j.contains("output")) {
            take(j.at("output"), "dir", c.out_dir);
            take(j.at("output"), "stream", c.stream_path);
        }
        c.validate();
        return c;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Config, std::string("bad config value: ") + e.what());
    }
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Config, "cannot read config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string report_json(const ExperimentReport& r) {
    json j;
    j["experiment"] = r.experiment;
    j["all_pass"] = r.all_pass();
    json fits = json::object();
    for (const auto& [k, f] : r.fits) fits[k] = fit_json(f);
    j["fits"] = fits;
    json scalars = json::object();
    for (const auto& [k, v] : r.scalars) scalars[k] = number(v);
    j["scalars"] = scalars;
    json checks = json::object();
    for (const Check& c : r.checks)
        checks[c.name] = json{{"pass", c.pass}, {"measured", number(c.measured)}, {"bound", c.bound}};
    j["checks"] = checks;
    json series = json::object();
    for (const Series& s : r.series) {
        json pts = json::array();
        for (std::size_t i = 0; i < s.t.size(); ++i) pts.push_back({s.t[i], number(s.value[i])});
        series[s.name] = pts;
    }
    j["series"] = series;
    if (!r.notes.empty()) j["notes"] = r.notes;
    return j.dump(2);
}

void write_report(const ExperimentReport& r, const std::string& dir, const std::string& format) {
    namespace fs = std::filesystem;
    if (format != "json" && format != "csv") throw Error(ErrorKind::Config, "format must be csv or json");
    fs::create_directories(dir);
    {
        std::ofstream out(fs::path(dir) / (r.experiment + ".json"));
        if (!out) throw Error(ErrorKind::Config, "cannot write report in " + dir);
        out << report_json(r) << '\n';
    }
    if (format != "csv") return;
    for (const Series& s : r.series) {
        std::string name = r.experiment + "_" + s.name;
        for (char& ch : name)
            if (ch == '[' || ch == ']') ch = '_';
        std::ofstream out(fs::path(dir) / (name + ".csv"));
        out.precision(17);
        out << "t,value\n";
        for (std::size_t i = 0; i < s.t.size(); ++i) out << s.t[i] << ',' << s.value[i] << '\n';
    }
}

} // namespace tclae
