#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace thermeq::cli {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [k, v] : j.items())
        if (!allowed.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
}

double get_number(const json& j, const std::string& key) {
    if (!j.is_number()) throw ConfigError(key + ": expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError(key + ": must be finite");
    return v;
}

std::uint64_t get_unsigned(const json& j, const std::string& key) {
    if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<std::int64_t>() < 0))
        throw ConfigError(key + ": expected a non-negative integer");
    return j.get<std::uint64_t>();
}

std::optional<double> opt_number(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.contains(key)) return std::nullopt;
    return get_number(obj.at(key), path + key);
}

double tolerance(const json& obj, const std::string& key) {
    const double v = get_number(obj.at(key), "tolerances." + key);
    if (!(v > 0.0 && v < 2.0)) throw ConfigError("tolerances." + key + ": must lie in (0, 2)");
    return v;
}

template <class T>
void put(json& j, const char* key, const std::optional<T>& v) {
    if (v) j[key] = *v;
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
    check_keys(j, "config",
               {"experiment", "seed", "n_sites", "dim", "cell_size", "cells", "model", "shell", "tolerances", "samples",
                "d0", "d1", "resolution", "beta", "t_max", "t_steps", "output"});
    ExperimentConfig c;
    if (!j.contains("experiment") || !j.at("experiment").is_string())
        throw ConfigError("experiment: required string");
    c.experiment = j.at("experiment").get<std::string>();
    if (!j.contains("seed")) throw ConfigError("seed: required");
    c.seed = get_unsigned(j.at("seed"), "seed");

    if (j.contains("n_sites")) {
        const auto n = get_unsigned(j.at("n_sites"), "n_sites");
        if (n < 1 || n > 16) throw ConfigError("n_sites: must lie in [1, 16]");
        c.n_sites = static_cast<int>(n);
    }
    if (j.contains("dim")) {
        const auto d = get_unsigned(j.at("dim"), "dim");
        if (d < 1 || d > (1u << 16)) throw ConfigError("dim: must lie in [1, 65536]");
        c.dim = static_cast<std::size_t>(d);
    }
    if (j.contains("cell_size") && j.contains("cells")) throw ConfigError("cells and cell_size are exclusive");
    if (j.contains("cell_size")) {
        const auto s = get_unsigned(j.at("cell_size"), "cell_size");
        if (s < 1 || s > 16) throw ConfigError("cell_size: must lie in [1, 16]");
        c.cell_size = static_cast<int>(s);
    }
    if (j.contains("cells")) {
        const json& cs = j.at("cells");
        if (!cs.is_array() || cs.empty()) throw ConfigError("cells: expected a non-empty array of site arrays");
        std::vector<SiteSet> cells;
        for (const auto& cell : cs) {
            if (!cell.is_array() || cell.empty()) throw ConfigError("cells: each cell must be a non-empty array");
            SiteSet s;
            for (const auto& site : cell) s.push_back(static_cast<int>(get_unsigned(site, "cells[]")));
            cells.push_back(std::move(s));
        }
        c.cells = std::move(cells);
    }
    if (j.contains("model")) {
        const json& m = j.at("model");
        check_keys(m, "model", {"w", "j", "gamma", "periodic"});
        ModelConfig mc;
        mc.w = opt_number(m, "w", "model.");
        if (mc.w && *mc.w < 0.0) throw ConfigError("model.w: must be non-negative");
        mc.j = opt_number(m, "j", "model.");
        mc.gamma = opt_number(m, "gamma", "model.");
        if (m.contains("periodic")) {
            if (!m.at("periodic").is_boolean()) throw ConfigError("model.periodic: expected a boolean");
            mc.periodic = m.at("periodic").get<bool>();
        }
        c.model = mc;
    }
    if (j.contains("shell")) {
        const json& s = j.at("shell");
        check_keys(s, "shell", {"e", "delta_e", "quantile_lo", "quantile_hi"});
        ShellConfig sc;
        sc.e = opt_number(s, "e", "shell.");
        sc.delta_e = opt_number(s, "delta_e", "shell.");
        sc.quantile_lo = opt_number(s, "quantile_lo", "shell.");
        sc.quantile_hi = opt_number(s, "quantile_hi", "shell.");
        const bool energy = sc.e || sc.delta_e, quantile = sc.quantile_lo || sc.quantile_hi;
        if (energy && quantile) throw ConfigError("shell: give either e/delta_e or quantile_lo/quantile_hi");
        if (energy && !(sc.e && sc.delta_e)) throw ConfigError("shell: e and delta_e go together");
        if (quantile && !(sc.quantile_lo && sc.quantile_hi))
            throw ConfigError("shell: quantile_lo and quantile_hi go together");
        if (!energy && !quantile) throw ConfigError("shell: empty");
        if (energy && !(*sc.delta_e > 0.0)) throw ConfigError("shell.delta_e: must be positive");
        if (quantile && !(*sc.quantile_lo >= 0.0 && *sc.quantile_lo < *sc.quantile_hi && *sc.quantile_hi <= 1.0))
            throw ConfigError("shell: need 0 <= quantile_lo < quantile_hi <= 1");
        c.shell = sc;
    }
    if (j.contains("tolerances")) {
        const json& t = j.at("tolerances");
        check_keys(t, "tolerances", {"epsilon", "delta", "eps_tilde"});
        ToleranceConfig tc;
        if (t.contains("epsilon")) tc.epsilon = tolerance(t, "epsilon");
        if (t.contains("delta")) tc.delta = tolerance(t, "delta");
        if (t.contains("eps_tilde")) tc.eps_tilde = tolerance(t, "eps_tilde");
        c.tolerances = tc;
    }
    const auto positive_count = [&](const char* key) -> std::optional<std::size_t> {
        if (!j.contains(key)) return std::nullopt;
        const auto v = get_unsigned(j.at(key), key);
        if (v < 1) throw ConfigError(std::string(key) + ": must be at least 1");
        return static_cast<std::size_t>(v);
    };
    c.samples = positive_count("samples");
    c.d0 = positive_count("d0");
    c.d1 = positive_count("d1");
    c.t_steps = positive_count("t_steps");
    c.resolution = opt_number(j, "resolution", "");
    if (c.resolution && !(*c.resolution > 0.0)) throw ConfigError("resolution: must be positive");
    c.beta = opt_number(j, "beta", "");
    c.t_max = opt_number(j, "t_max", "");
    if (c.t_max && !(*c.t_max > 0.0)) throw ConfigError("t_max: must be positive");
    if (j.contains("output")) {
        const json& o = j.at("output");
        check_keys(o, "output", {"dir"});
        if (o.contains("dir")) {
            if (!o.at("dir").is_string()) throw ConfigError("output.dir: expected a string");
            c.output_dir = o.at("dir").get<std::string>();
        }
    }
    return c;
}

ExperimentConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(j);
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

json to_json(const ExperimentConfig& c) {
    json j = json::object();
    j["experiment"] = c.experiment;
    j["seed"] = c.seed;
    put(j, "n_sites", c.n_sites);
    put(j, "dim", c.dim);
    put(j, "cell_size", c.cell_size);
    if (c.cells) j["cells"] = *c.cells;
    if (c.model) {
        json m = json::object();
        put(m, "w", c.model->w);
        put(m, "j", c.model->j);
        put(m, "gamma", c.model->gamma);
        put(m, "periodic", c.model->periodic);
        j["model"] = m;
    }
    if (c.shell) {
        json s = json::object();
        put(s, "e", c.shell->e);
        put(s, "delta_e", c.shell->delta_e);
        put(s, "quantile_lo", c.shell->quantile_lo);
        put(s, "quantile_hi", c.shell->quantile_hi);
        j["shell"] = s;
    }
    if (c.tolerances) {
        json t = json::object();
        put(t, "epsilon", c.tolerances->epsilon);
        put(t, "delta", c.tolerances->delta);
        put(t, "eps_tilde", c.tolerances->eps_tilde);
        j["tolerances"] = t;
    }
    put(j, "samples", c.samples);
    put(j, "d0", c.d0);
    put(j, "d1", c.d1);
    put(j, "resolution", c.resolution);
    put(j, "beta", c.beta);
    put(j, "t_max", c.t_max);
    put(j, "t_steps", c.t_steps);
    if (c.output_dir) j["output"] = json{{"dir", *c.output_dir}};
    return j;
}

std::string schema_description() {
    return R"(JSON object; unknown keys are errors.
  experiment   string, required; see `thermeq list`
  seed         unsigned integer, required
  n_sites      integer in [1, 16]
  dim          integer in [1, 65536] (abstract experiments)
  cell_size    integer, uniform cells of consecutive sites (exclusive with cells)
  cells        array of site arrays, disjoint and covering all sites
  model        {w >= 0, j, gamma, periodic: bool}
  shell        {e, delta_e > 0} or {quantile_lo, quantile_hi} with 0 <= lo < hi <= 1
  tolerances   {epsilon, delta, eps_tilde}, each in (0, 2)
  samples      integer >= 1
  d0, d1       integer >= 1 (subsystem dimensions)
  resolution   number > 0 (macro-observable bin width)
  beta         number
  t_max        number > 0
  t_steps      integer >= 1
  output       {dir: string}
)";
}

}  // namespace thermeq::cli
