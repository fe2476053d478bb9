#pragma once

#include "thermeq/types.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace thermeq::cli {

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct ModelConfig {
    std::optional<double> w;
    std::optional<double> j;
    std::optional<double> gamma;
    std::optional<bool> periodic;
    bool operator==(const ModelConfig&) const = default;
};

/// Either an energy window (e - delta_e, e] or a quantile window over the
/// sorted spectrum, [lo * D, hi * D) in eigenvalue index.
struct ShellConfig {
    std::optional<double> e;
    std::optional<double> delta_e;
    std::optional<double> quantile_lo;
    std::optional<double> quantile_hi;
    bool operator==(const ShellConfig&) const = default;
};

struct ToleranceConfig {
    std::optional<double> epsilon;
    std::optional<double> delta;
    std::optional<double> eps_tilde;
    bool operator==(const ToleranceConfig&) const = default;
};

struct ExperimentConfig {
    std::string experiment;
    std::uint64_t seed = 0;
    std::optional<int> n_sites;
    std::optional<std::size_t> dim;
    std::optional<int> cell_size;
    std::optional<std::vector<SiteSet>> cells;
    std::optional<ModelConfig> model;
    std::optional<ShellConfig> shell;
    std::optional<ToleranceConfig> tolerances;
    std::optional<std::size_t> samples;
    std::optional<std::size_t> d0;
    std::optional<std::size_t> d1;
    std::optional<double> resolution;
    std::optional<double> beta;
    std::optional<double> t_max;
    std::optional<std::size_t> t_steps;
    std::optional<std::string> output_dir;

    bool operator==(const ExperimentConfig&) const = default;

    // defaults resolved per experiment
    double epsilon_or(double v) const { return tolerances && tolerances->epsilon ? *tolerances->epsilon : v; }
    double delta_or(double v) const { return tolerances && tolerances->delta ? *tolerances->delta : v; }
    double eps_tilde_or(double v) const { return tolerances && tolerances->eps_tilde ? *tolerances->eps_tilde : v; }
    double w_or(double v) const { return model && model->w ? *model->w : v; }
    double j_or(double v) const { return model && model->j ? *model->j : v; }
    double gamma_or(double v) const { return model && model->gamma ? *model->gamma : v; }
    bool periodic_or(bool v) const { return model && model->periodic ? *model->periodic : v; }
};

/// Strict parse: unknown keys, wrong types and out-of-range values throw
/// ConfigError. The seed is mandatory.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Only fields that are set are written, so parse(serialize(c)) == c.
nlohmann::json to_json(const ExperimentConfig& c);

/// Schema summary for `validate` and the README.
std::string schema_description();

}  // namespace thermeq::cli
