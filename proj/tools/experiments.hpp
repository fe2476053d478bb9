#pragma once

#include "config.hpp"

#include <json.hpp>

#include <functional>
#include <string>
#include <vector>

namespace thermeq::cli {

/// One checked statement. `anchor` is a stable key naming the claim being
/// checked; it must be declared by the experiment.
struct Assertion {
    std::string name;
    std::string anchor;
    bool passed = false;
    std::string detail;
};

struct Table {
    std::string file;  // relative to the run directory
    std::string csv;
};

struct ExperimentOutput {
    nlohmann::json results = nlohmann::json::object();
    std::vector<Assertion> assertions;
    std::vector<Table> tables;

    void check(std::string name, std::string anchor, bool passed, std::string detail = {}) {
        assertions.push_back({std::move(name), std::move(anchor), passed, std::move(detail)});
    }
};

struct RunOptions {
    int jobs = 1;
};

struct ExperimentInfo {
    std::string name;
    std::string topic;
    std::vector<std::string> anchors;
    std::function<ExperimentOutput(const ExperimentConfig&, const RunOptions&)> run;
};

/// Stable ordering.
const std::vector<ExperimentInfo>& registry();
const ExperimentInfo* find_experiment(const std::string& name);

/// Runs the experiment and checks that every assertion names a declared
/// anchor (std::logic_error otherwise). Throws ConfigError for unknown names.
ExperimentOutput run_experiment(const ExperimentConfig& config, const RunOptions& options);

/// Deterministic document: config echo, results, assertion rows.
nlohmann::json results_document(const ExperimentConfig& config, const ExperimentOutput& out);

bool all_passed(const ExperimentOutput& out);

/// Shortest round-trip decimal, independent of the global locale.
std::string csv_number(double v);

}  // namespace thermeq::cli
