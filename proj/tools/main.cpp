// thermeq command line: run / list / validate.

#include "config.hpp"
#include "experiments.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace thermeq::cli;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitError = 2;

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    f << text;
    if (!f) throw std::runtime_error("write failed: " + p.string());
}

std::string utc_now() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream s;
    s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return s.str();
}

fs::path output_dir(const ExperimentConfig& c, const std::string& flag) {
    if (!flag.empty()) return flag;
    if (c.output_dir) return *c.output_dir;
    if (const char* env = std::getenv("THERMEQ_OUT"); env && *env) return fs::path(env) / c.experiment;
    return fs::path("thermeq-out") / c.experiment;
}

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed, const std::string& out_flag, int jobs) {
    ExperimentConfig c = load_config(config_path);
    if (seed) c.seed = *seed;
    const fs::path dir = output_dir(c, out_flag);

    const auto t0 = std::chrono::steady_clock::now();
    const ExperimentOutput out = run_experiment(c, RunOptions{jobs});
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    fs::create_directories(dir);
    write_file(dir / "results.json", results_document(c, out).dump(2) + "\n");
    nlohmann::json report{{"experiment", c.experiment}, {"seed", c.seed},         {"jobs", jobs},
                          {"wall_seconds", wall},       {"timestamp", utc_now()}, {"passed", all_passed(out)}};
    write_file(dir / "report.json", report.dump(2) + "\n");
    for (const auto& t : out.tables) write_file(dir / t.file, t.csv);

    for (const auto& a : out.assertions)
        std::cout << (a.passed ? "PASS " : "FAIL ") << a.name << " [" << a.anchor << "]"
                  << (a.detail.empty() ? "" : ": " + a.detail) << "\n";
    std::cout << c.experiment << ": " << (all_passed(out) ? "passed" : "FAILED") << " in " << std::fixed
              << std::setprecision(2) << wall << " s; output in " << dir.string() << "\n";
    return all_passed(out) ? 0 : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Thermal equilibrium diagnostics for finite spin chains"};
    app.require_subcommand(1);

    std::string config_path, out_flag;
    std::uint64_t seed_value = 0;
    int jobs = 1;
    auto* run = app.add_subcommand("run", "Run one experiment from a JSON config");
    run->add_option("--config", config_path, "Config file")->required();
    auto* seed_opt = run->add_option("--seed", seed_value, "Override the config seed");
    run->add_option("--out", out_flag, "Output directory (default $THERMEQ_OUT/<experiment> or ./thermeq-out/<experiment>)");
    run->add_option("--jobs", jobs, "Worker threads; results do not depend on it")->check(CLI::Range(1, 1024));

    auto* list = app.add_subcommand("list", "List experiments");
    auto* validate = app.add_subcommand("validate", "Check a config without running it");
    std::string validate_path;
    validate->add_option("--config", validate_path, "Config file")->required();
    auto* schema = app.add_subcommand("schema", "Describe the config format");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitError;
    }

    try {
        if (*run) {
            std::optional<std::uint64_t> seed;
            if (*seed_opt) seed = seed_value;
            return cmd_run(config_path, seed, out_flag, jobs);
        }
        if (*list) {
            for (const auto& e : registry()) std::cout << std::left << std::setw(32) << e.name << e.topic << "\n";
            return 0;
        }
        if (*validate) {
            const ExperimentConfig c = load_config(validate_path);
            if (!find_experiment(c.experiment)) throw ConfigError("unknown experiment '" + c.experiment + "'");
            std::cout << "ok: " << c.experiment << "\n";
            return 0;
        }
        if (*schema) {
            std::cout << schema_description();
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
