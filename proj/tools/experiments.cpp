#include "experiments.hpp"

#include "experiment_util.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace thermeq::cli {

using nlohmann::json;

const std::vector<ExperimentInfo>& registry() {
    static const std::vector<ExperimentInfo> reg{
        {"example1-product-mate-not-mite", "Product state of alternating spins",
         {"macro.eq-dimension", "mate.definition", "mite.product-state", "mite-mate.one-directional"}, run_example1},
        {"example2-alignment", "Disordered field model: eigenstates aligned or orthogonal",
         {"eth.alignment-dichotomy", "eth.no-mite", "mate.basis-count", "dynamics.no-energy-transport"},
         run_example2},
        {"example3-x-relaxation", "Relaxation of the x magnetization under random fields",
         {"dynamics.x-relaxation", "dynamics.x-precession"}, run_example3},
        {"example4-tmate", "Thermal equilibrium for non-commuting macro observables",
         {"tmate.non-commuting", "tmate.thermal-value", "tmate.definition"}, run_example4},
        {"example5-h5-scan", "Interacting chain: eigenstate classes",
         {"eth.alignment-classes", "models.h5-not-integrable"}, run_example5},
        {"moments", "Moments of uniformly random unit vectors",
         {"moments.first", "moments.second", "moments.third", "moments.fourth"}, run_moments},
        {"basis-mate-fraction", "Fraction of any orthonormal basis in MATE", {"mate.basis-count"}, run_basis_mate},
        {"mixed-state-mate", "MATE for random mixed states", {"mate.mixed-states", "mate.mixed-states-mc"},
         run_mixed_state_mate},
        {"time-average", "Time averages equal diagonal ensemble averages",
         {"dynamics.dephasing-identity", "dynamics.quadrature-average", "dynamics.pinching"}, run_time_average},
        {"time-variance", "Temporal fluctuations for non-degenerate gaps",
         {"dynamics.time-variance", "dynamics.time-variance-bound"}, run_time_variance},
        {"psw-bound", "Concentration of reduced states", {"typicality.psw-bound"}, run_psw},
        {"gap-sampler", "GAP measure sampling", {"gap.mean-state", "gap.uniform"}, run_gap_sampler},
        {"gap-mite-probe", "GAP of a Gibbs state: local distances (report only)", {}, run_gap_probe},
        {"mite-implies-mate", "MITE versus MATE for local macro observables", {"mite-mate.implication"},
         run_mite_implies_mate},
        {"adversarial-subsystem", "Subsystems chosen after the state",
         {"subsystems.adversarial", "subsystems.mite-most"}, run_adversarial},
        {"normality", "Normal typicality over a block decomposition", {"normality.typical", "normality.definition"},
         run_normality},
        {"ensemble-equivalence", "Micro-canonical versus canonical marginals", {"ensemble.beta"}, run_ensemble},
        {"estimates", "Closed-form magnitude estimates",
         {"estimates.mate-epsilon", "estimates.delta-choice", "estimates.gaussian-bound", "estimates.binomial-exact",
          "estimates.air-levels", "estimates.exorbitant-cells", "estimates.dmc-range"},
         run_estimates},
        {"canonical-typicality", "Variance bound and local thermality of random states",
         {"typicality.variance-bound", "typicality.chebyshev", "typicality.mite-most-states"},
         run_canonical_typicality},
        {"offdiag-eth", "Off-diagonal matrix elements in the eigenbasis", {"eth.offdiag-selection-rule"},
         run_offdiag_eth},
        {"random-basis-eth", "MATE for a Haar-random eigenbasis",
         {"eth.random-basis-mate", "dynamics.mate-eth-average"}, run_random_basis_eth},
    };
    return reg;
}

const ExperimentInfo* find_experiment(const std::string& name) {
    for (const auto& e : registry())
        if (e.name == name) return &e;
    return nullptr;
}

ExperimentOutput run_experiment(const ExperimentConfig& config, const RunOptions& options) {
    const ExperimentInfo* info = find_experiment(config.experiment);
    if (!info) throw ConfigError("unknown experiment '" + config.experiment + "'; see `thermeq list`");
    ExperimentOutput out = info->run(config, options);
    for (const auto& a : out.assertions)
        if (std::find(info->anchors.begin(), info->anchors.end(), a.anchor) == info->anchors.end())
            throw std::logic_error(info->name + ": assertion '" + a.name + "' uses undeclared anchor " + a.anchor);
    return out;
}

json results_document(const ExperimentConfig& config, const ExperimentOutput& out) {
    const ExperimentInfo* info = find_experiment(config.experiment);
    json asserts = json::array();
    for (const auto& a : out.assertions)
        asserts.push_back({{"name", a.name}, {"anchor", a.anchor}, {"passed", a.passed}, {"detail", a.detail}});
    json tables = json::array();
    for (const auto& t : out.tables) tables.push_back(t.file);
    return {{"experiment", config.experiment},
            {"topic", info ? info->topic : std::string()},
            {"config", to_json(config)},
            {"results", out.results},
            {"assertions", asserts},
            {"tables", tables},
            {"passed", all_passed(out)}};
}

bool all_passed(const ExperimentOutput& out) {
    return std::all_of(out.assertions.begin(), out.assertions.end(), [](const Assertion& a) { return a.passed; });
}

std::string csv_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

}  // namespace thermeq::cli
