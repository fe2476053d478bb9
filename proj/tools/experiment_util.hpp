#pragma once

#include "config.hpp"
#include "experiments.hpp"

#include "thermeq/macrostates.hpp"
#include "thermeq/register.hpp"
#include "thermeq/rng.hpp"
#include "thermeq/spectral.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

namespace thermeq::cli {

// run functions, one per registry entry
ExperimentOutput run_example1(const ExperimentConfig&, const RunOptions&);
ExperimentOutput run_example2(const ExperimentConfig&, const RunOptions&);
ExperimentOutput run_example3(const ExperimentConfig&, const RunOptions&);
ExperimentOutput run_example4(const ExperimentConfig&, const RunOptions&);
ExperimentOutput run_example5(const ExperimentConfig&, const RunOptions&);
ExperimentOutput run_moments(const ExperimentConfig&, const RunOptions&);
ExperimentOutput run_basis_mate(const ExperimentConfig&, const RunOptions&);
ExperimentOutput run_mixed_state_mate(const ExperimentConfig&, const RunOptions&);
ExperimentOutput run_time_average(const ExperimentConfig&, const RunOptions&);
ExperimentOutput run_time_variance(const ExperimentConfig&, const RunOptions&);
ExperimentOutput run_psw(const ExperimentConfig&, const RunOptions&);
ExperimentOutput run_gap_sampler(const ExperimentConfig&, const RunOptions&);
ExperimentOutput run_gap_probe(const ExperimentConfig&, const RunOptions&);
ExperimentOutput run_mite_implies_mate(const ExperimentConfig&, const RunOptions&);
ExperimentOutput run_adversarial(const ExperimentConfig&, const RunOptions&);
ExperimentOutput run_normality(const ExperimentConfig&, const RunOptions&);
ExperimentOutput run_ensemble(const ExperimentConfig&, const RunOptions&);
ExperimentOutput run_estimates(const ExperimentConfig&, const RunOptions&);
ExperimentOutput run_canonical_typicality(const ExperimentConfig&, const RunOptions&);
ExperimentOutput run_offdiag_eth(const ExperimentConfig&, const RunOptions&);
ExperimentOutput run_random_basis_eth(const ExperimentConfig&, const RunOptions&);

inline SpinRegister make_register(const ExperimentConfig& c, int n, int default_cell) {
    if (c.cells) return SpinRegister(n, *c.cells);
    return SpinRegister::with_uniform_cells(n, c.cell_size.value_or(default_cell));
}

inline std::vector<SiteSet> singletons(int n) {
    std::vector<SiteSet> out;
    for (int i = 0; i < n; ++i) out.push_back({i});
    return out;
}

/// Energy window from the config, else the quantile window [lo, hi).
inline std::vector<Eigen::Index> select_shell(const SpectralDecomposition& spec, const ExperimentConfig& c, double lo,
                                              double hi) {
    std::vector<Eigen::Index> idx;
    if (c.shell && c.shell->e) {
        idx = shell_indices(spec, *c.shell->e, *c.shell->delta_e);
    } else {
        if (c.shell) {
            lo = *c.shell->quantile_lo;
            hi = *c.shell->quantile_hi;
        }
        const auto d = static_cast<double>(spec.dim());
        const auto a = static_cast<Eigen::Index>(std::llround(lo * d));
        const auto b = static_cast<Eigen::Index>(std::llround(hi * d));
        for (Eigen::Index j = a; j < b; ++j) idx.push_back(j);
    }
    if (idx.empty()) throw ConfigError("shell: window selects no eigenvalues");
    return idx;
}

inline std::string num(double v) { return csv_number(v); }

/// MacroDecomposition over coordinate blocks of C^d with the given sizes;
/// sector k carries nu = {k}. The equilibrium sector is the largest unless
/// `designate_eq` is false (equal blocks would tie).
MacroDecomposition block_decomposition(std::size_t d, const std::vector<std::size_t>& sizes, bool designate_eq = true);

/// Complex Gaussian Hermitian matrix (X + X^dagger) / 2.
CMatrix gue(Eigen::Index d, Rng& rng);
/// Random Hermitian matrix scaled to unit spectral norm.
CMatrix unit_hermitian(Eigen::Index d, Rng& rng);

}  // namespace thermeq::cli
