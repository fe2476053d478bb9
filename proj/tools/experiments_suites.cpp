// Property suites: typicality, dynamics identities, estimates.

#include "experiment_util.hpp"

#include "thermeq/diagnostics.hpp"
#include "thermeq/dynamics.hpp"
#include "thermeq/estimates.hpp"
#include "thermeq/models.hpp"
#include "thermeq/parallel.hpp"
#include "thermeq/partial_trace.hpp"
#include "thermeq/typicality.hpp"
#include "thermeq/unitary.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace thermeq::cli {

using nlohmann::json;

MacroDecomposition block_decomposition(std::size_t d, const std::vector<std::size_t>& sizes, bool designate_eq) {
    std::vector<Sector> sectors;
    Eigen::Index start = 0;
    for (std::size_t k = 0; k < sizes.size(); ++k) {
        std::vector<Eigen::Index> idx(sizes[k]);
        std::iota(idx.begin(), idx.end(), start);
        start += static_cast<Eigen::Index>(sizes[k]);
        sectors.push_back({{static_cast<double>(k)}, Subspace(d, std::move(idx))});
    }
    MacroDecomposition decomp({"block"}, std::move(sectors), d);
    if (!designate_eq) return decomp;
    return decomp.with_equilibrium(find_equilibrium_macrostate(decomp));
}

CMatrix gue(Eigen::Index d, Rng& rng) {
    CMatrix x(d, d);
    for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index i = 0; i < d; ++i) x(i, j) = rng.complex_normal();
    return (x + x.adjoint()) / 2.0;
}

CMatrix unit_hermitian(Eigen::Index d, Rng& rng) {
    const CMatrix a = gue(d, rng);
    return a / hermitian_eigenvalues(a).cwiseAbs().maxCoeff();
}

namespace {

json stats_json(const DistanceStats& s) {
    return {{"n", s.n}, {"median", s.median}, {"q1", s.q1}, {"q3", s.q3}, {"mean", s.mean}, {"max", s.max}};
}

// Sum of |psi><psi| over samples, chunked so the reduction order is fixed.
CMatrix mean_projector(std::size_t d, std::size_t n, int jobs, const std::function<CVector(std::size_t)>& draw) {
    constexpr std::size_t chunk = 1024;
    const std::size_t n_chunks = (n + chunk - 1) / chunk;
    const auto parts = parallel_map(n_chunks, jobs, [&](std::size_t k) {
        CMatrix acc = CMatrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
        for (std::size_t i = k * chunk; i < std::min(n, (k + 1) * chunk); ++i) {
            const CVector v = draw(i);
            acc.noalias() += v * v.adjoint();
        }
        return acc;
    });
    CMatrix total = CMatrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (const auto& p : parts) total += p;
    return total / static_cast<double>(n);
}

}  // namespace

// ---------------------------------------------------------------- moments

ExperimentOutput run_moments(const ExperimentConfig& c, const RunOptions& opt) {
    ExperimentOutput out;
    const std::size_t d = c.dim.value_or(16);
    const std::size_t n = c.samples.value_or(100000);
    const auto r = moment_check(Subspace::full(d), n, c.seed, opt.jobs);
    out.results = {{"dim", d},
                   {"samples", n},
                   {"max_z_first", r.max_z_first},
                   {"max_z_second", r.max_z_second},
                   {"max_z_third", r.max_z_third},
                   {"max_z_fourth", r.max_z_fourth},
                   {"mean_second_diagonal", r.second.diagonal().real().mean()},
                   {"mean_fourth_diagonal", r.fourth.diagonal().mean()}};
    out.check("first-moment-vanishes", "moments.first", r.max_z_first <= 5.0, "max z " + num(r.max_z_first));
    out.check("second-moment", "moments.second", r.max_z_second <= 5.0, "max z " + num(r.max_z_second));
    out.check("third-moment-vanishes", "moments.third", r.max_z_third <= 5.0, "max z " + num(r.max_z_third));
    out.check("fourth-moment", "moments.fourth", r.max_z_fourth <= 5.0, "max z " + num(r.max_z_fourth));
    return out;
}

// ---------------------------------------------------------------- MATE counting

ExperimentOutput run_basis_mate(const ExperimentConfig& c, const RunOptions& opt) {
    ExperimentOutput out;
    struct Layout {
        int n, cell;
        double res;
    };
    static const Layout layouts[] = {{6, 2, 1.0}, {6, 3, 3.0}, {6, 2, 5.0}, {8, 2, 1.0},
                                     {8, 4, 1.0}, {8, 4, 3.0}, {8, 4, 5.0}};
    const std::size_t n_inst = c.samples.value_or(100);
    struct Row {
        int n, cell;
        double res, eps, delta, fraction, bound;
    };
    const auto rows = parallel_map(n_inst, opt.jobs, [&](std::size_t i) {
        Rng rng(c.seed, i);
        const Layout& l = layouts[rng.below(std::size(layouts))];
        const SpinRegister reg = SpinRegister::with_uniform_cells(l.n, l.cell);
        auto decomp = joint_decomposition(build_cell_magnetization(reg, Axis::z, {l.res}));
        decomp = decomp.with_equilibrium(find_equilibrium_macrostate(decomp));
        const double delta = rng.uniform(0.05, 0.95);
        const CMatrix basis = haar_unitary(static_cast<Eigen::Index>(reg.dim()), rng);
        const double frac = basis_mate_fraction(basis, decomp.eq_subspace(), delta);
        return Row{l.n, l.cell, l.res, decomp.epsilon(), delta, frac, 1.0 - decomp.epsilon() / delta};
    });
    std::size_t holds = 0;
    double min_margin = 1e300;
    std::ostringstream csv;
    csv << "# experiment: basis-mate-fraction\n# seed: " << c.seed << "\ninstance,n_sites,cell_size,resolution,epsilon,delta,fraction,bound\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        holds += r.fraction >= r.bound - 1e-12;
        min_margin = std::min(min_margin, r.fraction - r.bound);
        csv << i << ',' << r.n << ',' << r.cell << ',' << num(r.res) << ',' << num(r.eps) << ',' << num(r.delta) << ','
            << num(r.fraction) << ',' << num(r.bound) << '\n';
    }
    out.results = {{"instances", n_inst}, {"holds", holds}, {"min_margin", min_margin}};
    out.check("count-bound-every-instance", "mate.basis-count", holds == n_inst,
              std::to_string(holds) + "/" + std::to_string(n_inst));
    out.tables.push_back({"basis_mate.csv", csv.str()});
    return out;
}

ExperimentOutput run_mixed_state_mate(const ExperimentConfig& c, const RunOptions& opt) {
    ExperimentOutput out;
    const std::size_t dmc = c.dim.value_or(256);
    const double eps_target = c.epsilon_or(0.01), delta = c.delta_or(0.1);
    const auto rank = static_cast<Eigen::Index>(c.d1.value_or(8));
    const std::size_t n = c.samples.value_or(1000);
    const auto off = static_cast<std::size_t>(std::floor(eps_target * static_cast<double>(dmc)));
    std::vector<std::size_t> sizes{dmc - off};
    if (off > 0) sizes.push_back(off);
    const auto decomp = block_decomposition(dmc, sizes);
    const Subspace shell = Subspace::full(dmc);

    const auto flat = mixed_state_mate_sweep(shell, decomp, SpectrumLaw::flat(rank), delta, n, c.seed, opt.jobs);
    const auto pure = mixed_state_mate_sweep(shell, decomp, SpectrumLaw::pure(), delta, n, c.seed + 1, opt.jobs);
    const std::size_t n_mc = std::min<std::size_t>(n, 10);
    const auto mc = mixed_state_mate_sweep(shell, decomp, SpectrumLaw::flat(static_cast<Eigen::Index>(dmc)), delta, n_mc,
                                           c.seed + 2, opt.jobs);
    const double target = 1.0 - decomp.epsilon();
    const auto sweep_json = [](const MixedSweepResult& r) {
        return json{{"samples", r.n_samples}, {"fraction", r.fraction}, {"bound", r.bound}, {"slack", r.slack},
                    {"min_weight", r.min_weight}, {"max_weight", r.max_weight}};
    };
    out.results = {{"dmc", dmc}, {"epsilon", decomp.epsilon()}, {"delta", delta}, {"rank", rank},
                   {"flat", sweep_json(flat)}, {"pure", sweep_json(pure)}, {"maximally_mixed", sweep_json(mc)}};
    out.check("flat-law-fraction", "mate.mixed-states", flat.holds,
              "fraction " + num(flat.fraction) + " bound " + num(flat.bound));
    out.check("pure-law-fraction", "mate.mixed-states", pure.holds, "fraction " + num(pure.fraction));
    out.check("maximally-mixed-weight", "mate.mixed-states-mc",
              std::abs(mc.min_weight - target) <= 1e-10 && std::abs(mc.max_weight - target) <= 1e-10,
              "weights [" + num(mc.min_weight) + ", " + num(mc.max_weight) + "]");
    return out;
}

// ---------------------------------------------------------------- dynamics identities

ExperimentOutput run_time_average(const ExperimentConfig& c, const RunOptions& opt) {
    ExperimentOutput out;
    const std::size_t n_inst = c.samples.value_or(50);
    const double t_spacings = c.t_max.value_or(1e4);
    struct Row {
        Eigen::Index d;
        bool nondegenerate;
        double dephasing, diagonal, quadrature, pinch_err;
        std::size_t steps;
    };
    const auto rows = parallel_map(n_inst, opt.jobs, [&](std::size_t i) {
        Rng rng(c.seed, i);
        const auto d = static_cast<Eigen::Index>(6 + rng.below(11));
        const auto spec = eig_hermitian(gue(d, rng));
        const CVector psi = sample_sphere(d, rng);
        const CMatrix a = unit_hermitian(d, rng);
        const EvolutionContext ctx(spec, PureState(psi));
        const auto quad = quadrature_time_average(ctx, a, t_spacings);
        const CMatrix once = pinch(ctx, a);
        return Row{d,
                   ctx.n_groups() == static_cast<std::size_t>(d),
                   infinite_time_average(ctx, a),
                   diagonal_ensemble_average(ctx, a),
                   quad.mean,
                   (pinch(ctx, once) - once).cwiseAbs().maxCoeff(),
                   quad.steps};
    });
    double max_id = 0.0, max_quad = 0.0, max_pinch = 0.0;
    bool all_nondeg = true;
    std::ostringstream csv;
    csv << "# experiment: time-average\n# seed: " << c.seed << "\n# T_mean_spacings: " << num(t_spacings)
        << "\ninstance,d,dephasing,diagonal,quadrature,identity_error,quadrature_error,steps\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        const double e1 = std::abs(r.dephasing - r.diagonal), e2 = std::abs(r.quadrature - r.dephasing);
        max_id = std::max(max_id, e1);
        max_quad = std::max(max_quad, e2);
        max_pinch = std::max(max_pinch, r.pinch_err);
        all_nondeg = all_nondeg && r.nondegenerate;
        csv << i << ',' << r.d << ',' << num(r.dephasing) << ',' << num(r.diagonal) << ',' << num(r.quadrature) << ','
            << num(e1) << ',' << num(e2) << ',' << r.steps << '\n';
    }
    out.results = {{"instances", n_inst},
                   {"t_mean_spacings", t_spacings},
                   {"all_nondegenerate", all_nondeg},
                   {"max_identity_error", max_id},
                   {"max_quadrature_error", max_quad},
                   {"max_pinching_error", max_pinch}};
    out.check("dephasing-equals-diagonal-ensemble", "dynamics.dephasing-identity", all_nondeg && max_id <= 1e-12,
              "max error " + num(max_id));
    out.check("quadrature-agrees", "dynamics.quadrature-average", max_quad <= 1e-2, "max error " + num(max_quad));
    out.check("averaging-idempotent", "dynamics.pinching", max_pinch <= 1e-12, "max error " + num(max_pinch));
    out.tables.push_back({"time_average.csv", csv.str()});
    return out;
}

ExperimentOutput run_time_variance(const ExperimentConfig& c, const RunOptions& opt) {
    ExperimentOutput out;
    const std::size_t n_inst = c.samples.value_or(20);
    const double t_spacings = c.t_max.value_or(1e5);
    const double eps = c.epsilon_or(0.1);
    struct Row {
        Eigen::Index d;
        std::size_t attempts;
        double formula, quadrature, rel_err, capped, capped_bound;
        bool exact, capped_holds;
    };
    const auto rows = parallel_map(n_inst, opt.jobs, [&](std::size_t i) {
        Rng rng(c.seed, i);
        const auto d = static_cast<Eigen::Index>(4 + rng.below(5));
        std::size_t attempts = 0;
        // resample until every gap difference exceeds 1% of the mean spacing
        for (;;) {
            ++attempts;
            const auto spec = eig_hermitian(gue(d, rng));
            const double spacing = 1.0 / inverse_mean_spacing(spec.eigenvalues());
            if (gap_degeneracy_scan(spec.eigenvalues(), 0.01 * spacing, 0).count != 0) continue;
            const CVector psi = sample_sphere(d, rng);
            const CMatrix a = unit_hermitian(d, rng);
            const EvolutionContext ctx(spec, PureState(psi));
            const auto tv = time_variance(ctx, a);
            const auto quad = quadrature_time_average(ctx, a, t_spacings);

            CMatrix b = spec.in_eigenbasis(unit_hermitian(d, rng));
            double off = 0.0;
            for (Eigen::Index q = 0; q < d; ++q)
                for (Eigen::Index p = 0; p < d; ++p)
                    if (p != q) off = std::max(off, std::abs(b(p, q)));
            for (Eigen::Index q = 0; q < d; ++q)
                for (Eigen::Index p = 0; p < d; ++p)
                    if (p != q) b(p, q) *= 0.999 * eps / off;
            const CMatrix& v = spec.dense();
            CMatrix capped_a = v * b * v.adjoint();
            capped_a = (capped_a + capped_a.adjoint()).eval() / 2.0;
            const auto capped = time_variance(ctx, capped_a);
            return Row{d, attempts, tv.value, quad.variance, std::abs(quad.variance - tv.value) / tv.value,
                       capped.value, eps * eps, tv.exact, capped.value <= eps * eps && capped.bound_holds};
        }
    });

    // two-level closed form: H = diag(0, 1), c = (1, 1)/sqrt 2, A = sigma_x
    RVector e2(2);
    e2 << 0.0, 1.0;
    const SpectralDecomposition two(e2, std::vector<Eigen::Index>{0, 1});
    CVector c2(2);
    c2 << 1.0 / std::numbers::sqrt2, 1.0 / std::numbers::sqrt2;
    const EvolutionContext ctx2(two, PureState(c2));
    const double two_level = time_variance(ctx2, pauli_x()).value;
    const double two_level_quad = quadrature_time_average(ctx2, pauli_x(), 1e3).variance;

    double max_rel = 0.0;
    bool all_exact = true, all_capped = true;
    std::ostringstream csv;
    csv << "# experiment: time-variance\n# seed: " << c.seed << "\n# T_mean_spacings: " << num(t_spacings)
        << "\ninstance,d,attempts,formula,quadrature,relative_error,capped_value,capped_bound\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        max_rel = std::max(max_rel, r.rel_err);
        all_exact = all_exact && r.exact;
        all_capped = all_capped && r.capped_holds;
        csv << i << ',' << r.d << ',' << r.attempts << ',' << num(r.formula) << ',' << num(r.quadrature) << ','
            << num(r.rel_err) << ',' << num(r.capped) << ',' << num(r.capped_bound) << '\n';
    }
    out.results = {{"instances", n_inst},
                   {"t_mean_spacings", t_spacings},
                   {"max_relative_error", max_rel},
                   {"all_exact", all_exact},
                   {"epsilon", eps},
                   {"two_level_formula", two_level},
                   {"two_level_quadrature", two_level_quad}};
    out.check("formula-matches-quadrature", "dynamics.time-variance", all_exact && max_rel <= 0.05,
              "max relative error " + num(max_rel));
    out.check("capped-offdiagonals-bound", "dynamics.time-variance-bound", all_capped);
    out.check("two-level-closed-form", "dynamics.time-variance",
              std::abs(two_level - 0.5) <= 1e-14 && std::abs(two_level_quad - 0.5) <= 1e-2,
              "formula " + num(two_level) + " quadrature " + num(two_level_quad));
    out.tables.push_back({"time_variance.csv", csv.str()});
    return out;
}

// ---------------------------------------------------------------- concentration

ExperimentOutput run_psw(const ExperimentConfig& c, const RunOptions& opt) {
    ExperimentOutput out;
    const int n = c.n_sites.value_or(14);
    const std::size_t d = pow2(n);
    const std::size_t d1 = c.d1.value_or(2);
    const double et = c.eps_tilde_or(0.3);
    const std::size_t n_samples = c.samples.value_or(10000);
    const Bipartition bp = abstract_bipartition(d, d1);
    const auto r = psw_check(Subspace::full(d), bp, et, n_samples, c.seed, opt.jobs);
    out.results = {{"dmc", d},           {"d1", d1},
                   {"eps_tilde", et},    {"samples", r.n_samples},
                   {"threshold", r.threshold}, {"bound", r.bound},
                   {"violations", r.violations}, {"rate", r.rate},
                   {"slack", r.slack},   {"mean_distance", r.mean_distance},
                   {"max_distance", r.max_distance}};
    out.check("violation-rate-within-bound", "typicality.psw-bound", r.holds,
              "rate " + num(r.rate) + " bound " + num(r.bound) + " slack " + num(r.slack));
    return out;
}

ExperimentOutput run_canonical_typicality(const ExperimentConfig& c, const RunOptions& opt) {
    ExperimentOutput out;
    const std::size_t n = c.samples.value_or(10000);
    Rng rng(c.seed, 0x636f6e63);
    const std::size_t ambient = 128, k = c.dim.value_or(64);
    std::vector<Eigen::Index> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    const Subspace sub(ambient, idx);
    const CMatrix a = unit_hermitian(static_cast<Eigen::Index>(ambient), rng);
    const double ceps = c.epsilon_or(0.1);
    const auto v = variance_bound_check(a, sub, n, c.seed, ceps, opt.jobs);

    // single-site marginals of random states on a 2^12 space
    const int n_sites = c.n_sites.value_or(12);
    const std::size_t n_mite = std::min<std::size_t>(n, 200);
    const Subspace full = Subspace::full(pow2(n_sites));
    const MiteReference ref(full, n_sites, singletons(n_sites));
    const auto worst = parallel_map(n_mite, opt.jobs, [&](std::size_t i) {
        return ref.test(sample_uniform(full, c.seed + 1, i).amplitudes(), 0.1).worst();
    });
    const auto pass = static_cast<double>(std::count_if(worst.begin(), worst.end(), [](double x) { return x < 0.1; }));
    const double frac = pass / static_cast<double>(n_mite);

    out.results = {{"ambient", ambient},
                   {"subspace_dim", k},
                   {"samples", n},
                   {"mean", v.mean},
                   {"exact_mean", v.exact_mean},
                   {"variance", v.variance},
                   {"exact_variance", v.exact_variance},
                   {"bound", v.bound},
                   {"chebyshev_eps", v.cheb_eps},
                   {"chebyshev_fraction", v.cheb_fraction},
                   {"chebyshev_bound", v.cheb_bound},
                   {"single_site_pass_fraction", frac},
                   {"single_site_worst_max", *std::max_element(worst.begin(), worst.end())}};
    out.check("mean-matches-trace", "typicality.variance-bound", v.mean_ok,
              "mean " + num(v.mean) + " exact " + num(v.exact_mean));
    out.check("variance-below-bound", "typicality.variance-bound", v.variance_ok,
              "variance " + num(v.variance) + " bound " + num(v.bound));
    out.check("chebyshev-count", "typicality.chebyshev", v.cheb_ok,
              "fraction " + num(v.cheb_fraction) + " bound " + num(v.cheb_bound));
    out.check("random-states-locally-thermal", "typicality.mite-most-states", frac >= 0.99, "fraction " + num(frac));
    return out;
}

// ---------------------------------------------------------------- GAP

ExperimentOutput run_gap_sampler(const ExperimentConfig& c, const RunOptions& opt) {
    ExperimentOutput out;
    const auto d = static_cast<Eigen::Index>(c.dim.value_or(16));
    const std::size_t n = c.samples.value_or(10000);
    const double beta = c.beta.value_or(1.0);
    Rng rng(c.seed, 0x67617073);

    CMatrix g(d, d);
    for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index i = 0; i < d; ++i) g(i, j) = rng.complex_normal();
    CMatrix wishart = g * g.adjoint();
    wishart /= wishart.trace().real();
    const CMatrix iso = haar_isometry(d, std::min<Eigen::Index>(4, d), rng);
    const CMatrix flat = iso * iso.adjoint() / static_cast<double>(iso.cols());
    const DensityMatrix gibbs = build_gibbs(HermitianOperator(gue(d, rng)), beta);
    const std::vector<std::pair<std::string, DensityMatrix>> states{
        {"wishart", DensityMatrix(wishart)}, {"rank4-flat", DensityMatrix(flat)}, {"gibbs", gibbs}};

    json rows = json::array();
    bool all_ok = true;
    for (std::size_t k = 0; k < states.size(); ++k) {
        const auto& [name, rho] = states[k];
        double dist[2];
        const GapMethod methods[2] = {GapMethod::importance_resampling, GapMethod::exact_mixture};
        for (int m = 0; m < 2; ++m) {
            const GapSampler sampler(rho, methods[m]);
            const CMatrix mean = mean_projector(static_cast<std::size_t>(d), n, opt.jobs, [&](std::size_t i) {
                return sampler.sample(c.seed + 10 * k + static_cast<std::uint64_t>(m), i).amplitudes();
            });
            dist[m] = 0.5 * trace_norm_distance(mean, rho.matrix());
        }
        all_ok = all_ok && dist[0] <= 0.05;
        rows.push_back({{"state", name}, {"trace_distance", dist[0]}, {"trace_distance_exact_mixture", dist[1]}});
    }

    // GAP of the maximally mixed state against the uniform moments
    const GapSampler uniform(DensityMatrix::maximally_mixed(static_cast<std::size_t>(d)));
    const std::size_t n_mom = std::max<std::size_t>(n, 1000);
    const auto coeffs = parallel_map(n_mom, opt.jobs, [&](std::size_t i) { return uniform.sample(c.seed + 99, i).amplitudes(); });
    const auto mom = moment_report(coeffs);

    out.results = {{"dim", d}, {"samples", n}, {"beta", beta}, {"states", rows}, {"uniform_max_z", mom.max_z()}};
    out.check("sample-mean-reproduces-rho", "gap.mean-state", all_ok);
    out.check("gap-of-identity-is-uniform", "gap.uniform", mom.max_z() <= 5.0, "max z " + num(mom.max_z()));
    return out;
}

ExperimentOutput run_gap_probe(const ExperimentConfig& c, const RunOptions& opt) {
    ExperimentOutput out;
    const int n = c.n_sites.value_or(8);
    const SpinRegister reg(n);
    ModelParams p;
    p.j = c.j_or(1.0);
    p.gamma = c.gamma_or(0.5);
    p.periodic = c.periodic_or(false);
    p.fields = sample_fields(n, c.w_or(0.5), c.seed).fields;
    const auto spec = eig_hermitian(build_h5(reg, p));
    const double beta = c.beta.value_or(0.5);
    std::vector<SiteSet> regions = singletons(n);
    for (int i = 0; i + 1 < n; ++i) regions.push_back({i, i + 1});
    const auto r = gap_mite_conjecture_probe(spec, beta, regions, c.samples.value_or(500), c.seed, opt.jobs);
    std::ostringstream csv;
    csv << "# experiment: gap-mite-probe\n# seed: " << c.seed << "\n# beta: " << num(beta)
        << "\nregion,median,q1,q3,mean,max\n";
    for (std::size_t k = 0; k < regions.size(); ++k) {
        std::string label;
        for (int s : regions[k]) label += (label.empty() ? "" : " ") + std::to_string(s);
        const auto& s = r.per_region[k];
        csv << label << ',' << num(s.median) << ',' << num(s.q1) << ',' << num(s.q3) << ',' << num(s.mean) << ','
            << num(s.max) << '\n';
    }
    out.results = {{"n_sites", n}, {"beta", beta}, {"worst", stats_json(r.worst)}};
    out.tables.push_back({"gap_probe.csv", csv.str()});
    return out;
}

// ---------------------------------------------------------------- MITE and MATE

ExperimentOutput run_mite_implies_mate(const ExperimentConfig& c, const RunOptions& opt) {
    ExperimentOutput out;
    const int n = c.n_sites.value_or(12);
    const SpinRegister reg = make_register(c, n, 4);
    const double res = c.resolution.value_or(5.0);
    const double eps = c.epsilon_or(0.3), delta = c.delta_or(0.5);
    const std::size_t n_samples = c.samples.value_or(1000);

    const auto family = build_cell_magnetization(reg, Axis::z, {res});
    auto decomp = joint_decomposition(family);
    decomp = decomp.with_equilibrium(find_equilibrium_macrostate(decomp));
    const Subspace full = Subspace::full(reg.dim());
    const MiteReference ref(full, n, reg.cells());

    // one in ten samples lives in a random non-equilibrium sector
    std::vector<std::size_t> others;
    for (std::size_t k = 0; k < decomp.size(); ++k)
        if (k != decomp.equilibrium()->index) others.push_back(k);
    const auto amps = parallel_map(n_samples, opt.jobs, [&](std::size_t i) {
        if (i % 10 == 9 && !others.empty()) {
            Rng rng(c.seed, i);
            const auto& sec = decomp.sectors()[others[rng.below(others.size())]];
            return sample_uniform(sec.subspace, c.seed + 1, i).amplitudes();
        }
        return sample_uniform(full, c.seed, i).amplitudes();
    });
    std::vector<PureState> samples;
    samples.reserve(amps.size());
    for (const auto& a : amps) samples.emplace_back(a);
    const auto r = mite_implies_mate_check(samples, decomp, family, ref, eps, delta);

    // union bound: each cell's out-of-bin probability moves by at most eps / 2
    double rigorous = 0.0;
    for (std::size_t k = 0; k < reg.cells().size(); ++k) {
        const auto cell_reg = SpinRegister(static_cast<int>(reg.cells()[k].size()));
        std::size_t inside = 0;
        for (std::size_t b = 0; b < cell_reg.dim(); ++b) {
            int m = 0;
            for (int s = 0; s < cell_reg.n_sites(); ++s) m += ((b >> s) & 1u) ? -1 : 1;
            if (std::abs(coarse_grain(m, {res}) - decomp.eq_sector().nu[k]) < 1e-9) ++inside;
        }
        rigorous += 1.0 - static_cast<double>(inside) / static_cast<double>(cell_reg.dim()) + eps / 2.0;
    }
    out.results = {{"n_sites", n},
                   {"epsilon_mate", decomp.epsilon()},
                   {"epsilon_mite", eps},
                   {"delta", delta},
                   {"samples", r.n_samples},
                   {"in_mite", r.n_mite},
                   {"in_mate", r.n_mate},
                   {"both", r.n_both},
                   {"mate_not_mite", r.mate_not_mite},
                   {"violations", r.violations},
                   {"max_worst_distance", r.max_worst_distance},
                   {"min_mate_weight", r.min_mate_weight},
                   {"union_bound_delta", rigorous}};
    out.check("no-mite-without-mate", "mite-mate.implication", r.violations == 0,
              std::to_string(r.violations) + " violations");
    out.check("mite-states-present", "mite-mate.implication", r.n_mite > 0, std::to_string(r.n_mite) + " in MITE");
    return out;
}

ExperimentOutput run_adversarial(const ExperimentConfig& c, const RunOptions& opt) {
    ExperimentOutput out;
    const std::size_t d = c.dim.value_or(1024);
    const std::size_t n = c.samples.value_or(100);
    const std::size_t d0 = c.d0.value_or(4), d1 = c.d1.value_or(4);
    const double eps = c.epsilon_or(0.25);
    const std::size_t n_sub = c.t_steps.value_or(10);
    struct Row {
        double purity, distance, most_fraction;
        std::size_t most_passes;
    };
    const auto rows = parallel_map(n, opt.jobs, [&](std::size_t i) {
        const CVector psi = sample_uniform(Subspace::full(d), c.seed, i).amplitudes();
        const Bipartition bp = adversarial_subsystem(psi, d1, c.seed + i);
        const CMatrix rho1 = bp.reduce(psi);
        const CMatrix mixed = CMatrix::Identity(rho1.rows(), rho1.cols()) / static_cast<double>(d1);
        const auto most = mite_most_estimate(psi, d0, n_sub, eps, c.seed ^ (0x9e3779b97f4a7c15ULL * (i + 1)), 1);
        return Row{(rho1 * rho1).trace().real(), trace_norm_distance(rho1, mixed), most.fraction, most.passes};
    });
    double max_purity_err = 0.0, min_dist = 2.0, min_frac = 1.0;
    std::size_t passes = 0;
    for (const auto& r : rows) {
        max_purity_err = std::max(max_purity_err, std::abs(r.purity - 1.0));
        min_dist = std::min(min_dist, r.distance);
        passes += r.most_passes;
        min_frac = std::min(min_frac, r.most_fraction);
    }
    const double mean_frac = static_cast<double>(passes) / static_cast<double>(n * n_sub);
    out.results = {{"dim", d},
                   {"states", n},
                   {"d0", d0},
                   {"d1", d1},
                   {"epsilon", eps},
                   {"subsystems_per_state", n_sub},
                   {"max_purity_error", max_purity_err},
                   {"min_adversarial_distance", min_dist},
                   {"mite_most_fraction", mean_frac},
                   {"mite_most_min_fraction", min_frac}};
    out.check("adversarial-reduced-state-pure", "subsystems.adversarial", max_purity_err <= 1e-10,
              "max |purity - 1| " + num(max_purity_err));
    out.check("adversarial-fails-mite", "subsystems.adversarial", min_dist >= eps, "min distance " + num(min_dist));
    out.check("most-subsystems-pass", "subsystems.mite-most", mean_frac >= 0.9, "fraction " + num(mean_frac));
    return out;
}

ExperimentOutput run_normality(const ExperimentConfig& c, const RunOptions& opt) {
    ExperimentOutput out;
    const std::size_t dmc = c.dim.value_or(2048);
    const std::size_t block = c.d1.value_or(128);
    if (block == 0 || dmc % block != 0) throw ConfigError("normality: d1 must divide dim");
    const auto decomp = block_decomposition(dmc, std::vector<std::size_t>(dmc / block, block), false);
    const std::size_t n = c.samples.value_or(200);
    const Subspace full = Subspace::full(dmc);
    const auto pass = parallel_map(n, opt.jobs, [&](std::size_t i) -> char {
        return normality_test(sample_uniform(full, c.seed, i), decomp, {0.5, 1.5}).normal ? 1 : 0;
    });
    const double rate = static_cast<double>(std::count(pass.begin(), pass.end(), 1)) / static_cast<double>(n);
    const PureState uniform_sup = PureState::from_unnormalized(CVector::Ones(static_cast<Eigen::Index>(dmc)));
    const auto exact = normality_test(uniform_sup, decomp);
    out.results = {{"dmc", dmc}, {"sector_dim", block}, {"samples", n}, {"pass_rate", rate}};
    out.check("random-states-normal", "normality.typical", rate >= 0.9, "pass rate " + num(rate));
    out.check("uniform-superposition-normal", "normality.definition", exact.normal);
    return out;
}

ExperimentOutput run_ensemble(const ExperimentConfig& c, const RunOptions&) {
    ExperimentOutput out;
    const int n = c.n_sites.value_or(8);
    const SpinRegister reg(n);
    ModelParams p;
    p.j = c.j_or(1.0);
    p.gamma = c.gamma_or(0.5);
    p.periodic = c.periodic_or(false);
    p.fields = sample_fields(n, c.w_or(0.5), c.seed).fields;
    const auto spec = eig_hermitian(build_h5(reg, p));
    const auto shell_idx = select_shell(spec, c, 0.3, 0.5);
    std::vector<SiteSet> regions;
    for (int len = 1; len <= std::min(3, n); ++len)
        for (int s = 0; s + len <= n; ++s) {
            SiteSet r(static_cast<std::size_t>(len));
            std::iota(r.begin(), r.end(), s);
            regions.push_back(r);
        }
    const double eps = c.epsilon_or(0.1);
    const auto r = ensemble_equivalence_sweep(spec, shell_idx, regions, eps);
    std::ostringstream csv;
    csv << "# experiment: ensemble-equivalence\n# seed: " << c.seed << "\n# beta: " << num(r.beta)
        << "\nregion,diameter,distance\n";
    for (const auto& row : r.rows) {
        std::string label;
        for (int s : row.region) label += (label.empty() ? "" : " ") + std::to_string(s);
        csv << label << ',' << row.diameter << ',' << num(row.distance) << '\n';
    }
    json by_d = json::array();
    for (const auto& [dia, dist] : r.max_by_diameter) by_d.push_back({{"diameter", dia}, {"max_distance", dist}});
    out.results = {{"n_sites", n},
                   {"shell_dim", shell_idx.size()},
                   {"beta", r.beta},
                   {"shell_mean_energy", r.shell_mean_energy},
                   {"gibbs_mean_energy", r.gibbs_mean_energy},
                   {"max_by_diameter", by_d},
                   {"ell0", r.ell0}};
    const double scale = 1.0 + std::abs(r.shell_mean_energy);
    out.check("beta-matches-shell-energy", "ensemble.beta", std::abs(r.gibbs_mean_energy - r.shell_mean_energy) <= 1e-8 * scale,
              "gibbs " + num(r.gibbs_mean_energy) + " shell " + num(r.shell_mean_energy));
    out.tables.push_back({"ensemble.csv", csv.str()});
    return out;
}

// ---------------------------------------------------------------- estimates

ExperimentOutput run_estimates(const ExperimentConfig& c, const RunOptions&) {
    ExperimentOutput out;
    (void)c;
    // cell estimate at the worked parameters
    const LogNumber eps_big = mate_epsilon_estimate(1e9, 1e20, 1e-12);
    const double eps_expected = 9.0 - 1e5 / std::numbers::ln10;
    const LogNumber delta_small = delta_choice(LogNumber::from_log10(-100.0));

    // small case: N = 20, m = 2, dM = 0.2; deviation means |N_j - N/m| > N dM
    const double small_m = 2.0, small_n = 20.0, small_dm = 0.2;
    const auto small = exact_binomial_deviation(small_n, small_m, small_m * small_dm);
    const double heuristic_p = std::exp(-small_m * small_n * small_dm * small_dm);
    const auto tiny = exact_binomial_deviation(4, 2, 0.1);

    // every small instance: Bernstein bound >= exact tail
    std::ostringstream csv;
    csv << "# experiment: estimates\nn_total,m_cells,sigmas,exact_log10,gaussian_log10,bound_log10\n";
    std::size_t n_grid = 0, n_ok = 0;
    for (double nt : {20.0, 50.0, 100.0, 1000.0, 10000.0})
        for (double m : {2.0, 3.0, 5.0, 10.0, 100.0}) {
            if (nt / m < 1.0) continue;
            for (double k : {2.0, 2.5, 3.0, 4.0}) {
                const double p = 1.0 / m;
                const double sigma = std::sqrt(nt * p * (1.0 - p));
                const auto r = exact_binomial_deviation(nt, m, k * sigma / (nt / m));
                ++n_grid;
                n_ok += r.bound.log10() >= r.exact.log10() - 1e-12;
                csv << num(nt) << ',' << num(m) << ',' << num(k) << ',' << num(r.exact.log10()) << ','
                    << num(r.gaussian.log10()) << ',' << num(r.bound.log10()) << '\n';
            }
        }

    // level counting for the cubic metre of air
    const auto air = ideal_gas_level_count(2e25, 1.0, 5e-26, 300.0, 1e-2);
    const double loglog = air.levels.log10_log10();
    const double loglog_rel = std::abs(loglog - 25.0) / 25.0;

    // exorbitant cell count
    const double n_cell = 2.5e16;
    const auto exo = exorbitant_cell_count(n_cell, 1e-3);
    const double exo_rel = std::abs(exo.exponent - n_cell / 2e6) / (n_cell / 2e6);

    const auto dmc10 = dmc_heuristics(10);

    out.results = {{"mate_epsilon_log10", eps_big.log10()},
                   {"delta_for_1e-100_log10", delta_small.log10()},
                   {"small_case_exact_per_cell", small.exact.value()},
                   {"small_case_gaussian_p", heuristic_p},
                   {"small_case_bernstein", small.bound.value()},
                   {"small_case_union_bound", small_m * heuristic_p},
                   {"n4_m2_deviation", tiny.exact.value()},
                   {"grid_instances", n_grid},
                   {"grid_bound_holds", n_ok},
                   {"air_log10_levels", air.levels.log10()},
                   {"air_log10_log10_levels", loglog},
                   {"air_loglog_relative_error", loglog_rel},
                   {"air_per_particle_coefficient", air.per_particle},
                   {"air_offset", air.offset},
                   {"exorbitant_exponent", exo.exponent},
                   {"exorbitant_log10_cells", exo.cells.log10()},
                   {"exorbitant_log10_log10_cells", exo.cells.log10_log10()},
                   {"dmc_n10_log10", {dmc10.lower.log10(), dmc10.upper.log10()}}};
    out.check("cell-epsilon-formula", "estimates.mate-epsilon",
              std::abs(eps_big.log10() - eps_expected) <= 1e-9 * std::abs(eps_expected), num(eps_big.log10()));
    out.check("delta-is-root-epsilon", "estimates.delta-choice", std::abs(delta_small.log10() + 50.0) <= 1e-12);
    out.check("small-case-gaussian-above-exact", "estimates.gaussian-bound",
              heuristic_p >= small.exact.value() && small.bound >= small.exact,
              "exact " + num(small.exact.value()) + " p " + num(heuristic_p));
    out.check("bernstein-above-exact-grid", "estimates.gaussian-bound", n_ok == n_grid,
              std::to_string(n_ok) + "/" + std::to_string(n_grid));
    out.check("four-particles-two-cells", "estimates.binomial-exact", std::abs(tiny.exact.value() - 0.625) <= 1e-12,
              num(tiny.exact.value()));
    out.check("air-per-particle-coefficient", "estimates.air-levels", std::abs(air.per_particle - 33.6) <= 0.1,
              num(air.per_particle));
    out.check("air-loglog-magnitude", "estimates.air-levels", loglog_rel <= 0.05,
              "log10 log10 n = " + num(loglog) + " vs 25");
    out.check("exorbitant-exponent", "estimates.exorbitant-cells", exo_rel <= 0.01, num(exo.exponent));
    out.check("dmc-heuristics", "estimates.dmc-range",
              std::abs(dmc10.lower.log10() - 1.0) <= 1e-12 && std::abs(dmc10.upper.log10() - 300.0) <= 1e-12);
    out.tables.push_back({"binomial_grid.csv", csv.str()});
    return out;
}

// ---------------------------------------------------------------- ETH variants

ExperimentOutput run_offdiag_eth(const ExperimentConfig& c, const RunOptions&) {
    ExperimentOutput out;
    const int n = c.n_sites.value_or(6);
    const SpinRegister reg(n);
    const auto fields = sample_fields(n, c.w_or(1.0), c.seed).fields;
    const auto spec2 = eig_hermitian(build_h2(reg, fields));
    const CMatrix sx0 = embed_site_operator(reg, 0, pauli_x()).matrix();
    std::vector<Eigen::Index> all(reg.dim());
    std::iota(all.begin(), all.end(), 0);
    const auto r2 = offdiag_eth_scan(spec2, sx0, all);
    const CMatrix ae = spec2.in_eigenbasis(sx0);
    bool selection = true;
    for (Eigen::Index j = 0; j < ae.cols(); ++j)
        for (Eigen::Index i = 0; i < ae.rows(); ++i) {
            if (i == j) continue;
            const double a = std::abs(ae(i, j));
            selection = selection && (a <= 1e-12 || std::abs(a - 1.0) <= 1e-12);
        }

    ModelParams p;
    p.j = c.j_or(1.0);
    p.gamma = c.gamma_or(0.5);
    p.fields = fields;
    const auto spec5 = eig_hermitian(build_h5(reg, p));
    const auto shell = select_shell(spec5, c, 0.4, 0.6);
    const auto r5 = offdiag_eth_scan(spec5, sx0, shell);
    std::ostringstream csv;
    csv << "# experiment: offdiag-eth\n# seed: " << c.seed << "\nbin_lo,bin_hi,count\n";
    for (std::size_t k = 0; k < r5.counts.size(); ++k)
        csv << num(r5.bin_edges[k]) << ',' << num(r5.bin_edges[k + 1]) << ',' << r5.counts[k] << '\n';
    out.results = {{"n_sites", n},
                   {"h2_max_offdiag", r2.max_offdiag},
                   {"h2_selection_rule", selection},
                   {"h5_shell_dim", shell.size()},
                   {"h5_max_offdiag", r5.max_offdiag},
                   {"h5_pairs", r5.n_pairs}};
    out.check("spin-flip-selection-rule", "eth.offdiag-selection-rule", selection && std::abs(r2.max_offdiag - 1.0) <= 1e-12);
    out.tables.push_back({"h5_offdiag_histogram.csv", csv.str()});
    return out;
}

ExperimentOutput run_random_basis_eth(const ExperimentConfig& c, const RunOptions& opt) {
    ExperimentOutput out;
    const std::size_t dmc = c.dim.value_or(1024);
    const std::size_t seeds = c.samples.value_or(10);
    const double eps_target = c.epsilon_or(1e-3), delta = c.delta_or(0.05);
    const auto off = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(eps_target * static_cast<double>(dmc))));
    const auto decomp = block_decomposition(dmc, {dmc - off, off});
    const Subspace shell = Subspace::full(dmc);
    std::vector<Eigen::Index> all(dmc);
    std::iota(all.begin(), all.end(), 0);

    std::size_t full_mate = 0;
    double min_fraction = 1.0;
    bool average_ok = true, applicable = true;
    for (std::size_t s = 0; s < seeds; ++s) {
        const std::uint64_t seed = c.seed + s;
        Rng rng(seed, 0x73706563);
        RVector evals(static_cast<Eigen::Index>(dmc));
        for (Eigen::Index j = 0; j < evals.size(); ++j) evals(j) = static_cast<double>(j) + rng.uniform(0.0, 0.5);
        const SpectralDecomposition spec(evals, random_basis_eigenvectors(shell, seed));
        const auto scan = eth_scan(spec, all, decomp, {}, 0.1, delta, opt.jobs);
        full_mate += scan.mate_fraction == 1.0;
        min_fraction = std::min(min_fraction, scan.mate_fraction);
        if (s == 0) {
            const EvolutionContext ctx(spec, sample_uniform(shell, seed, 1));
            const auto avg = mate_eth_average_bound(ctx, decomp.eq_subspace(), delta);
            average_ok = avg.bound_holds;
            applicable = avg.applicable;
            out.results["first_seed_time_average"] = avg.average;
        }
    }
    const double rate = static_cast<double>(full_mate) / static_cast<double>(seeds);
    out.results["dmc"] = dmc;
    out.results["epsilon"] = decomp.epsilon();
    out.results["delta"] = delta;
    out.results["seeds"] = seeds;
    out.results["seeds_all_in_mate"] = full_mate;
    out.results["min_mate_fraction"] = min_fraction;
    out.check("all-eigenstates-in-mate", "eth.random-basis-mate", rate >= 0.95, "rate " + num(rate));
    out.check("time-average-stays-in-mate", "dynamics.mate-eth-average", applicable && average_ok);
    return out;
}

}  // namespace thermeq::cli
