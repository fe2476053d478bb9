// Worked examples: product states, the random-field chain, the interacting chain.

#include "experiment_util.hpp"

#include "thermeq/diagnostics.hpp"
#include "thermeq/dynamics.hpp"
#include "thermeq/models.hpp"
#include "thermeq/parallel.hpp"
#include "thermeq/partial_trace.hpp"
#include "thermeq/typicality.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace thermeq::cli {

using nlohmann::json;

namespace {

// Number of basis strings whose coarse cell magnetizations all equal nu.
std::size_t count_sector_strings(const SpinRegister& reg, const std::vector<double>& nu, double resolution) {
    std::size_t count = 0;
    for (std::size_t b = 0; b < reg.dim(); ++b) {
        bool match = true;
        for (std::size_t k = 0; k < reg.cells().size() && match; ++k) {
            int m = 0;
            for (int s : reg.cells()[k]) m += ((b >> s) & 1u) ? -1 : 1;
            match = std::abs(coarse_grain(m, {resolution}) - nu[k]) < 1e-9;
        }
        if (match) ++count;
    }
    return count;
}

json region_rows(const MiteVerdict& v) {
    json rows = json::array();
    for (const auto& r : v.per_region) rows.push_back({{"region", r.region}, {"distance", r.distance}});
    return rows;
}

}  // namespace

ExperimentOutput run_example1(const ExperimentConfig& c, const RunOptions&) {
    ExperimentOutput out;
    const int n = c.n_sites.value_or(4);
    const SpinRegister reg = make_register(c, n, 2);
    const double res = c.resolution.value_or(1.0);
    const double delta = c.delta_or(0.05), eps = c.epsilon_or(0.1);

    const auto family = build_cell_magnetization(reg, Axis::z, {res});
    auto decomp = joint_decomposition(family);
    const auto eq = find_equilibrium_macrostate(decomp);
    decomp = decomp.with_equilibrium(eq);
    const auto& eq_sector = decomp.eq_sector();
    const std::size_t oracle = count_sector_strings(reg, eq_sector.nu, res);

    // alternating up/down: every even cell has zero magnetization
    std::vector<Qubit> factors;
    for (int i = 0; i < n; ++i) factors.push_back(i % 2 == 0 ? ket_up() : ket_down());
    const PureState psi = product_state(reg, factors);
    const auto mate = mate_test(psi, eq_sector.subspace, delta);
    const auto mite = mite_test(psi, Subspace::full(reg.dim()), singletons(n), eps);

    out.results = {{"n_sites", n},
                   {"dim", reg.dim()},
                   {"n_sectors", decomp.size()},
                   {"eq_dim", eq_sector.subspace.rank()},
                   {"eq_nu", eq_sector.nu},
                   {"epsilon_mate", eq.epsilon},
                   {"dominant", eq.dominant},
                   {"mate_weight", mate.weight},
                   {"in_mate", mate.in_mate},
                   {"in_mite", mite.in_mite},
                   {"worst_mite_distance", mite.worst()},
                   {"regions", region_rows(mite)}};
    out.check("eq-dimension-matches-count", "macro.eq-dimension", eq_sector.subspace.rank() == oracle,
              "oracle " + std::to_string(oracle));
    out.check("product-state-in-mate", "mate.definition", mate.in_mate && std::abs(mate.weight - 1.0) <= 1e-12,
              "weight " + num(mate.weight));
    out.check("product-state-not-in-mite", "mite.product-state",
              !mite.in_mite && std::abs(mite.worst() - 1.0) <= 1e-10, "worst distance " + num(mite.worst()));
    out.check("implication-one-directional", "mite-mate.one-directional", !(mite.in_mite && !mate.in_mate));
    return out;
}

ExperimentOutput run_example2(const ExperimentConfig& c, const RunOptions& opt) {
    ExperimentOutput out;
    const int n = c.n_sites.value_or(10);
    const SpinRegister reg = make_register(c, n, 2);
    const double w = c.w_or(1.0);
    const auto fields = sample_fields(n, w, c.seed);
    const auto spec = eig_hermitian(build_h2(reg, fields.fields));
    const auto shell_idx = select_shell(spec, c, 0.25, 0.75);
    const Subspace shell = spec.span(shell_idx);
    const double eps = c.epsilon_or(0.5), delta = c.delta_or(0.05);

    const auto family = build_cell_magnetization(reg, Axis::z, {c.resolution.value_or(1.0)});
    auto decomp = joint_decomposition(family, shell);
    decomp = decomp.with_equilibrium(find_equilibrium_macrostate(decomp));
    const auto regions = singletons(n);
    const auto scan = eth_scan(spec, shell_idx, decomp, regions, eps, delta, opt.jobs);

    // every single-site distance of every shell eigenstate
    const MiteReference ref(shell, n, regions);
    double min_d = 2.0, max_d = 0.0;
    for (Eigen::Index j : shell_idx) {
        const auto v = ref.test(spec.vector(j), eps);
        for (const auto& r : v.per_region) {
            min_d = std::min(min_d, r.distance);
            max_d = std::max(max_d, r.distance);
        }
    }

    // cell energies under the dynamics of a random initial state
    const PureState psi0 = sample_uniform(Subspace::full(reg.dim()), c.seed, 1);
    const EvolutionContext ctx(spec, psi0);
    const std::size_t steps = c.t_steps.value_or(50);
    const double t_max = c.t_max.value_or(10.0);
    std::vector<double> grid;
    for (std::size_t k = 0; k <= steps; ++k) grid.push_back(t_max * static_cast<double>(k) / static_cast<double>(steps));
    double max_drift = 0.0;
    std::ostringstream cell_csv;
    cell_csv << "# experiment: example2-alignment\n# seed: " << c.seed << "\ncell,t,energy\n";
    for (std::size_t k = 0; k < reg.cells().size(); ++k) {
        std::vector<LocalTerm> terms;
        for (int s : reg.cells()[k]) terms.push_back({{s}, fields.fields[static_cast<std::size_t>(s)] * pauli_z()});
        const auto series = relaxation_experiment(ctx, Observable::local_sum(n, terms), grid, opt.jobs);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            max_drift = std::max(max_drift, std::abs(series.value[i] - series.value[0]));
            cell_csv << k << ',' << num(grid[i]) << ',' << num(series.value[i]) << '\n';
        }
    }

    out.results = {{"n_sites", n},
                   {"w", w},
                   {"fields", fields.fields},
                   {"shell_dim", shell_idx.size()},
                   {"epsilon_mate", scan.epsilon_mate},
                   {"epsilon_mite", eps},
                   {"delta", delta},
                   {"mate_fraction", scan.mate_fraction},
                   {"mite_fraction", scan.mite_fraction},
                   {"in_eq_fraction", scan.in_eq_fraction},
                   {"orthogonal_fraction", scan.orthogonal_fraction},
                   {"mixed_fraction", scan.mixed_fraction},
                   {"basis_count_bound", scan.basis_count_bound},
                   {"min_single_site_distance", min_d},
                   {"max_single_site_distance", max_d},
                   {"max_cell_energy_drift", max_drift}};
    out.check("no-mixed-eigenstates", "eth.alignment-dichotomy", scan.mixed_fraction == 0.0,
              "mixed fraction " + num(scan.mixed_fraction));
    out.check("no-eigenstate-in-mite", "eth.no-mite", scan.mite_fraction == 0.0,
              "mite fraction " + num(scan.mite_fraction));
    out.check("single-site-distance-one", "eth.no-mite", std::abs(min_d - 1.0) <= 1e-10 && std::abs(max_d - 1.0) <= 1e-10,
              "range [" + num(min_d) + ", " + num(max_d) + "]");
    out.check("basis-count", "mate.basis-count", scan.basis_count_holds);
    out.check("cell-energy-invariant", "dynamics.no-energy-transport", max_drift <= 1e-12, "max drift " + num(max_drift));
    out.tables.push_back({"eth_scan.csv", "# experiment: example2-alignment\n# seed: " + std::to_string(c.seed) + "\n" + scan.to_csv()});
    out.tables.push_back({"cell_energy.csv", cell_csv.str()});
    return out;
}

ExperimentOutput run_example3(const ExperimentConfig& c, const RunOptions& opt) {
    ExperimentOutput out;
    const int n = c.n_sites.value_or(12);
    const SpinRegister reg(n);
    const auto fields = sample_fields(n, c.w_or(1.0), c.seed);
    const auto spec = eig_hermitian(build_h2(reg, fields.fields));
    const PureState psi0 = product_state(reg, std::vector<Qubit>(static_cast<std::size_t>(n), ket_right()));
    const EvolutionContext ctx(spec, psi0);
    SiteSet all(static_cast<std::size_t>(n));
    std::iota(all.begin(), all.end(), 0);
    const auto mx = magnetization(n, all, 'x');

    const std::size_t steps = c.t_steps.value_or(200);
    const double t_max = c.t_max.value_or(20.0);
    std::vector<double> grid;
    for (std::size_t k = 0; k <= steps; ++k) grid.push_back(t_max * static_cast<double>(k) / static_cast<double>(steps));
    const auto series = relaxation_experiment(ctx, mx, grid, opt.jobs);

    double max_err = 0.0;
    std::ostringstream csv;
    csv << "# experiment: example3-x-relaxation\n# seed: " << c.seed << "\n# n_sites: " << n
        << "\n# infinite_time_average: " << num(series.infinite_average) << "\nt,value,closed_form\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double closed = 0.0;
        for (double h : fields.fields) closed += std::cos(2.0 * h * grid[i]);
        max_err = std::max(max_err, std::abs(series.value[i] - closed));
        csv << num(grid[i]) << ',' << num(series.value[i]) << ',' << num(closed) << '\n';
    }
    out.results = {{"n_sites", n},
                   {"fields", fields.fields},
                   {"infinite_time_average", series.infinite_average},
                   {"max_closed_form_error", max_err},
                   {"initial_value", series.value.front()},
                   {"final_value", series.value.back()}};
    out.check("infinite-time-average-zero", "dynamics.x-relaxation", std::abs(series.infinite_average) <= 1e-10,
              "average " + num(series.infinite_average));
    out.check("closed-form-precession", "dynamics.x-precession", max_err <= 1e-10, "max error " + num(max_err));
    out.tables.push_back({"x_magnetization.csv", csv.str()});
    return out;
}

ExperimentOutput run_example4(const ExperimentConfig& c, const RunOptions& opt) {
    ExperimentOutput out;
    const int n = c.n_sites.value_or(6);
    const SpinRegister reg = make_register(c, n, 2);
    const double dm = c.resolution.value_or(1.0);
    const double delta = c.delta_or(0.05);
    const auto d = static_cast<Eigen::Index>(reg.dim());
    const DensityMatrix rho_mc = DensityMatrix::maximally_mixed(reg.dim());

    std::vector<TmateObservable> obs;
    for (std::size_t k = 0; k < reg.cells().size(); ++k) {
        obs.push_back({"Mz_" + std::to_string(k), cell_magnetization_operator(reg, reg.cells()[k], Axis::z), dm});
        obs.push_back({"Mx_" + std::to_string(k), cell_magnetization_operator(reg, reg.cells()[k], Axis::x), dm});
    }
    const CMatrix comm = obs[0].op * obs[1].op - obs[1].op * obs[0].op;
    const double comm_norm = comm.cwiseAbs().maxCoeff();

    // window masses of rho_mc by counting strings with |m| <= dm
    const auto mc = tmate_test(rho_mc, obs, rho_mc, delta);
    double max_mass_err = 0.0;
    for (std::size_t k = 0; k < obs.size(); ++k) {
        const auto& cell = reg.cells()[k / 2];
        std::size_t inside = 0;
        for (std::size_t b = 0; b < reg.dim(); ++b) {
            int m = 0;
            for (int s : cell) m += ((b >> s) & 1u) ? -1 : 1;
            if (std::abs(m) <= dm + 1e-9) ++inside;
        }
        max_mass_err = std::max(max_mass_err, std::abs(mc.entries[k].probability - static_cast<double>(inside) / static_cast<double>(d)));
    }

    const PureState right = product_state(reg, std::vector<Qubit>(static_cast<std::size_t>(n), ket_right()));
    const auto right_v = tmate_test(right, obs, rho_mc, delta);
    double x_prob = 0.0;
    for (std::size_t k = 1; k < obs.size(); k += 2) x_prob = std::max(x_prob, right_v.entries[k].probability);

    // single observable with a window spanning its spectrum
    const double cell_max = static_cast<double>(reg.cells()[0].size());
    const auto wide = tmate_test(right, {{"Mz_0", obs[0].op, cell_max}}, rho_mc, delta);

    const std::size_t n_samples = c.samples.value_or(200);
    const auto hits = parallel_map(n_samples, opt.jobs, [&](std::size_t i) -> char {
        return tmate_test(sample_uniform(Subspace::full(reg.dim()), c.seed, i), obs, rho_mc, delta).in_tmate ? 1 : 0;
    });
    const double frac = static_cast<double>(std::count(hits.begin(), hits.end(), 1)) / static_cast<double>(n_samples);

    json entries = json::array();
    for (const auto& e : mc.entries)
        entries.push_back({{"label", e.label}, {"thermal_value", e.thermal_value}, {"probability", e.probability},
                           {"window_rank", e.window_rank}});
    out.results = {{"n_sites", n},
                   {"window_half_width", dm},
                   {"delta", delta},
                   {"commutator_max_entry", comm_norm},
                   {"micro_canonical_entries", entries},
                   {"max_window_mass_error", max_mass_err},
                   {"right_state_in_tmate", right_v.in_tmate},
                   {"right_state_max_x_probability", x_prob},
                   {"random_state_tmate_fraction", frac}};
    out.check("family-does-not-commute", "tmate.non-commuting", comm_norm > 1e-6, "max |[Mz, Mx]| " + num(comm_norm));
    out.check("mc-window-masses", "tmate.thermal-value", max_mass_err <= 1e-10, "max error " + num(max_mass_err));
    out.check("right-state-fails", "tmate.definition", !right_v.in_tmate && x_prob <= 1e-12,
              "max x-window probability " + num(x_prob));
    out.check("full-window-always-passes", "tmate.definition", wide.in_tmate);
    return out;
}

ExperimentOutput run_example5(const ExperimentConfig& c, const RunOptions& opt) {
    ExperimentOutput out;
    const int n = c.n_sites.value_or(8);
    const SpinRegister reg = make_register(c, n, 2);
    ModelParams p;
    p.j = c.j_or(1.0);
    p.gamma = c.gamma_or(0.3);
    p.periodic = c.periodic_or(false);
    p.fields = sample_fields(n, c.w_or(3.0), c.seed).fields;
    const HermitianOperator h = build_h5(reg, p);
    const auto spec = eig_hermitian(h);
    const auto shell_idx = select_shell(spec, c, 0.4, 0.6);
    const Subspace shell = spec.span(shell_idx);
    const double eps = c.epsilon_or(0.1), delta = c.delta_or(0.05);

    // macro-spaces of the whole register; the z family does not commute with H
    const auto family = build_cell_magnetization(reg, Axis::z, {c.resolution.value_or(1.0)});
    auto decomp = joint_decomposition(family);
    decomp = decomp.with_equilibrium(find_equilibrium_macrostate(decomp));
    const Subspace& eq = decomp.eq_subspace();

    const auto regions = singletons(n);
    const MiteReference ref(shell, n, regions);
    struct Row {
        double weight, worst;
        Alignment a;
    };
    const auto rows = parallel_map(shell_idx.size(), opt.jobs, [&](std::size_t k) {
        const CVector v = spec.vector(shell_idx[k]);
        const double wgt = eq.weight(v);
        return Row{wgt, ref.test(v, eps).worst(), classify_alignment(wgt, delta)};
    });
    std::size_t counts[3] = {0, 0, 0};
    std::size_t mite = 0, mate = 0;
    std::ostringstream csv;
    csv << "# experiment: example5-h5-scan\n# seed: " << c.seed << "\nindex,E,mate_weight,worst_mite_distance,alignment,in_mate,in_mite\n";
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto& r = rows[k];
        ++counts[static_cast<int>(r.a)];
        const bool in_mate = r.weight > 1.0 - delta, in_mite = r.worst < eps;
        mate += in_mate;
        mite += in_mite;
        csv << shell_idx[k] << ',' << num(spec.eigenvalue(shell_idx[k])) << ',' << num(r.weight) << ',' << num(r.worst)
            << ',' << to_string(r.a) << ',' << in_mate << ',' << in_mite << '\n';
    }
    const double total = static_cast<double>(rows.size());
    const CMatrix sz0 = embed_site_operator(reg, 0, pauli_z()).matrix();
    const double comm = (h.matrix() * sz0 - sz0 * h.matrix()).cwiseAbs().maxCoeff();

    out.results = {{"n_sites", n},
                   {"j", p.j},
                   {"gamma", p.gamma},
                   {"fields", p.fields},
                   {"shell_dim", shell_idx.size()},
                   {"epsilon_mate", decomp.epsilon()},
                   {"in_eq_fraction", counts[0] / total},
                   {"orthogonal_fraction", counts[1] / total},
                   {"mixed_fraction", counts[2] / total},
                   {"mate_fraction", mate / total},
                   {"mite_fraction", mite / total},
                   {"commutator_h_sz0", comm}};
    out.check("alignment-classes-partition", "eth.alignment-classes", counts[0] + counts[1] + counts[2] == rows.size());
    out.check("transverse-field-breaks-conservation", "models.h5-not-integrable", p.gamma < 0.1 || comm > 1e-6,
              "max |[H, z_0]| " + num(comm));
    out.tables.push_back({"h5_scan.csv", csv.str()});
    return out;
}

}  // namespace thermeq::cli
