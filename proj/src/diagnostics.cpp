#include "thermeq/diagnostics.hpp"

#include "thermeq/parallel.hpp"
#include "thermeq/partial_trace.hpp"
#include "thermeq/rng.hpp"
#include "thermeq/unitary.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace thermeq {

// ---------------------------------------------------------------- MATE

MateVerdict mate_verdict(double weight, double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("mate_test: delta must lie in (0, 1)");
    return {weight, delta, weight > 1.0 - delta};
}

MateVerdict mate_test(const PureState& psi, const Subspace& p_eq, double delta) {
    if (psi.dim() != p_eq.ambient()) throw std::invalid_argument("mate_test: dimension mismatch");
    return mate_verdict(p_eq.weight(psi), delta);
}

MateVerdict mate_test(const DensityMatrix& rho, const Subspace& p_eq, double delta) {
    if (rho.dim() != p_eq.ambient()) throw std::invalid_argument("mate_test: dimension mismatch");
    return mate_verdict(p_eq.weight(rho), delta);
}

SpectrumLaw SpectrumLaw::fixed(RVector p) {
    if (p.size() == 0) throw std::invalid_argument("SpectrumLaw: empty eigenvalue list");
    if (p.minCoeff() < 0.0) throw std::invalid_argument("SpectrumLaw: negative eigenvalue");
    if (std::abs(p.sum() - 1.0) > 1e-10) throw std::invalid_argument("SpectrumLaw: eigenvalues do not sum to 1");
    return {"fixed", std::move(p)};
}

SpectrumLaw SpectrumLaw::flat(Eigen::Index rank) {
    if (rank < 1) throw std::invalid_argument("SpectrumLaw: rank must be positive");
    return {"flat", RVector::Constant(rank, 1.0 / static_cast<double>(rank))};
}

MixedSweepResult mixed_state_mate_sweep(const Subspace& shell, const MacroDecomposition& decomp,
                                        const SpectrumLaw& law, double delta, std::size_t n_samples,
                                        std::uint64_t seed, int jobs) {
    if (n_samples == 0) throw std::invalid_argument("mixed_state_mate_sweep: no samples");
    (void)SpectrumLaw::fixed(law.p);  // validates the law
    const auto r = law.p.size();
    if (static_cast<std::size_t>(r) > shell.rank())
        throw std::invalid_argument("mixed_state_mate_sweep: law rank exceeds shell dimension");
    const Subspace& eq = decomp.eq_subspace();
    const double eps = decomp.epsilon();
    const auto weights = parallel_map(n_samples, jobs, [&](std::size_t i) {
        Rng rng(seed, i);
        const CMatrix v = haar_isometry(static_cast<Eigen::Index>(shell.rank()), r, rng);
        double w = 0.0;
        for (Eigen::Index j = 0; j < r; ++j) w += law.p(j) * eq.weight(shell.embed(v.col(j)));
        return w;
    });
    MixedSweepResult res;
    res.n_samples = n_samples;
    std::size_t hits = 0;
    res.min_weight = 1.0;
    res.max_weight = 0.0;
    for (double w : weights) {
        if (mate_verdict(w, delta).in_mate) ++hits;
        res.min_weight = std::min(res.min_weight, w);
        res.max_weight = std::max(res.max_weight, w);
    }
    res.fraction = static_cast<double>(hits) / static_cast<double>(n_samples);
    res.bound = 1.0 - eps / delta;
    const double b = std::clamp(res.bound, 0.0, 1.0);
    res.slack = 3.0 * std::sqrt(b * (1.0 - b) / static_cast<double>(n_samples));
    res.holds = res.fraction >= res.bound - res.slack;
    return res;
}

double basis_mate_fraction(const CMatrix& basis, const Subspace& p_eq, double delta) {
    if (static_cast<std::size_t>(basis.rows()) != p_eq.ambient() || basis.cols() == 0)
        throw std::invalid_argument("basis_mate_fraction: dimension mismatch");
    std::size_t hits = 0;
    if (p_eq.is_coordinate()) {
        RVector w = RVector::Zero(basis.cols());
        for (auto i : p_eq.indices()) w += basis.row(i).cwiseAbs2().transpose();
        for (Eigen::Index j = 0; j < w.size(); ++j) hits += mate_verdict(w(j), delta).in_mate ? 1 : 0;
    } else {
        const RVector w = (p_eq.frame().adjoint() * basis).colwise().squaredNorm().transpose();
        for (Eigen::Index j = 0; j < w.size(); ++j) hits += mate_verdict(w(j), delta).in_mate ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(basis.cols());
}

// ---------------------------------------------------------------- MITE

double MiteVerdict::worst() const {
    double w = 0.0;
    for (const auto& r : per_region) w = std::max(w, r.distance);
    return w;
}

MiteReference::MiteReference(const Subspace& shell, int n_sites, std::vector<SiteSet> regions)
    : n_sites_(n_sites), regions_(std::move(regions)) {
    if (shell.ambient() != pow2(n_sites)) throw std::invalid_argument("MiteReference: shell dimension mismatch");
    const SpinRegister reg(n_sites, {}, 62);
    for (auto& r : regions_) {
        reg.check_sites(r);
        std::sort(r.begin(), r.end());
        ref_.push_back(reduced_mc_state(shell, n_sites, r));
    }
}

MiteVerdict MiteReference::verdict(const std::vector<CMatrix>& reduced, double epsilon) const {
    if (!(epsilon > 0.0)) throw std::invalid_argument("mite_test: epsilon must be positive");
    MiteVerdict v;
    v.epsilon = epsilon;
    v.in_mite = true;
    for (std::size_t k = 0; k < regions_.size(); ++k) {
        const double dist = trace_norm_distance(reduced[k], ref_[k]);
        v.per_region.push_back({regions_[k], dist});
        v.in_mite = v.in_mite && dist < epsilon;
        v.ell0 = std::max(v.ell0, diameter(regions_[k]));
    }
    return v;
}

MiteVerdict MiteReference::test(const CVector& psi, double epsilon) const {
    std::vector<CMatrix> red;
    red.reserve(regions_.size());
    for (const auto& r : regions_) red.push_back(reduced_state(psi, n_sites_, r));
    return verdict(red, epsilon);
}

MiteVerdict MiteReference::test(const DensityMatrix& rho, double epsilon) const {
    std::vector<CMatrix> red;
    red.reserve(regions_.size());
    for (const auto& r : regions_) red.push_back(partial_trace(rho.matrix(), n_sites_, r));
    return verdict(red, epsilon);
}

MiteVerdict mite_test(const PureState& psi, const Subspace& shell, const std::vector<SiteSet>& regions,
                      double epsilon) {
    if (psi.n_sites() < 0) throw std::invalid_argument("mite_test: state is not a register state");
    return MiteReference(shell, psi.n_sites(), regions).test(psi.amplitudes(), epsilon);
}

MiteVerdict mite_test(const DensityMatrix& rho, const Subspace& shell, const std::vector<SiteSet>& regions,
                      double epsilon) {
    return MiteReference(shell, sites_for_dim(rho.dim()), regions).test(rho, epsilon);
}

MiteMateReport mite_implies_mate_check(const std::vector<PureState>& samples, const MacroDecomposition& decomp,
                                       const MacroObservableFamily& family, const MiteReference& mite,
                                       double epsilon, double delta) {
    for (const auto& o : family.observables()) {
        if (!o.support()) throw std::invalid_argument("mite_implies_mate_check: observable " + o.label() + " has no support");
        const std::size_t m = site_mask(*o.support());
        const bool covered = std::any_of(mite.regions().begin(), mite.regions().end(),
                                         [&](const SiteSet& r) { return (m & ~site_mask(r)) == 0; });
        if (!covered)
            throw std::invalid_argument("mite_implies_mate_check: support of " + o.label() +
                                        " is not inside any tested region");
    }
    MiteMateReport rep;
    rep.n_samples = samples.size();
    const Subspace& eq = decomp.eq_subspace();
    for (const auto& psi : samples) {
        const MiteVerdict mv = mite.test(psi.amplitudes(), epsilon);
        const MateVerdict ma = mate_test(psi, eq, delta);
        rep.n_mite += mv.in_mite;
        rep.n_mate += ma.in_mate;
        rep.n_both += mv.in_mite && ma.in_mate;
        rep.mate_not_mite += ma.in_mate && !mv.in_mite;
        rep.violations += mv.in_mite && !ma.in_mate;
        rep.max_worst_distance = std::max(rep.max_worst_distance, mv.worst());
        rep.min_mate_weight = std::min(rep.min_mate_weight, ma.weight);
    }
    return rep;
}

// ---------------------------------------------------------------- TMATE

namespace {

template <class Prob>
TmateVerdict tmate_impl(const std::vector<TmateObservable>& obs, const DensityMatrix& rho_mc, double delta,
                        Prob&& prob) {
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("tmate_test: delta must lie in (0, 1)");
    TmateVerdict v;
    v.delta = delta;
    v.in_tmate = true;
    for (const auto& o : obs) {
        if (static_cast<std::size_t>(o.op.rows()) != rho_mc.dim())
            throw std::invalid_argument("tmate_test: observable dimension mismatch");
        const SpectralDecomposition sd = eig_hermitian(o.op);
        const double val = rho_mc.expectation(o.op);
        std::vector<Eigen::Index> win;
        for (Eigen::Index j = 0; j < sd.eigenvalues().size(); ++j)
            if (std::abs(sd.eigenvalue(j) - val) <= o.delta_m + 1e-9) win.push_back(j);
        if (win.empty())
            throw std::invalid_argument("tmate_test: spectral window of " + o.label + " around " + std::to_string(val) +
                                        " is empty");
        const Subspace p = sd.span(win);
        TmateEntry e{o.label, val, prob(p), win.size()};
        v.in_tmate = v.in_tmate && e.probability > 1.0 - delta;
        v.entries.push_back(std::move(e));
    }
    return v;
}

}  // namespace

TmateVerdict tmate_test(const DensityMatrix& rho, const std::vector<TmateObservable>& obs,
                        const DensityMatrix& rho_mc, double delta) {
    if (rho.dim() != rho_mc.dim()) throw std::invalid_argument("tmate_test: dimension mismatch");
    return tmate_impl(obs, rho_mc, delta, [&](const Subspace& p) { return p.weight(rho); });
}

TmateVerdict tmate_test(const PureState& psi, const std::vector<TmateObservable>& obs, const DensityMatrix& rho_mc,
                        double delta) {
    if (psi.dim() != rho_mc.dim()) throw std::invalid_argument("tmate_test: dimension mismatch");
    return tmate_impl(obs, rho_mc, delta, [&](const Subspace& p) { return p.weight(psi); });
}

// ---------------------------------------------------------------- normality

NormalityVerdict normality_test(const PureState& psi, const MacroDecomposition& decomp,
                                std::pair<double, double> band) {
    if (psi.dim() != decomp.ambient()) throw std::invalid_argument("normality_test: dimension mismatch");
    if (!(band.first < band.second)) throw std::invalid_argument("normality_test: empty band");
    NormalityVerdict v;
    v.band_lo = band.first;
    v.band_hi = band.second;
    v.normal = true;
    const auto dmc = static_cast<double>(decomp.total_rank());
    for (const auto& s : decomp.sectors()) {
        if (s.subspace.rank() == 0) throw std::invalid_argument("normality_test: zero-dimensional sector");
        const double r = s.subspace.weight(psi) * dmc / static_cast<double>(s.subspace.rank());
        v.ratios.push_back(r);
        v.normal = v.normal && r > band.first && r < band.second;
    }
    return v;
}

// ---------------------------------------------------------------- relative equilibrium

double induced_total_variation(const CMatrix& rho, const CMatrix& sigma, const CMatrix& a) {
    if (rho.rows() != a.rows() || sigma.rows() != a.rows())
        throw std::invalid_argument("induced_total_variation: dimension mismatch");
    const SpectralDecomposition sd = eig_hermitian(a);
    const CMatrix v = sd.eigenvectors();
    const RVector pr = (v.adjoint() * rho * v).diagonal().real();
    const RVector ps = (v.adjoint() * sigma * v).diagonal().real();
    const auto bounds = cluster_sorted(sd.eigenvalues(), tol::cluster);
    double tv = 0.0;
    for (std::size_t g = 0; g + 1 < bounds.size(); ++g) {
        const Eigen::Index lo = bounds[g], n = bounds[g + 1] - bounds[g];
        tv += std::abs(pr.segment(lo, n).sum() - ps.segment(lo, n).sum());
    }
    return 0.5 * tv;
}

RelativeEquilibriumVerdict relative_equilibrium_test(const DensityMatrix& rho, const std::vector<CMatrix>& observables,
                                                     const DensityMatrix& rho_mc, double tv_tolerance) {
    RelativeEquilibriumVerdict v;
    v.tolerance = tv_tolerance;
    v.in_equilibrium = true;
    for (const auto& a : observables) {
        const double tv = induced_total_variation(rho.matrix(), rho_mc.matrix(), a);
        v.tv.push_back(tv);
        v.in_equilibrium = v.in_equilibrium && tv <= tv_tolerance;
    }
    return v;
}

double region_max_total_variation(const CMatrix& rho_s, const CMatrix& sigma_s) {
    return 0.5 * trace_norm_distance(rho_s, sigma_s);
}

// ---------------------------------------------------------------- ETH

std::string to_string(Alignment a) {
    switch (a) {
        case Alignment::in_eq: return "in-eq";
        case Alignment::orthogonal: return "orthogonal";
        default: return "mixed";
    }
}

Alignment classify_alignment(double weight, double delta) {
    if (weight >= 1.0 - delta) return Alignment::in_eq;
    if (weight <= delta) return Alignment::orthogonal;
    return Alignment::mixed;
}

std::string EthScanReport::to_csv() const {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "index,E,mate_weight,worst_mite_distance,alignment,in_mate,in_mite\n";
    for (const auto& r : rows)
        os << r.index << ',' << r.energy << ',' << r.mate_weight << ',' << r.worst_mite_distance << ','
           << to_string(r.alignment) << ',' << (r.in_mate ? 1 : 0) << ',' << (r.in_mite ? 1 : 0) << '\n';
    return os.str();
}

EthScanReport eth_scan(const SpectralDecomposition& spec, const std::vector<Eigen::Index>& shell_idx,
                       const MacroDecomposition& decomp, const std::vector<SiteSet>& regions, double epsilon,
                       double delta, int jobs) {
    if (shell_idx.empty()) throw std::invalid_argument("eth_scan: empty shell");
    if (decomp.ambient() != spec.dim()) throw std::invalid_argument("eth_scan: decomposition dimension mismatch");
    if (decomp.total_rank() != shell_idx.size())
        throw std::invalid_argument("eth_scan: decomposition does not match the shell dimension");
    const Subspace& eq = decomp.eq_subspace();
    std::optional<MiteReference> mite;
    if (!regions.empty()) mite.emplace(spec.span(shell_idx), sites_for_dim(spec.dim()), regions);

    EthScanReport rep;
    rep.epsilon_mate = decomp.epsilon();
    rep.epsilon_mite = epsilon;
    rep.delta = delta;
    rep.rows = parallel_map(shell_idx.size(), jobs, [&](std::size_t k) {
        const Eigen::Index j = shell_idx[k];
        const CVector phi = spec.vector(j);
        EthRow row;
        row.index = j;
        row.energy = spec.eigenvalue(j);
        const MateVerdict mv = mate_verdict(eq.weight(phi), delta);
        row.mate_weight = mv.weight;
        row.in_mate = mv.in_mate;
        row.alignment = classify_alignment(mv.weight, delta);
        if (mite) {
            const MiteVerdict iv = mite->test(phi, epsilon);
            row.worst_mite_distance = iv.worst();
            row.in_mite = iv.in_mite;
        } else {
            row.in_mite = true;
        }
        return row;
    });
    std::size_t n_mate = 0, n_mite = 0, n_in = 0, n_orth = 0, n_mixed = 0;
    for (const auto& r : rep.rows) {
        n_mate += r.in_mate;
        n_mite += r.in_mite;
        n_in += r.alignment == Alignment::in_eq;
        n_orth += r.alignment == Alignment::orthogonal;
        n_mixed += r.alignment == Alignment::mixed;
    }
    const auto n = static_cast<double>(rep.rows.size());
    rep.mate_fraction = static_cast<double>(n_mate) / n;
    rep.mite_fraction = static_cast<double>(n_mite) / n;
    rep.in_eq_fraction = static_cast<double>(n_in) / n;
    rep.orthogonal_fraction = static_cast<double>(n_orth) / n;
    rep.mixed_fraction = static_cast<double>(n_mixed) / n;
    rep.mate_eth = n_mate == rep.rows.size();
    rep.mite_eth = n_mite == rep.rows.size();
    rep.basis_count_bound = 1.0 - rep.epsilon_mate / delta;
    rep.basis_count_holds = rep.mate_fraction >= rep.basis_count_bound;
    return rep;
}

OffdiagReport offdiag_eth_scan(const SpectralDecomposition& spec, const CMatrix& a,
                               const std::vector<Eigen::Index>& shell_idx, std::size_t n_bins) {
    if (static_cast<std::size_t>(a.rows()) != spec.dim()) throw std::invalid_argument("offdiag_eth_scan: dimension mismatch");
    if (n_bins == 0) throw std::invalid_argument("offdiag_eth_scan: need at least one bin");
    const auto k = static_cast<Eigen::Index>(shell_idx.size());
    CMatrix v(a.rows(), k);
    for (Eigen::Index j = 0; j < k; ++j) v.col(j) = spec.vector(shell_idx[static_cast<std::size_t>(j)]);
    const CMatrix m = v.adjoint() * a * v;
    OffdiagReport rep;
    std::vector<double> mags;
    for (Eigen::Index j = 0; j < k; ++j)
        for (Eigen::Index i = 0; i < k; ++i)
            if (i != j) mags.push_back(std::abs(m(i, j)));
    rep.n_pairs = mags.size();
    for (double x : mags) rep.max_offdiag = std::max(rep.max_offdiag, x);
    const double top = rep.max_offdiag > 0.0 ? rep.max_offdiag : 1.0;
    rep.counts.assign(n_bins, 0);
    for (std::size_t b = 0; b <= n_bins; ++b) rep.bin_edges.push_back(top * static_cast<double>(b) / static_cast<double>(n_bins));
    for (double x : mags) {
        auto b = static_cast<std::size_t>(x / top * static_cast<double>(n_bins));
        rep.counts[std::min(b, n_bins - 1)]++;
    }
    return rep;
}

}  // namespace thermeq
