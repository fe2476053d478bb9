#include "thermeq/dynamics.hpp"

#include "thermeq/parallel.hpp"
#include "thermeq/partial_trace.hpp"
#include "thermeq/register.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace thermeq {

// ---------------------------------------------------------------- observables

Observable Observable::dense(CMatrix a) {
    if (a.rows() != a.cols() || a.rows() == 0) throw std::invalid_argument("Observable: matrix must be square");
    if (hermiticity_error(a) > tol::hermitian) throw std::invalid_argument("Observable: matrix is not Hermitian");
    Observable o;
    o.dim_ = static_cast<std::size_t>(a.rows());
    o.dense_ = std::move(a);
    return o;
}

Observable Observable::local_sum(int n_sites, std::vector<LocalTerm> terms) {
    SpinRegister reg(n_sites);
    for (const auto& t : terms) {
        reg.check_sites(t.sites);
        if (!std::is_sorted(t.sites.begin(), t.sites.end()))
            throw std::invalid_argument("Observable: term sites must be ascending");
        const auto k = static_cast<Eigen::Index>(pow2(static_cast<int>(t.sites.size())));
        if (t.local.rows() != k || t.local.cols() != k)
            throw std::invalid_argument("Observable: local term has the wrong dimension");
        if (hermiticity_error(t.local) > tol::hermitian)
            throw std::invalid_argument("Observable: local term is not Hermitian");
    }
    Observable o;
    o.dim_ = reg.dim();
    o.n_sites_ = n_sites;
    o.terms_ = std::move(terms);
    return o;
}

double Observable::expectation(const CVector& v) const {
    if (static_cast<std::size_t>(v.size()) != dim_) throw std::invalid_argument("Observable: dimension mismatch");
    if (is_dense()) return v.dot(dense_ * v).real();
    double acc = 0.0;
    for (const auto& t : terms_) {
        const CMatrix rho = reduced_state(v, n_sites_, t.sites);
        acc += rho.cwiseProduct(t.local.transpose()).sum().real();
    }
    return acc;
}

CMatrix Observable::to_dense() const {
    if (is_dense()) return dense_;
    SpinRegister reg(n_sites_);
    CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(dim_));
    for (const auto& t : terms_) out += embed_operator(reg, t.sites, t.local);
    return out;
}

Observable magnetization(int n_sites, const SiteSet& sites, char axis) {
    CMatrix p;
    switch (axis) {
        case 'x': p = pauli_x(); break;
        case 'y': p = pauli_y(); break;
        case 'z': p = pauli_z(); break;
        default: throw std::invalid_argument("magnetization: axis must be x, y or z");
    }
    std::vector<LocalTerm> terms;
    terms.reserve(sites.size());
    for (int s : sites) terms.push_back({{s}, p});
    return Observable::local_sum(n_sites, std::move(terms));
}

// ---------------------------------------------------------------- evolution

EvolutionContext::EvolutionContext(SpectralDecomposition spec, const PureState& psi, double rel_tol)
    : spec_(std::move(spec)) {
    if (psi.dim() != spec_.dim()) throw std::invalid_argument("EvolutionContext: state dimension mismatch");
    if (!(rel_tol >= 0.0)) throw std::invalid_argument("EvolutionContext: tolerance must be non-negative");
    c_ = spec_.to_eigenbasis(psi.amplitudes());
    const RVector& e = spec_.eigenvalues();
    const double range = e.size() > 1 ? e(e.size() - 1) - e(0) : 0.0;
    tol_ = rel_tol * std::max(range, 1.0);
    bounds_ = cluster_sorted(e, tol_);
}

CVector evolve_coefficients(const EvolutionContext& ctx, double t) {
    const RVector& e = ctx.spec().eigenvalues();
    CVector c = ctx.coefficients();
    for (Eigen::Index j = 0; j < c.size(); ++j) c(j) *= std::polar(1.0, -e(j) * t);
    return c;
}

PureState evolve(const EvolutionContext& ctx, double t) {
    return PureState::from_unnormalized(ctx.spec().from_eigenbasis(evolve_coefficients(ctx, t)));
}

namespace {

// V_g c_g: the component of psi in degenerate group g.
CVector group_component(const EvolutionContext& ctx, std::size_t g) {
    const auto& b = ctx.groups();
    const auto& spec = ctx.spec();
    CVector v = CVector::Zero(static_cast<Eigen::Index>(spec.dim()));
    for (Eigen::Index j = b[g]; j < b[g + 1]; ++j) {
        const Complex cj = ctx.coefficients()(j);
        if (cj == Complex(0.0)) continue;
        if (spec.is_permutation())
            v(spec.basis_index(j)) += cj;
        else
            v += cj * spec.dense().col(j);
    }
    return v;
}

}  // namespace

double infinite_time_average(const EvolutionContext& ctx, const CMatrix& a) {
    if (static_cast<std::size_t>(a.rows()) != ctx.spec().dim() || a.rows() != a.cols())
        throw std::invalid_argument("infinite_time_average: dimension mismatch");
    const CMatrix ae = ctx.spec().in_eigenbasis(a);
    const CVector& c = ctx.coefficients();
    const auto& b = ctx.groups();
    double acc = 0.0;
    for (std::size_t g = 0; g + 1 < b.size(); ++g) {
        const Eigen::Index lo = b[g], len = b[g + 1] - b[g];
        const CVector cg = c.segment(lo, len);
        acc += cg.dot(ae.block(lo, lo, len, len) * cg).real();
    }
    return acc;
}

double infinite_time_average(const EvolutionContext& ctx, const Observable& a) {
    if (a.dim() != ctx.spec().dim()) throw std::invalid_argument("infinite_time_average: dimension mismatch");
    if (a.is_dense()) return infinite_time_average(ctx, a.matrix());
    double acc = 0.0;
    for (std::size_t g = 0; g < ctx.n_groups(); ++g) {
        const CVector v = group_component(ctx, g);
        if (v.squaredNorm() == 0.0) continue;
        acc += a.expectation(v);
    }
    return acc;
}

double diagonal_ensemble_average(const EvolutionContext& ctx, const CMatrix& a) {
    const CMatrix ae = ctx.spec().in_eigenbasis(a);
    const CVector& c = ctx.coefficients();
    double acc = 0.0;
    for (Eigen::Index j = 0; j < c.size(); ++j) acc += std::norm(c(j)) * ae(j, j).real();
    return acc;
}

CMatrix pinch(const EvolutionContext& ctx, const CMatrix& a) {
    const auto& spec = ctx.spec();
    if (static_cast<std::size_t>(a.rows()) != spec.dim() || a.rows() != a.cols())
        throw std::invalid_argument("pinch: dimension mismatch");
    const CMatrix ae = spec.in_eigenbasis(a);
    CMatrix blocks = CMatrix::Zero(ae.rows(), ae.cols());
    const auto& b = ctx.groups();
    for (std::size_t g = 0; g + 1 < b.size(); ++g) {
        const Eigen::Index lo = b[g], len = b[g + 1] - b[g];
        blocks.block(lo, lo, len, len) = ae.block(lo, lo, len, len);
    }
    const CMatrix v = spec.eigenvectors();
    return v * blocks * v.adjoint();
}

MateEthAverage mate_eth_average_bound(const EvolutionContext& ctx, const Subspace& p_eq, double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("mate_eth_average_bound: delta must lie in (0, 1)");
    const auto& spec = ctx.spec();
    if (p_eq.ambient() != spec.dim()) throw std::invalid_argument("mate_eth_average_bound: dimension mismatch");
    MateEthAverage r;
    r.bound = 1.0 - delta;
    const CVector& c = ctx.coefficients();
    const double cmax = c.cwiseAbs2().maxCoeff();
    for (Eigen::Index j = 0; j < c.size(); ++j) {
        if (std::norm(c(j)) <= 1e-14 * cmax) continue;
        ++r.n_support;
        if (!(p_eq.weight(spec.vector(j)) > 1.0 - delta)) ++r.n_out_of_mate;
    }
    // sum_g ||F^dagger V_g c_g||^2
    for (std::size_t g = 0; g < ctx.n_groups(); ++g) r.average += p_eq.weight(group_component(ctx, g));
    r.applicable = r.n_out_of_mate == 0;
    r.bound_holds = r.average >= r.bound - tol::norm;
    return r;
}

// ---------------------------------------------------------------- gaps

GapScan gap_degeneracy_scan(const RVector& energies, double tol, std::size_t cap) {
    const auto d = static_cast<std::size_t>(energies.size());
    if (d > kMaxGapScanLevels) throw std::invalid_argument("gap_degeneracy_scan: too many levels for the pair scan");
    if (!(tol >= 0.0)) throw std::invalid_argument("gap_degeneracy_scan: tolerance must be non-negative");
    GapScan r;
    r.tolerance = tol;
    if (d == 0) return r;
    const auto gap = [&](std::uint32_t k) { return energies(k / d) - energies(k % d); };
    std::vector<std::uint32_t> idx(d * d);
    std::iota(idx.begin(), idx.end(), 0u);
    std::sort(idx.begin(), idx.end(), [&](std::uint32_t x, std::uint32_t y) { return gap(x) < gap(y); });

    std::size_t unordered = 0;
    std::size_t hi = 0;
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (hi < i + 1) hi = i + 1;
        const double gi = gap(idx[i]);
        while (hi < idx.size() && gap(idx[hi]) - gi <= tol) ++hi;
        unordered += hi - i - 1;
        for (std::size_t j = i + 1; j < hi && r.quadruples.size() < cap; ++j) {
            const std::uint32_t p = idx[i], q = idx[j];
            const Eigen::Index a = p / d, b = p % d, a2 = q / d, b2 = q % d;
            if (a == b && a2 == b2) continue;
            r.quadruples.push_back({a, b, a2, b2});
        }
    }
    // every ordered pair of distinct diagonal entries (a = b, a' = b') is allowed
    r.count = 2 * unordered - d * (d - 1);
    return r;
}

double inverse_mean_spacing(const RVector& e) {
    if (e.size() < 2) throw std::invalid_argument("inverse_mean_spacing: need at least two levels");
    const double range = e.maxCoeff() - e.minCoeff();
    if (!(range > 0.0)) throw std::invalid_argument("inverse_mean_spacing: spectrum is degenerate");
    return static_cast<double>(e.size() - 1) / range;
}

QuadratureResult quadrature_time_average(const EvolutionContext& ctx, const CMatrix& a, double t_spacings) {
    if (!(t_spacings > 0.0)) throw std::invalid_argument("quadrature_time_average: T must be positive");
    const auto& spec = ctx.spec();
    if (static_cast<std::size_t>(a.rows()) != spec.dim()) throw std::invalid_argument("quadrature_time_average: dimension mismatch");
    const CMatrix ae = spec.in_eigenbasis(a);
    const RVector e = spec.eigenvalues().array() - spec.eigenvalues().mean();
    QuadratureResult r;
    r.t_max = t_spacings * inverse_mean_spacing(spec.eigenvalues());
    const double emax = e.cwiseAbs().maxCoeff();
    const double dt_cap = 0.1 / emax;
    r.steps = static_cast<std::size_t>(std::ceil(r.t_max / dt_cap));
    r.dt = r.t_max / static_cast<double>(r.steps);

    CVector step(e.size());
    for (Eigen::Index j = 0; j < e.size(); ++j) step(j) = std::polar(1.0, -e(j) * r.dt);
    CVector c = ctx.coefficients();
    // block partial sums keep rounding growth small over ~1e7 steps
    double s1 = 0.0, s2 = 0.0, b1 = 0.0, b2 = 0.0;
    for (std::size_t k = 0; k <= r.steps; ++k) {
        if (k > 0) {
            c = c.cwiseProduct(step);
            // re-anchor the phases periodically against accumulated rounding
            if (k % 65536 == 0) {
                const double t = r.dt * static_cast<double>(k);
                c = ctx.coefficients();
                for (Eigen::Index j = 0; j < e.size(); ++j) c(j) *= std::polar(1.0, -e(j) * t);
            }
        }
        const double f = c.dot(ae * c).real();
        const double w = (k == 0 || k == r.steps) ? 0.5 : 1.0;
        b1 += w * f;
        b2 += w * f * f;
        if (k % 4096 == 4095) {
            s1 += b1;
            s2 += b2;
            b1 = b2 = 0.0;
        }
    }
    s1 += b1;
    s2 += b2;
    const double n = static_cast<double>(r.steps);
    r.mean = s1 / n;
    r.variance = std::max(0.0, s2 / n - r.mean * r.mean);
    return r;
}

TimeVarianceResult time_variance(const EvolutionContext& ctx, const CMatrix& a, double gap_rel_tol,
                                 double fallback_spacings) {
    const auto& spec = ctx.spec();
    if (static_cast<std::size_t>(a.rows()) != spec.dim() || a.rows() != a.cols())
        throw std::invalid_argument("time_variance: dimension mismatch");
    const CMatrix ae = spec.in_eigenbasis(a);
    const CVector& c = ctx.coefficients();
    const RVector& e = spec.eigenvalues();
    TimeVarianceResult r;
    const Eigen::Index d = ae.rows();
    for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index i = 0; i < d; ++i)
            if (i != j) r.max_offdiag = std::max(r.max_offdiag, std::abs(ae(i, j)));
    r.bound = r.max_offdiag * r.max_offdiag;

    const double range = d > 1 ? e(d - 1) - e(0) : 0.0;
    const GapScan scan = gap_degeneracy_scan(e, gap_rel_tol * std::max(range, 1.0), 0);
    r.resonances = scan.count;
    if (scan.count == 0) {
        double acc = 0.0;
        for (Eigen::Index j = 0; j < d; ++j)
            for (Eigen::Index i = 0; i < d; ++i)
                if (i != j) acc += std::norm(c(i)) * std::norm(ae(i, j)) * std::norm(c(j));
        r.value = acc;
        r.exact = true;
    } else {
        r.value = quadrature_time_average(ctx, a, fallback_spacings).variance;
        r.exact = false;
    }
    r.bound_holds = r.value <= r.bound + 1e-12;
    return r;
}

// ---------------------------------------------------------------- relaxation

RelaxationResult relaxation_experiment(const EvolutionContext& ctx, const Observable& a, const std::vector<double>& t_grid,
                                       int jobs) {
    if (a.dim() != ctx.spec().dim()) throw std::invalid_argument("relaxation_experiment: dimension mismatch");
    RelaxationResult r;
    r.t = t_grid;
    r.value = parallel_map(t_grid.size(), jobs, [&](std::size_t i) {
        return a.expectation(ctx.spec().from_eigenbasis(evolve_coefficients(ctx, t_grid[i])));
    });
    r.infinite_average = infinite_time_average(ctx, a);
    return r;
}

std::string RelaxationResult::to_csv(const std::vector<std::pair<std::string, std::string>>& meta) const {
    std::ostringstream os;
    for (const auto& [k, v] : meta) os << "# " << k << ": " << v << '\n';
    os << "# infinite_time_average: " << std::setprecision(17) << infinite_average << '\n';
    os << "t,value\n";
    for (std::size_t i = 0; i < t.size(); ++i) os << t[i] << ',' << value[i] << '\n';
    return os.str();
}

}  // namespace thermeq
