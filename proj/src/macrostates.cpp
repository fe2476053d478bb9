#include "thermeq/macrostates.hpp"

#include "thermeq/partial_trace.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

namespace thermeq {

double coarse_grain(double value, const CoarseGrainSpec& spec) {
    if (!(spec.resolution > 0.0) || !std::isfinite(spec.resolution))
        throw std::invalid_argument("coarse_grain: resolution must be positive");
    if (!std::isfinite(value)) throw std::invalid_argument("coarse_grain: non-finite value");
    const double q = value / spec.resolution;
    const double fl = std::floor(q);
    const double frac = q - fl;
    double k;
    if (std::abs(frac - 0.5) <= 1e-9)
        k = std::fmod(fl, 2.0) == 0.0 ? fl : fl + 1.0;
    else
        k = std::round(q);
    if (k == 0.0) k = 0.0;  // drop the sign of -0
    return k * spec.resolution;
}

// ---------------------------------------------------------------- observables

MacroObservable::MacroObservable(std::string label, HermitianOperator op, std::optional<SiteSet> support)
    : label_(std::move(label)), support_(std::move(support)) {
    if (op.is_diagonal())
        diag_ = op.diagonal_real();
    else
        op_ = op.matrix();
}

MacroObservable::MacroObservable(std::string label, RVector diagonal, std::optional<SiteSet> support)
    : label_(std::move(label)), diag_(std::move(diagonal)), support_(std::move(support)) {
    if (diag_->size() == 0) throw std::invalid_argument("MacroObservable: empty diagonal");
}

std::size_t MacroObservable::dim() const {
    return static_cast<std::size_t>(diag_ ? diag_->size() : op_->rows());
}

CMatrix MacroObservable::dense() const {
    if (op_) return *op_;
    return diag_->cast<Complex>().asDiagonal();
}

CMatrix MacroObservable::apply(const CMatrix& x) const {
    if (static_cast<std::size_t>(x.rows()) != dim()) throw std::invalid_argument("MacroObservable::apply: dimension mismatch");
    if (op_) return *op_ * x;
    return diag_->cast<Complex>().asDiagonal() * x;
}

MacroObservableFamily::MacroObservableFamily(std::vector<MacroObservable> observables, double commutator_tolerance)
    : obs_(std::move(observables)), tol_(commutator_tolerance) {
    if (obs_.empty()) throw std::invalid_argument("MacroObservableFamily: no observables");
    for (const auto& o : obs_)
        if (o.dim() != obs_.front().dim()) throw std::invalid_argument("MacroObservableFamily: dimension mismatch");
    if (all_diagonal()) return;
    std::vector<CMatrix> dense;
    dense.reserve(obs_.size());
    for (const auto& o : obs_) dense.push_back(o.dense());
    for (std::size_t a = 0; a < dense.size(); ++a)
        for (std::size_t b = a + 1; b < dense.size(); ++b) {
            if (obs_[a].is_diagonal() && obs_[b].is_diagonal()) continue;
            const double c = max_abs(dense[a] * dense[b] - dense[b] * dense[a]);
            if (c > tol_)
                throw std::invalid_argument("MacroObservableFamily: " + obs_[a].label() + " and " + obs_[b].label() +
                                            " do not commute (max entry " + std::to_string(c) + ")");
        }
}

bool MacroObservableFamily::all_diagonal() const {
    return std::all_of(obs_.begin(), obs_.end(), [](const MacroObservable& o) { return o.is_diagonal(); });
}

Axis parse_axis(const std::string& s) {
    if (s == "z") return Axis::z;
    if (s == "x") return Axis::x;
    throw std::invalid_argument("unknown axis '" + s + "' (expected z or x)");
}

std::string to_string(Axis a) { return a == Axis::z ? "z" : "x"; }

CMatrix cell_magnetization_operator(const SpinRegister& reg, const SiteSet& cell, Axis axis) {
    reg.check_sites(cell);
    const CMatrix s = axis == Axis::z ? pauli_z() : pauli_x();
    const auto d = static_cast<Eigen::Index>(reg.dim());
    CMatrix m = CMatrix::Zero(d, d);
    for (int i : cell) m += embed_operator(reg, {i}, s);
    return m;
}

namespace {

// f(sum_{i in cell} sigma^axis_i) as a local 2^|cell| operator.
CMatrix local_coarse_magnetization(std::size_t cell_size, Axis axis, const CoarseGrainSpec& spec) {
    const auto k = static_cast<Eigen::Index>(pow2(static_cast<int>(cell_size)));
    // in the z basis the cell magnetization of pattern a is (#zeros - #ones)
    RVector fz(k);
    for (Eigen::Index a = 0; a < k; ++a) {
        int ones = 0;
        for (std::size_t t = 0; t < cell_size; ++t) ones += static_cast<int>((a >> t) & 1);
        fz(a) = coarse_grain(static_cast<double>(static_cast<int>(cell_size) - 2 * ones), spec);
    }
    if (axis == Axis::z) return fz.cast<Complex>().asDiagonal();
    // x basis: conjugate by the Hadamard product H^{(x)cell}
    CMatrix h(k, k);
    const double norm = std::pow(2.0, -0.5 * static_cast<double>(cell_size));
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j) h(i, j) = (std::popcount(static_cast<unsigned>(i & j)) % 2 ? -norm : norm);
    return h * fz.cast<Complex>().asDiagonal() * h.adjoint();
}

std::string cell_label(Axis axis, std::size_t j) {
    std::ostringstream os;
    os << "M" << to_string(axis) << "_" << j;
    return os.str();
}

}  // namespace

MacroObservableFamily build_cell_magnetization(const SpinRegister& reg, Axis axis, const CoarseGrainSpec& spec) {
    std::vector<MacroObservable> obs;
    const auto d = static_cast<Eigen::Index>(reg.dim());
    for (std::size_t j = 0; j < reg.cells().size(); ++j) {
        const SiteSet& cell = reg.cells()[j];
        const CMatrix local = local_coarse_magnetization(cell.size(), axis, spec);
        if (axis == Axis::z) {
            RVector diag(d);
            for (Eigen::Index b = 0; b < d; ++b) {
                std::size_t a = 0;
                for (std::size_t t = 0; t < cell.size(); ++t)
                    if ((static_cast<std::size_t>(b) >> cell[t]) & 1U) a |= std::size_t{1} << t;
                diag(b) = local(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)).real();
            }
            obs.emplace_back(cell_label(axis, j), std::move(diag), cell);
        } else {
            CMatrix m = embed_operator(reg, cell, local);
            m = 0.5 * (m + m.adjoint()).eval();
            obs.emplace_back(cell_label(axis, j), HermitianOperator(std::move(m)), cell);
        }
    }
    return MacroObservableFamily(std::move(obs));
}

MacroObservableFamily build_cell_magnetization(const SpinRegister& reg, const std::vector<Axis>& axes,
                                               const CoarseGrainSpec& spec) {
    if (axes.empty()) throw std::invalid_argument("build_cell_magnetization: no axis given");
    if (axes.size() != reg.cells().size() && axes.size() != 1)
        throw std::invalid_argument("build_cell_magnetization: need one axis per cell");
    for (Axis a : axes)
        if (a != axes.front())
            throw std::invalid_argument(
                "build_cell_magnetization: mixed axes do not commute; use tmate_test for such sets");
    return build_cell_magnetization(reg, axes.front(), spec);
}

// ---------------------------------------------------------------- shells

std::vector<Eigen::Index> shell_indices(const SpectralDecomposition& spec, double e, double delta_e) {
    if (!(delta_e > 0.0)) throw std::invalid_argument("energy_shell: delta_e must be positive");
    std::vector<Eigen::Index> idx;
    const RVector& ev = spec.eigenvalues();
    for (Eigen::Index j = 0; j < ev.size(); ++j)
        if (ev(j) > e - delta_e && ev(j) <= e) idx.push_back(j);
    return idx;
}

Subspace energy_shell(const SpectralDecomposition& spec, double e, double delta_e) {
    const auto idx = shell_indices(spec, e, delta_e);
    if (idx.empty()) throw std::invalid_argument("energy_shell: no eigenvalue in (E - dE, E]");
    return spec.span(idx);
}

// ---------------------------------------------------------------- decomposition

MacroDecomposition::MacroDecomposition(std::vector<std::string> labels, std::vector<Sector> sectors,
                                       std::size_t total_rank)
    : labels_(std::move(labels)), sectors_(std::move(sectors)), total_rank_(total_rank) {
    if (sectors_.empty()) throw std::invalid_argument("MacroDecomposition: no sectors");
    std::size_t sum = 0;
    for (const auto& s : sectors_) sum += s.subspace.rank();
    if (sum != total_rank_) throw std::logic_error("MacroDecomposition: sector dimensions do not add up");
}

MacroDecomposition MacroDecomposition::with_equilibrium(const EquilibriumMacrostate& eq) const {
    if (eq.index >= sectors_.size()) throw std::out_of_range("with_equilibrium: sector index");
    MacroDecomposition out = *this;
    out.eq_ = eq;
    return out;
}

const Sector& MacroDecomposition::eq_sector() const {
    if (!eq_) throw std::logic_error("MacroDecomposition: equilibrium sector not designated");
    return sectors_[eq_->index];
}

double MacroDecomposition::epsilon() const {
    if (!eq_) throw std::logic_error("MacroDecomposition: equilibrium sector not designated");
    return eq_->epsilon;
}

namespace {

constexpr double kCluster = tol::cluster;

bool nu_less(const std::vector<double>& a, const std::vector<double>& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] < b[i] - kCluster) return true;
        if (a[i] > b[i] + kCluster) return false;
    }
    return false;
}

MacroDecomposition diagonal_decomposition(const MacroObservableFamily& family, std::size_t ambient,
                                          const std::vector<Eigen::Index>& indices) {
    const std::size_t k = family.size();
    std::vector<std::vector<double>> keys(indices.size(), std::vector<double>(k));
    for (std::size_t t = 0; t < indices.size(); ++t)
        for (std::size_t j = 0; j < k; ++j) keys[t][j] = family.observables()[j].diagonal()(indices[t]);
    std::vector<std::size_t> order(indices.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return nu_less(keys[a], keys[b]); });
    std::vector<Sector> sectors;
    std::size_t start = 0;
    while (start < order.size()) {
        std::size_t end = start + 1;
        while (end < order.size() && !nu_less(keys[order[start]], keys[order[end]])) ++end;
        std::vector<Eigen::Index> members;
        for (std::size_t t = start; t < end; ++t) members.push_back(indices[order[t]]);
        std::sort(members.begin(), members.end());
        sectors.push_back({keys[order[start]], Subspace(ambient, std::move(members))});
        start = end;
    }
    std::vector<std::string> labels;
    for (const auto& o : family.observables()) labels.push_back(o.label());
    return MacroDecomposition(std::move(labels), std::move(sectors), indices.size());
}

struct Block {
    std::vector<double> nu;
    CMatrix frame;
};

}  // namespace

MacroDecomposition joint_decomposition(const MacroObservableFamily& family, const std::optional<Subspace>& within) {
    const std::size_t d = family.dim();
    if (within && within->ambient() != d) throw std::invalid_argument("joint_decomposition: shell dimension mismatch");
    if (family.all_diagonal() && (!within || within->is_coordinate())) {
        if (within) return diagonal_decomposition(family, d, within->indices());
        return diagonal_decomposition(family, d, Subspace::full(d).indices());
    }
    const double leak_tol = std::max(family.commutator_tolerance(), 1e-8);
    std::vector<Block> blocks{{{}, within ? within->frame() : CMatrix(CMatrix::Identity(
                                                                 static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)))}};
    if (within) {
        const CMatrix& f = blocks.front().frame;
        for (const auto& o : family.observables()) {
            const CMatrix mf = o.apply(f);
            const double leak = max_abs(mf - f * (f.adjoint() * mf));
            if (leak > leak_tol)
                throw std::invalid_argument("joint_decomposition: observable " + o.label() +
                                            " leaks out of the shell (max entry " + std::to_string(leak) + ")");
        }
    }
    for (const auto& o : family.observables()) {
        std::vector<Block> next;
        for (const auto& b : blocks) {
            CMatrix r = b.frame.adjoint() * o.apply(b.frame);
            r = 0.5 * (r + r.adjoint()).eval();
            const SpectralDecomposition sd = eig_hermitian(HermitianOperator(r));
            const auto bounds = cluster_sorted(sd.eigenvalues(), kCluster);
            const CMatrix w = sd.eigenvectors();
            for (std::size_t g = 0; g + 1 < bounds.size(); ++g) {
                const Eigen::Index lo = bounds[g], hi = bounds[g + 1];
                const double val = sd.eigenvalues().segment(lo, hi - lo).mean();
                Block nb{b.nu, b.frame * w.middleCols(lo, hi - lo)};
                nb.nu.push_back(val);
                next.push_back(std::move(nb));
            }
        }
        blocks = std::move(next);
    }
    std::sort(blocks.begin(), blocks.end(), [](const Block& a, const Block& b) { return nu_less(a.nu, b.nu); });
    std::vector<Sector> sectors;
    std::size_t total = 0;
    for (auto& b : blocks) {
        // re-orthonormalize away accumulated round-off before validating
        Eigen::HouseholderQR<CMatrix> qr(b.frame);
        CMatrix q = qr.householderQ() * CMatrix::Identity(b.frame.rows(), b.frame.cols());
        CMatrix ov = q.adjoint() * b.frame;
        for (Eigen::Index j = 0; j < q.cols(); ++j)
            if (std::abs(ov(j, j)) > 0.0) q.col(j) *= ov(j, j) / std::abs(ov(j, j));
        total += static_cast<std::size_t>(q.cols());
        sectors.push_back({std::move(b.nu), Subspace(std::move(q))});
    }
    std::vector<std::string> labels;
    for (const auto& o : family.observables()) labels.push_back(o.label());
    return MacroDecomposition(std::move(labels), std::move(sectors), total);
}

EquilibriumMacrostate find_equilibrium_macrostate(const MacroDecomposition& decomp,
                                                  const std::optional<DensityMatrix>& rho_ref,
                                                  double dominance_threshold) {
    const auto& secs = decomp.sectors();
    std::vector<double> w(secs.size());
    for (std::size_t i = 0; i < secs.size(); ++i)
        w[i] = rho_ref ? secs[i].subspace.weight(*rho_ref) : static_cast<double>(secs[i].subspace.rank());
    const auto best = static_cast<std::size_t>(std::max_element(w.begin(), w.end()) - w.begin());
    const double tie_tol = rho_ref ? 1e-12 : 0.0;
    for (std::size_t i = 0; i < w.size(); ++i)
        if (i != best && std::abs(w[i] - w[best]) <= tie_tol) {
            std::ostringstream os;
            os << "find_equilibrium_macrostate: sectors " << std::min(i, best) << " and " << std::max(i, best)
               << " tie for the largest weight (" << w[best] << ")";
            throw EquilibriumTieError(os.str());
        }
    EquilibriumMacrostate eq;
    eq.index = best;
    eq.epsilon = 1.0 - static_cast<double>(secs[best].subspace.rank()) / static_cast<double>(decomp.total_rank());
    eq.dominant = eq.epsilon < dominance_threshold;
    return eq;
}

}  // namespace thermeq
