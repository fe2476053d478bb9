#include "thermeq/partial_trace.hpp"

#include <algorithm>
#include <stdexcept>

namespace thermeq {

namespace {

struct Split {
    std::vector<std::size_t> keep_off;
    std::vector<std::size_t> rest_off;
};

Split make_split(int n_sites, const SiteSet& keep) {
    SpinRegister(n_sites, {}, 62).check_sites(keep);
    SiteSet sorted = keep;
    std::sort(sorted.begin(), sorted.end());
    return {scatter_table(sorted), scatter_table(complement(sorted, n_sites))};
}

}  // namespace

CMatrix pauli_x() {
    CMatrix m(2, 2);
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}

CMatrix pauli_y() {
    CMatrix m(2, 2);
    m << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
    return m;
}

CMatrix pauli_z() {
    CMatrix m(2, 2);
    m << 1.0, 0.0, 0.0, -1.0;
    return m;
}

CMatrix embed_operator(const SpinRegister& reg, const SiteSet& sites, const CMatrix& local) {
    reg.check_sites(sites);
    const auto k = pow2(static_cast<int>(sites.size()));
    if (static_cast<std::size_t>(local.rows()) != k || local.rows() != local.cols())
        throw std::invalid_argument("embed_operator: local operator has wrong dimension");
    const auto loc = scatter_table(sites);
    const auto rest = scatter_table(complement(sites, reg.n_sites()));
    const auto d = static_cast<Eigen::Index>(reg.dim());
    CMatrix out = CMatrix::Zero(d, d);
    for (std::size_t r : rest)
        for (std::size_t b = 0; b < k; ++b)
            for (std::size_t a = 0; a < k; ++a) {
                const Complex v = local(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
                if (v != Complex(0.0))
                    out(static_cast<Eigen::Index>(r | loc[a]), static_cast<Eigen::Index>(r | loc[b])) = v;
            }
    return out;
}

HermitianOperator embed_site_operator(const SpinRegister& reg, int site, const CMatrix& local) {
    if (site < 0 || site >= reg.n_sites()) throw std::out_of_range("embed_site_operator: site out of range");
    if (local.rows() != 2 || local.cols() != 2) throw std::invalid_argument("embed_site_operator: local must be 2x2");
    if (hermiticity_error(local) > tol::hermitian) throw std::invalid_argument("embed_site_operator: local not Hermitian");
    return HermitianOperator(embed_operator(reg, {site}, local));
}

CMatrix partial_trace(const CMatrix& rho, int n_sites, const SiteSet& keep) {
    if (static_cast<std::size_t>(rho.rows()) != pow2(n_sites) || rho.rows() != rho.cols())
        throw std::invalid_argument("partial_trace: matrix dimension does not match site count");
    const Split s = make_split(n_sites, keep);
    const auto k = static_cast<Eigen::Index>(s.keep_off.size());
    CMatrix out = CMatrix::Zero(k, k);
    for (Eigen::Index b = 0; b < k; ++b)
        for (Eigen::Index a = 0; a < k; ++a) {
            Complex acc = 0.0;
            const std::size_t oa = s.keep_off[static_cast<std::size_t>(a)];
            const std::size_t ob = s.keep_off[static_cast<std::size_t>(b)];
            for (std::size_t r : s.rest_off)
                acc += rho(static_cast<Eigen::Index>(oa | r), static_cast<Eigen::Index>(ob | r));
            out(a, b) = acc;
        }
    return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, const SiteSet& keep) {
    const int n = sites_for_dim(rho.dim());
    CMatrix r = partial_trace(rho.matrix(), n, keep);
    r = 0.5 * (r + r.adjoint()).eval();
    return DensityMatrix(std::move(r));
}

namespace {

// Columns of the returned matrix are the kept-index slices of psi, one per
// traced pattern, so that rho = M M^dagger.
CMatrix reshape_for(const CVector& psi, const Split& s) {
    const auto k = static_cast<Eigen::Index>(s.keep_off.size());
    const auto r = static_cast<Eigen::Index>(s.rest_off.size());
    CMatrix m(k, r);
    for (Eigen::Index j = 0; j < r; ++j)
        for (Eigen::Index a = 0; a < k; ++a)
            m(a, j) = psi(static_cast<Eigen::Index>(s.keep_off[static_cast<std::size_t>(a)] |
                                                    s.rest_off[static_cast<std::size_t>(j)]));
    return m;
}

}  // namespace

CMatrix reduced_state(const CVector& psi, int n_sites, const SiteSet& keep) {
    if (n_sites < 0 || static_cast<std::size_t>(psi.size()) != pow2(n_sites))
        throw std::invalid_argument("reduced_state: state dimension does not match site count");
    const Split s = make_split(n_sites, keep);
    const CMatrix m = reshape_for(psi, s);
    return m * m.adjoint();
}

CMatrix reduced_state_split(const CVector& psi, std::size_t d1) {
    const auto d = static_cast<std::size_t>(psi.size());
    if (d1 == 0 || d % d1 != 0) throw std::invalid_argument("reduced_state_split: d1 must divide dim");
    const auto a = static_cast<Eigen::Index>(d1);
    const auto b = static_cast<Eigen::Index>(d / d1);
    Eigen::Map<const CMatrix> m(psi.data(), a, b);
    return m * m.adjoint();
}

CMatrix reduced_mixture(const CMatrix& v, const RVector& weights, int n_sites, const SiteSet& keep) {
    if (v.cols() != weights.size()) throw std::invalid_argument("reduced_mixture: weight count mismatch");
    if (static_cast<std::size_t>(v.rows()) != pow2(n_sites))
        throw std::invalid_argument("reduced_mixture: dimension does not match site count");
    const Split s = make_split(n_sites, keep);
    const auto k = static_cast<Eigen::Index>(s.keep_off.size());
    CMatrix out = CMatrix::Zero(k, k);
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
        if (weights(j) == 0.0) continue;
        const CMatrix m = reshape_for(v.col(j), s);
        out.noalias() += weights(j) * (m * m.adjoint());
    }
    return out;
}

CMatrix reduced_mc_state(const Subspace& sub, int n_sites, const SiteSet& keep) {
    if (sub.ambient() != pow2(n_sites)) throw std::invalid_argument("reduced_mc_state: dimension mismatch");
    const double w = 1.0 / static_cast<double>(sub.rank());
    if (sub.is_coordinate()) {
        const Split s = make_split(n_sites, keep);
        SiteSet sorted = keep;
        std::sort(sorted.begin(), sorted.end());
        const auto k = static_cast<Eigen::Index>(s.keep_off.size());
        CMatrix out = CMatrix::Zero(k, k);
        for (auto idx : sub.indices()) {
            std::size_t a = 0;
            for (std::size_t t = 0; t < sorted.size(); ++t)
                if ((static_cast<std::size_t>(idx) >> sorted[t]) & 1U) a |= std::size_t{1} << t;
            out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)) += w;
        }
        return out;
    }
    return reduced_mixture(sub.frame(), RVector::Constant(static_cast<Eigen::Index>(sub.rank()), w), n_sites, keep);
}

}  // namespace thermeq
