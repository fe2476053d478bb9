#include "thermeq/spectral.hpp"

#include <algorithm>
#include <complex>
#include <numeric>
#include <stdexcept>
#include <string>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace thermeq {

SpectralDecomposition::SpectralDecomposition(RVector eigenvalues, CMatrix eigenvectors)
    : evals_(std::move(eigenvalues)), vecs_(std::move(eigenvectors)) {
    if (vecs_->rows() != evals_.size() || vecs_->cols() != evals_.size())
        throw std::invalid_argument("SpectralDecomposition: shape mismatch");
    for (Eigen::Index i = 1; i < evals_.size(); ++i)
        if (evals_(i) < evals_(i - 1)) throw std::invalid_argument("SpectralDecomposition: eigenvalues not ascending");
}

SpectralDecomposition::SpectralDecomposition(RVector eigenvalues, std::vector<Eigen::Index> basis_index)
    : evals_(std::move(eigenvalues)), perm_(std::move(basis_index)) {
    const auto d = static_cast<std::size_t>(evals_.size());
    if (perm_.size() != d) throw std::invalid_argument("SpectralDecomposition: permutation size mismatch");
    std::vector<char> seen(d, 0);
    for (auto i : perm_) {
        if (i < 0 || static_cast<std::size_t>(i) >= d || seen[static_cast<std::size_t>(i)]++)
            throw std::invalid_argument("SpectralDecomposition: not a permutation");
    }
    for (Eigen::Index i = 1; i < evals_.size(); ++i)
        if (evals_(i) < evals_(i - 1)) throw std::invalid_argument("SpectralDecomposition: eigenvalues not ascending");
}

CMatrix SpectralDecomposition::eigenvectors() const {
    if (vecs_) return *vecs_;
    const auto d = evals_.size();
    CMatrix v = CMatrix::Zero(d, d);
    for (Eigen::Index j = 0; j < d; ++j) v(perm_[static_cast<std::size_t>(j)], j) = 1.0;
    return v;
}

const CMatrix& SpectralDecomposition::dense() const {
    if (!vecs_) throw std::logic_error("SpectralDecomposition::dense: permutation form has no dense matrix");
    return *vecs_;
}

CVector SpectralDecomposition::vector(Eigen::Index j) const {
    if (vecs_) return vecs_->col(j);
    CVector v = CVector::Zero(evals_.size());
    v(perm_.at(static_cast<std::size_t>(j))) = 1.0;
    return v;
}

CVector SpectralDecomposition::to_eigenbasis(const CVector& psi) const {
    if (psi.size() != evals_.size()) throw std::invalid_argument("to_eigenbasis: dimension mismatch");
    if (vecs_) return vecs_->adjoint() * psi;
    CVector c(psi.size());
    for (Eigen::Index j = 0; j < psi.size(); ++j) c(j) = psi(perm_[static_cast<std::size_t>(j)]);
    return c;
}

CVector SpectralDecomposition::from_eigenbasis(const CVector& c) const {
    if (c.size() != evals_.size()) throw std::invalid_argument("from_eigenbasis: dimension mismatch");
    if (vecs_) return *vecs_ * c;
    CVector psi(c.size());
    for (Eigen::Index j = 0; j < c.size(); ++j) psi(perm_[static_cast<std::size_t>(j)]) = c(j);
    return psi;
}

CMatrix SpectralDecomposition::in_eigenbasis(const CMatrix& a) const {
    if (a.rows() != evals_.size() || a.cols() != evals_.size())
        throw std::invalid_argument("in_eigenbasis: dimension mismatch");
    if (vecs_) return vecs_->adjoint() * a * *vecs_;
    const auto d = evals_.size();
    CMatrix r(d, d);
    for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index i = 0; i < d; ++i)
            r(i, j) = a(perm_[static_cast<std::size_t>(i)], perm_[static_cast<std::size_t>(j)]);
    return r;
}

Subspace SpectralDecomposition::span(const std::vector<Eigen::Index>& which) const {
    if (which.empty()) throw std::invalid_argument("span: empty index list");
    if (!vecs_) {
        std::vector<Eigen::Index> idx;
        idx.reserve(which.size());
        for (auto j : which) idx.push_back(perm_.at(static_cast<std::size_t>(j)));
        return Subspace(dim(), std::move(idx));
    }
    CMatrix f(evals_.size(), static_cast<Eigen::Index>(which.size()));
    for (std::size_t k = 0; k < which.size(); ++k) f.col(static_cast<Eigen::Index>(k)) = vecs_->col(which[k]);
    return Subspace(std::move(f));
}

double SpectralDecomposition::reconstruction_error(const CMatrix& h) const {
    const CMatrix v = eigenvectors();
    const CMatrix r = v * evals_.cast<Complex>().asDiagonal() * v.adjoint();
    const double scale = std::max(max_abs(h), 1e-300);
    return max_abs(h - r) / scale;
}

double SpectralDecomposition::unitarity_error() const {
    if (!vecs_) return 0.0;
    const auto d = evals_.size();
    return max_abs(vecs_->adjoint() * *vecs_ - CMatrix::Identity(d, d));
}

namespace {

// zheevd on a copy of h; jobz 'V' or 'N'. Eigenvalues come back ascending.
void zheevd(CMatrix& a, RVector& w, char jobz) {
    const auto n = static_cast<lapack_int>(a.rows());
    w.resize(n);
    if (n == 0) return;
    const lapack_int info =
        LAPACKE_zheevd(LAPACK_COL_MAJOR, jobz, 'U', n, a.data(), n, w.data());
    if (info != 0)
        throw std::runtime_error("eig_hermitian: LAPACK zheevd failed with info " + std::to_string(info));
}

SpectralDecomposition diagonal_decomposition(const RVector& diag) {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(diag.size()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return diag(a) < diag(b); });
    RVector ev(diag.size());
    for (std::size_t j = 0; j < order.size(); ++j) ev(static_cast<Eigen::Index>(j)) = diag(order[j]);
    return SpectralDecomposition(std::move(ev), std::move(order));
}

}  // namespace

SpectralDecomposition eig_hermitian(const HermitianOperator& h) {
    if (h.is_diagonal()) return diagonal_decomposition(h.diagonal_real());
    CMatrix a = h.matrix();
    RVector w;
    zheevd(a, w, 'V');
    return SpectralDecomposition(std::move(w), std::move(a));
}

SpectralDecomposition eig_hermitian(const CMatrix& h) { return eig_hermitian(HermitianOperator(h)); }

RVector hermitian_eigenvalues(const CMatrix& h) {
    if (h.rows() != h.cols()) throw std::invalid_argument("hermitian_eigenvalues: matrix not square");
    CMatrix a = h;
    RVector w;
    zheevd(a, w, 'N');
    return w;
}

double trace_norm(const CMatrix& h) {
    if (h.rows() == 1) return std::abs(h(0, 0).real());
    if (h.rows() == 2) {
        // closed form for 2x2 Hermitian: eigenvalues m +- r
        const double a = h(0, 0).real(), d = h(1, 1).real();
        const double m = 0.5 * (a + d);
        const double r = std::hypot(0.5 * (a - d), std::abs(h(0, 1)));
        return std::abs(m + r) + std::abs(m - r);
    }
    return hermitian_eigenvalues(h).cwiseAbs().sum();
}

double trace_norm_distance(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("trace_norm_distance: dimension mismatch");
    CMatrix diff = a - b;
    diff = 0.5 * (diff + diff.adjoint()).eval();
    return trace_norm(diff);
}

double trace_norm_distance(const DensityMatrix& a, const DensityMatrix& b) {
    return trace_norm_distance(a.matrix(), b.matrix());
}

std::vector<Eigen::Index> cluster_sorted(const RVector& sorted, double tol) {
    std::vector<Eigen::Index> b{0};
    for (Eigen::Index i = 1; i < sorted.size(); ++i)
        if (sorted(i) - sorted(i - 1) > tol) b.push_back(i);
    b.push_back(sorted.size());
    if (sorted.size() == 0) b = {0};
    return b;
}

}  // namespace thermeq
