#include "thermeq/states.hpp"

#include "thermeq/spectral.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace thermeq {

PureState::PureState(CVector amplitudes) : amps_(std::move(amplitudes)) {
    if (amps_.size() == 0) throw std::invalid_argument("PureState: empty amplitude vector");
    const double n = amps_.norm();
    if (std::abs(n - 1.0) > tol::norm)
        throw std::invalid_argument("PureState: norm " + std::to_string(n) + " differs from 1");
}

PureState PureState::from_unnormalized(const CVector& v) {
    const double n = v.norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw std::invalid_argument("PureState: zero or non-finite vector");
    return PureState(v / n);
}

PureState PureState::basis(std::size_t dim, std::size_t index) {
    if (index >= dim) throw std::out_of_range("PureState::basis: index out of range");
    CVector v = CVector::Zero(static_cast<Eigen::Index>(dim));
    v(static_cast<Eigen::Index>(index)) = 1.0;
    return PureState(std::move(v));
}

int PureState::n_sites() const {
    const std::size_t d = dim();
    return (d & (d - 1)) == 0 ? sites_for_dim(d) : -1;
}

double PureState::expectation(const CMatrix& a) const {
    if (a.rows() != amps_.size() || a.cols() != amps_.size())
        throw std::invalid_argument("expectation: dimension mismatch");
    return amps_.dot(a * amps_).real();
}

HermitianOperator::HermitianOperator(CMatrix entries) : m_(std::move(entries)) {
    if (m_.rows() != m_.cols() || m_.rows() == 0)
        throw std::invalid_argument("HermitianOperator: matrix must be square and nonempty");
    const double err = hermiticity_error(m_);
    if (err > tol::hermitian)
        throw std::invalid_argument("HermitianOperator: not Hermitian (max deviation " + std::to_string(err) + ")");
    diagonal_ = true;
    for (Eigen::Index j = 0; j < m_.cols() && diagonal_; ++j)
        for (Eigen::Index i = 0; i < m_.rows(); ++i)
            if (i != j && m_(i, j) != Complex(0.0)) {
                diagonal_ = false;
                break;
            }
}

DensityMatrix::DensityMatrix(CMatrix entries) : m_(std::move(entries)) {
    if (m_.rows() != m_.cols() || m_.rows() == 0)
        throw std::invalid_argument("DensityMatrix: matrix must be square and nonempty");
    if (hermiticity_error(m_) > tol::hermitian) throw std::invalid_argument("DensityMatrix: not Hermitian");
    const Complex tr = m_.trace();
    if (std::abs(tr - Complex(1.0)) > tol::trace)
        throw std::invalid_argument("DensityMatrix: trace " + std::to_string(tr.real()) + " differs from 1");
    const double lo = hermitian_eigenvalues(m_)(0);
    if (lo < tol::positivity)
        throw std::invalid_argument("DensityMatrix: negative eigenvalue " + std::to_string(lo));
}

DensityMatrix DensityMatrix::from_spectrum(const CMatrix& v, const RVector& p) {
    if (v.cols() != p.size() || v.rows() == 0) throw std::invalid_argument("from_spectrum: shape mismatch");
    if (p.size() > 0 && p.minCoeff() < 0.0) throw std::invalid_argument("from_spectrum: negative weight");
    if (std::abs(p.sum() - 1.0) > tol::trace) throw std::invalid_argument("from_spectrum: weights do not sum to 1");
    CMatrix m = v * p.cast<Complex>().asDiagonal() * v.adjoint();
    m = 0.5 * (m + m.adjoint()).eval();
    return DensityMatrix(std::move(m), Trusted{});
}

DensityMatrix DensityMatrix::from_pure(const CVector& psi) {
    const double n = psi.norm();
    if (std::abs(n - 1.0) > tol::norm) throw std::invalid_argument("from_pure: vector not normalized");
    return DensityMatrix(psi * psi.adjoint(), Trusted{});
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t dim) {
    if (dim == 0) throw std::invalid_argument("maximally_mixed: zero dimension");
    const auto d = static_cast<Eigen::Index>(dim);
    return DensityMatrix(CMatrix::Identity(d, d) / static_cast<double>(dim), Trusted{});
}

double DensityMatrix::purity() const { return (m_ * m_).trace().real(); }

double DensityMatrix::expectation(const CMatrix& a) const {
    if (a.rows() != m_.rows()) throw std::invalid_argument("expectation: dimension mismatch");
    return (m_ * a).trace().real();
}

}  // namespace thermeq
