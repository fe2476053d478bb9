#include "thermeq/subspace.hpp"

#include <stdexcept>
#include <string>

namespace thermeq {

Subspace::Subspace(CMatrix frame)
    : ambient_(static_cast<std::size_t>(frame.rows())),
      rank_(static_cast<std::size_t>(frame.cols())),
      coordinate_(false),
      frame_(std::move(frame)) {
    if (rank_ == 0) throw std::invalid_argument("Subspace: frame has no columns");
    if (rank_ > ambient_) throw std::invalid_argument("Subspace: more columns than ambient dimension");
    const auto k = static_cast<Eigen::Index>(rank_);
    const double err = max_abs(frame_.adjoint() * frame_ - CMatrix::Identity(k, k));
    if (err > tol::orthonormal)
        throw std::invalid_argument("Subspace: frame not orthonormal (error " + std::to_string(err) + ")");
}

Subspace::Subspace(std::size_t ambient, std::vector<Eigen::Index> indices)
    : ambient_(ambient), rank_(indices.size()), coordinate_(true), indices_(std::move(indices)) {
    if (rank_ == 0) throw std::invalid_argument("Subspace: empty index list");
    std::vector<char> seen(ambient_, 0);
    for (auto i : indices_) {
        if (i < 0 || static_cast<std::size_t>(i) >= ambient_)
            throw std::out_of_range("Subspace: index out of range");
        if (seen[static_cast<std::size_t>(i)]++) throw std::invalid_argument("Subspace: duplicate index");
    }
}

Subspace Subspace::full(std::size_t ambient) {
    std::vector<Eigen::Index> idx(ambient);
    for (std::size_t i = 0; i < ambient; ++i) idx[i] = static_cast<Eigen::Index>(i);
    return Subspace(ambient, std::move(idx));
}

CVector Subspace::coefficients(const CVector& psi) const {
    if (static_cast<std::size_t>(psi.size()) != ambient_)
        throw std::invalid_argument("Subspace::coefficients: dimension mismatch");
    if (!coordinate_) return frame_.adjoint() * psi;
    CVector c(static_cast<Eigen::Index>(rank_));
    for (std::size_t j = 0; j < rank_; ++j) c(static_cast<Eigen::Index>(j)) = psi(indices_[j]);
    return c;
}

CVector Subspace::embed(const CVector& c) const {
    if (static_cast<std::size_t>(c.size()) != rank_) throw std::invalid_argument("Subspace::embed: size mismatch");
    if (!coordinate_) return frame_ * c;
    CVector v = CVector::Zero(static_cast<Eigen::Index>(ambient_));
    for (std::size_t j = 0; j < rank_; ++j) v(indices_[j]) = c(static_cast<Eigen::Index>(j));
    return v;
}

CVector Subspace::column(Eigen::Index j) const {
    if (j < 0 || static_cast<std::size_t>(j) >= rank_) throw std::out_of_range("Subspace::column");
    if (!coordinate_) return frame_.col(j);
    CVector v = CVector::Zero(static_cast<Eigen::Index>(ambient_));
    v(indices_[static_cast<std::size_t>(j)]) = 1.0;
    return v;
}

CMatrix Subspace::frame() const {
    if (!coordinate_) return frame_;
    CMatrix f = CMatrix::Zero(static_cast<Eigen::Index>(ambient_), static_cast<Eigen::Index>(rank_));
    for (std::size_t j = 0; j < rank_; ++j) f(indices_[j], static_cast<Eigen::Index>(j)) = 1.0;
    return f;
}

CMatrix Subspace::projector() const {
    if (!coordinate_) return frame_ * frame_.adjoint();
    const auto d = static_cast<Eigen::Index>(ambient_);
    CMatrix p = CMatrix::Zero(d, d);
    for (auto i : indices_) p(i, i) = 1.0;
    return p;
}

double Subspace::weight(const CVector& psi) const { return coefficients(psi).squaredNorm(); }

double Subspace::weight(const DensityMatrix& rho) const {
    if (rho.dim() != ambient_) throw std::invalid_argument("Subspace::weight: dimension mismatch");
    if (coordinate_) {
        double w = 0.0;
        for (auto i : indices_) w += rho.matrix()(i, i).real();
        return w;
    }
    return (frame_.adjoint() * rho.matrix() * frame_).trace().real();
}

CMatrix Subspace::restrict(const CMatrix& a) const {
    if (static_cast<std::size_t>(a.rows()) != ambient_ || a.rows() != a.cols())
        throw std::invalid_argument("Subspace::restrict: dimension mismatch");
    if (!coordinate_) return frame_.adjoint() * a * frame_;
    const auto k = static_cast<Eigen::Index>(rank_);
    CMatrix r(k, k);
    for (Eigen::Index j = 0; j < k; ++j)
        for (Eigen::Index i = 0; i < k; ++i)
            r(i, j) = a(indices_[static_cast<std::size_t>(i)], indices_[static_cast<std::size_t>(j)]);
    return r;
}

Projection project_onto(const Subspace& s, const PureState& psi) {
    if (psi.dim() != s.ambient()) throw std::invalid_argument("project_onto: dimension mismatch");
    const CVector c = s.coefficients(psi.amplitudes());
    return {s.embed(c), c.squaredNorm()};
}

}  // namespace thermeq
