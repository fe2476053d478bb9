#include "thermeq/unitary.hpp"

#include <cmath>
#include <stdexcept>

namespace thermeq {

namespace {

Complex unit_phase(Complex z) {
    const double a = std::abs(z);
    return a > 0.0 ? z / a : Complex(1.0);
}

}  // namespace

CMatrix haar_isometry(Eigen::Index d, Eigen::Index r, Rng& rng) {
    if (d < 1 || r < 1 || r > d) throw std::invalid_argument("haar_isometry: need 1 <= r <= d");
    CMatrix g(d, r);
    for (Eigen::Index j = 0; j < r; ++j)
        for (Eigen::Index i = 0; i < d; ++i) g(i, j) = rng.complex_normal();
    Eigen::HouseholderQR<CMatrix> qr(g);
    CMatrix q = qr.householderQ() * CMatrix::Identity(d, r);
    const CMatrix& rr = qr.matrixQR();
    for (Eigen::Index j = 0; j < r; ++j) q.col(j) *= unit_phase(rr(j, j));
    return q;
}

CMatrix haar_unitary(Eigen::Index d, Rng& rng) { return haar_isometry(d, d, rng); }

HouseholderRotation::HouseholderRotation(std::size_t dim)
    : dim_(dim), phases_(CVector::Ones(static_cast<Eigen::Index>(dim))) {
    if (dim == 0) throw std::invalid_argument("HouseholderRotation: zero dimension");
}

HouseholderRotation HouseholderRotation::haar(std::size_t dim, Rng& rng) {
    HouseholderRotation u(dim);
    const auto d = static_cast<Eigen::Index>(dim);
    u.refl_.reserve(dim > 0 ? dim - 1 : 0);
    for (Eigen::Index k = 0; k + 1 < d; ++k) {
        CVector x = rng.complex_normal_vector(d - k);
        const double nx = x.norm();
        // alpha = -e^{i arg x_0}|x| is the R diagonal entry of this QR step
        const Complex ph = unit_phase(x(0));
        const Complex alpha = -ph * nx;
        CVector w = x;
        w(0) -= alpha;
        const double nw = w.norm();
        if (nw > 0.0) u.refl_.push_back({k, w / nw});
        u.phases_(k) = unit_phase(alpha);
    }
    u.phases_(d - 1) = rng.phase();
    return u;
}

HouseholderRotation HouseholderRotation::mapping(const CVector& from, const CVector& to) {
    if (from.size() != to.size() || from.size() == 0) throw std::invalid_argument("mapping: dimension mismatch");
    if (std::abs(from.norm() - 1.0) > tol::norm || std::abs(to.norm() - 1.0) > tol::norm)
        throw std::invalid_argument("mapping: vectors must be normalized");
    HouseholderRotation u(static_cast<std::size_t>(from.size()));
    // rotate the phase of `from` so <to|f'> is real and nonnegative, then
    // the reflection along f' - to carries f' onto to
    const Complex overlap = to.dot(from);
    const Complex g = std::abs(overlap) > 0.0 ? std::conj(unit_phase(overlap)) : Complex(1.0);
    const CVector fp = g * from;
    CVector w = fp - to;
    const double nw = w.norm();
    if (nw > 1e-14) u.refl_.push_back({0, w / nw});
    u.phases_.setConstant(g);
    return u;
}

CVector HouseholderRotation::apply(const CVector& v) const {
    if (static_cast<std::size_t>(v.size()) != dim_) throw std::invalid_argument("HouseholderRotation::apply: size");
    CVector out = phases_.cwiseProduct(v);
    for (auto it = refl_.rbegin(); it != refl_.rend(); ++it) {
        auto seg = out.segment(it->offset, it->w.size());
        const Complex c = it->w.dot(seg);
        seg -= 2.0 * c * it->w;
    }
    return out;
}

CVector HouseholderRotation::apply_adjoint(const CVector& v) const {
    if (static_cast<std::size_t>(v.size()) != dim_) throw std::invalid_argument("HouseholderRotation::apply_adjoint: size");
    CVector out = v;
    for (const auto& r : refl_) {
        auto seg = out.segment(r.offset, r.w.size());
        const Complex c = r.w.dot(seg);
        seg -= 2.0 * c * r.w;
    }
    return phases_.conjugate().cwiseProduct(out);
}

CMatrix HouseholderRotation::matrix() const {
    const auto d = static_cast<Eigen::Index>(dim_);
    CMatrix m(d, d);
    CVector e = CVector::Zero(d);
    for (Eigen::Index j = 0; j < d; ++j) {
        e(j) = 1.0;
        m.col(j) = apply(e);
        e(j) = 0.0;
    }
    return m;
}

}  // namespace thermeq
