#pragma once

#include "thermeq/types.hpp"

namespace thermeq {

/// Normalized state vector. The site count is known only when dim is a
/// power of two; abstract (shell-coordinate) states report -1.
class PureState {
  public:
    explicit PureState(CVector amplitudes);
    static PureState from_unnormalized(const CVector& v);
    static PureState basis(std::size_t dim, std::size_t index);

    const CVector& amplitudes() const { return amps_; }
    std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }
    int n_sites() const;

    Complex operator()(Eigen::Index i) const { return amps_(i); }

    /// <psi|A|psi>, real part (A assumed Hermitian).
    double expectation(const CMatrix& a) const;

  private:
    CVector amps_;
};

class HermitianOperator {
  public:
    explicit HermitianOperator(CMatrix entries);

    const CMatrix& matrix() const { return m_; }
    std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
    /// All off-diagonal entries exactly zero.
    bool is_diagonal() const { return diagonal_; }
    RVector diagonal_real() const { return m_.diagonal().real(); }

  private:
    CMatrix m_;
    bool diagonal_;
};

class DensityMatrix {
  public:
    /// Validates Hermiticity, unit trace and positivity.
    explicit DensityMatrix(CMatrix entries);

    /// sum_j p_j |v_j><v_j|; trusted when V is orthonormal and p is a
    /// probability vector (checked cheaply).
    static DensityMatrix from_spectrum(const CMatrix& v, const RVector& p);
    static DensityMatrix from_pure(const CVector& psi);
    static DensityMatrix from_pure(const PureState& psi) { return from_pure(psi.amplitudes()); }
    static DensityMatrix maximally_mixed(std::size_t dim);

    const CMatrix& matrix() const { return m_; }
    std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
    double purity() const;
    double expectation(const CMatrix& a) const;

  private:
    struct Trusted {};
    DensityMatrix(CMatrix entries, Trusted) : m_(std::move(entries)) {}
    CMatrix m_;
};

}  // namespace thermeq
