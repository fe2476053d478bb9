#pragma once

#include "thermeq/states.hpp"
#include "thermeq/subspace.hpp"
#include "thermeq/types.hpp"

#include <optional>
#include <vector>

namespace thermeq {

/// Ascending eigenvalues with eigenvectors. Diagonal inputs keep only the
/// sorting permutation (eigenvector j is e_{basis_index(j)}).
class SpectralDecomposition {
  public:
    SpectralDecomposition(RVector eigenvalues, CMatrix eigenvectors);
    SpectralDecomposition(RVector eigenvalues, std::vector<Eigen::Index> basis_index);

    std::size_t dim() const { return static_cast<std::size_t>(evals_.size()); }
    const RVector& eigenvalues() const { return evals_; }
    double eigenvalue(Eigen::Index j) const { return evals_(j); }
    bool is_permutation() const { return !vecs_.has_value(); }
    Eigen::Index basis_index(Eigen::Index j) const { return perm_.at(static_cast<std::size_t>(j)); }
    const std::vector<Eigen::Index>& permutation() const { return perm_; }

    /// Dense eigenvector matrix; materialized for the permutation form.
    CMatrix eigenvectors() const;
    /// Dense V without copying; throws for the permutation form.
    const CMatrix& dense() const;
    CVector vector(Eigen::Index j) const;

    /// c = V^dagger psi
    CVector to_eigenbasis(const CVector& psi) const;
    /// V c
    CVector from_eigenbasis(const CVector& c) const;
    /// V^dagger A V
    CMatrix in_eigenbasis(const CMatrix& a) const;
    /// Subspace spanned by the eigenvectors with the given indices.
    Subspace span(const std::vector<Eigen::Index>& which) const;

    /// max|H - V L V^dagger| relative to max|H|.
    double reconstruction_error(const CMatrix& h) const;
    double unitarity_error() const;

  private:
    RVector evals_;
    std::optional<CMatrix> vecs_;
    std::vector<Eigen::Index> perm_;
};

SpectralDecomposition eig_hermitian(const HermitianOperator& h);
/// Validates Hermiticity of `h` first.
SpectralDecomposition eig_hermitian(const CMatrix& h);

/// Eigenvalues only (ascending) of a Hermitian matrix, no validation.
RVector hermitian_eigenvalues(const CMatrix& h);

/// Sum of |eigenvalues| of a Hermitian matrix.
double trace_norm(const CMatrix& h);
double trace_norm_distance(const CMatrix& a, const CMatrix& b);
double trace_norm_distance(const DensityMatrix& a, const DensityMatrix& b);

/// Indices where consecutive sorted values differ by more than `tol`
/// start a new group; returns group boundaries [g0=0, g1, ..., n].
std::vector<Eigen::Index> cluster_sorted(const RVector& sorted, double tol);

}  // namespace thermeq
