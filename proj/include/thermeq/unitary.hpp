#pragma once

#include "thermeq/rng.hpp"
#include "thermeq/types.hpp"

#include <vector>

namespace thermeq {

/// Haar unitary from QR of a complex Gaussian matrix, R diagonal phase-fixed.
CMatrix haar_unitary(Eigen::Index d, Rng& rng);
/// First r columns of a Haar unitary (d x r isometry).
CMatrix haar_isometry(Eigen::Index d, Eigen::Index r, Rng& rng);

/// U = H_1 H_2 ... H_m diag(phases), each H_k = I - 2 w w^dagger acting on
/// coordinates offset_k..d-1 with unit w. Storing reflectors instead of the
/// dense matrix keeps both construction and application O(d^2).
class HouseholderRotation {
  public:
    struct Reflector {
        Eigen::Index offset;
        CVector w;
    };

    explicit HouseholderRotation(std::size_t dim);

    /// Haar distributed: the reflector sequence of a Householder QR of a
    /// complex Gaussian matrix, with the phases of R's diagonal in D.
    static HouseholderRotation haar(std::size_t dim, Rng& rng);

    /// A unitary with U from = to (one reflection and a global phase).
    static HouseholderRotation mapping(const CVector& from, const CVector& to);

    std::size_t dim() const { return dim_; }
    std::size_t n_reflectors() const { return refl_.size(); }

    CVector apply(const CVector& v) const;
    CVector apply_adjoint(const CVector& v) const;
    CMatrix matrix() const;

  private:
    std::size_t dim_;
    std::vector<Reflector> refl_;
    CVector phases_;
};

}  // namespace thermeq
