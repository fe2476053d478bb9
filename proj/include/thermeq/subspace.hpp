#pragma once

#include "thermeq/states.hpp"
#include "thermeq/types.hpp"

#include <vector>

namespace thermeq {

/// Subspace of C^d given either by an orthonormal frame (d x k) or, for
/// spans of computational basis vectors, by the list of those indices.
/// The coordinate form keeps H2-sized problems (d = 4096) free of dense
/// d x d matrices.
class Subspace {
  public:
    /// Frame columns must be orthonormal within tol::orthonormal.
    explicit Subspace(CMatrix frame);
    /// Span of e_i for i in `indices` (distinct, < ambient).
    Subspace(std::size_t ambient, std::vector<Eigen::Index> indices);
    static Subspace full(std::size_t ambient);

    std::size_t ambient() const { return ambient_; }
    std::size_t rank() const { return rank_; }
    bool is_coordinate() const { return coordinate_; }
    const std::vector<Eigen::Index>& indices() const { return indices_; }

    /// frame^dagger psi
    CVector coefficients(const CVector& psi) const;
    /// frame * c
    CVector embed(const CVector& c) const;
    CVector column(Eigen::Index j) const;
    /// Dense frame (materialized for coordinate subspaces).
    CMatrix frame() const;
    CMatrix projector() const;

    double weight(const CVector& psi) const;
    double weight(const PureState& psi) const { return weight(psi.amplitudes()); }
    /// tr(rho P)
    double weight(const DensityMatrix& rho) const;

    /// frame^dagger A frame
    CMatrix restrict(const CMatrix& a) const;

  private:
    std::size_t ambient_;
    std::size_t rank_;
    bool coordinate_;
    CMatrix frame_;
    std::vector<Eigen::Index> indices_;
};

struct Projection {
    CVector component;
    double weight;
};

Projection project_onto(const Subspace& s, const PureState& psi);

}  // namespace thermeq
