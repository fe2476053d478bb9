#pragma once

#include "thermeq/register.hpp"
#include "thermeq/states.hpp"
#include "thermeq/subspace.hpp"
#include "thermeq/types.hpp"

namespace thermeq {

/// local (2^|sites| square) acting on `sites`, identity elsewhere. Local bit
/// t corresponds to sites[t].
CMatrix embed_operator(const SpinRegister& reg, const SiteSet& sites, const CMatrix& local);
HermitianOperator embed_site_operator(const SpinRegister& reg, int site, const CMatrix& local);

/// Pauli matrices in the up = |0> convention.
CMatrix pauli_x();
CMatrix pauli_y();
CMatrix pauli_z();

/// Reduced density matrix on `keep`; kept sites map to output bits in
/// ascending site order.
DensityMatrix partial_trace(const DensityMatrix& rho, const SiteSet& keep);
CMatrix partial_trace(const CMatrix& rho, int n_sites, const SiteSet& keep);

/// tr_{complement} |psi><psi| without forming the d x d outer product.
CMatrix reduced_state(const CVector& psi, int n_sites, const SiteSet& keep);
inline CMatrix reduced_state(const PureState& psi, const SiteSet& keep) {
    return reduced_state(psi.amplitudes(), psi.n_sites(), keep);
}

/// First-factor reduced state for the split index = a + d1 * b.
CMatrix reduced_state_split(const CVector& psi, std::size_t d1);

/// sum_j w_j tr_{complement}|v_j><v_j| over columns of V.
CMatrix reduced_mixture(const CMatrix& v, const RVector& weights, int n_sites, const SiteSet& keep);

/// Reduced micro-canonical state tr_{complement}(P / rank) of a subspace.
CMatrix reduced_mc_state(const Subspace& s, int n_sites, const SiteSet& keep);

}  // namespace thermeq
