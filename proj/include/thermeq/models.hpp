#pragma once

#include "thermeq/register.hpp"
#include "thermeq/spectral.hpp"
#include "thermeq/states.hpp"
#include "thermeq/subspace.hpp"
#include "thermeq/types.hpp"

#include <array>
#include <cstdint>
#include <numbers>
#include <vector>

namespace thermeq {

struct FieldConfiguration {
    double w = 0.0;
    std::vector<double> fields;
    std::uint64_t seed = 0;
};

/// i.i.d. uniform on (-w, w); all zero when w = 0.
FieldConfiguration sample_fields(int n_sites, double w, std::uint64_t seed);

struct ModelParams {
    double j = 0.0;
    double gamma = 0.0;
    std::vector<double> fields;
    bool periodic = false;  // open chain unless asked
};

/// sum_i h_i sigma^z_i (diagonal).
HermitianOperator build_h2(const SpinRegister& reg, const std::vector<double>& fields);

/// sum_i (J z_i z_{i+1} + Gamma x_i + h_i z_i); bonds i = 0..n-2, plus (n-1, 0)
/// when periodic.
HermitianOperator build_h5(const SpinRegister& reg, const ModelParams& p);

/// Columns F U with F the shell frame and U a Haar k x k unitary drawn from
/// `seed`; the eigenbasis used by build_random_basis_hamiltonian.
CMatrix random_basis_eigenvectors(const Subspace& shell, std::uint64_t seed);

/// F U diag(spectrum) U^dagger F^dagger; eigenvalues must be pairwise distinct.
HermitianOperator build_random_basis_hamiltonian(const Subspace& shell, const RVector& spectrum,
                                                 std::uint64_t seed);

using Qubit = std::array<Complex, 2>;
inline Qubit ket_up() { return {Complex(1.0), Complex(0.0)}; }
inline Qubit ket_down() { return {Complex(0.0), Complex(1.0)}; }
inline Qubit ket_right() { return {Complex(1.0 / std::numbers::sqrt2), Complex(1.0 / std::numbers::sqrt2)}; }
inline Qubit ket_left() { return {Complex(1.0 / std::numbers::sqrt2), Complex(-1.0 / std::numbers::sqrt2)}; }

/// Tensor product; factor i sits on site i (bit i).
PureState product_state(const SpinRegister& reg, const std::vector<Qubit>& factors);

/// Boltzmann weights exp(-beta E) / Z with the largest exponent shifted to 0.
RVector gibbs_weights(const RVector& energies, double beta);

DensityMatrix build_gibbs(const SpectralDecomposition& spec, double beta);
DensityMatrix build_gibbs(const HermitianOperator& h, double beta);

}  // namespace thermeq
