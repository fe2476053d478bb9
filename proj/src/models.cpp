#include "thermeq/models.hpp"

#include "thermeq/rng.hpp"
#include "thermeq/unitary.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace thermeq {

FieldConfiguration sample_fields(int n_sites, double w, std::uint64_t seed) {
    if (n_sites < 1) throw std::invalid_argument("sample_fields: n_sites must be positive");
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("sample_fields: w must be finite and >= 0");
    FieldConfiguration f{w, std::vector<double>(static_cast<std::size_t>(n_sites), 0.0), seed};
    if (w == 0.0) return f;
    Rng rng(seed, 0x6669656c64ULL);
    for (auto& h : f.fields) h = rng.uniform(-w, w);
    return f;
}

HermitianOperator build_h2(const SpinRegister& reg, const std::vector<double>& fields) {
    if (static_cast<int>(fields.size()) != reg.n_sites())
        throw std::invalid_argument("build_h2: field count does not match n_sites");
    const auto d = static_cast<Eigen::Index>(reg.dim());
    CMatrix h = CMatrix::Zero(d, d);
    for (Eigen::Index b = 0; b < d; ++b) {
        double e = 0.0;
        for (int i = 0; i < reg.n_sites(); ++i)
            e += ((b >> i) & 1) ? -fields[static_cast<std::size_t>(i)] : fields[static_cast<std::size_t>(i)];
        h(b, b) = e;
    }
    return HermitianOperator(std::move(h));
}

HermitianOperator build_h5(const SpinRegister& reg, const ModelParams& p) {
    const int n = reg.n_sites();
    if (n < 2) throw std::invalid_argument("build_h5: needs at least two sites");
    if (static_cast<int>(p.fields.size()) != n) throw std::invalid_argument("build_h5: field count does not match n_sites");
    if (!std::isfinite(p.j) || !std::isfinite(p.gamma)) throw std::invalid_argument("build_h5: non-finite coupling");
    const auto d = static_cast<Eigen::Index>(reg.dim());
    const int n_bonds = p.periodic && n > 2 ? n : n - 1;
    CMatrix h = CMatrix::Zero(d, d);
    for (Eigen::Index b = 0; b < d; ++b) {
        auto z = [&](int i) { return ((b >> i) & 1) ? -1.0 : 1.0; };
        double e = 0.0;
        for (int i = 0; i < n; ++i) e += p.fields[static_cast<std::size_t>(i)] * z(i);
        for (int i = 0; i < n_bonds; ++i) e += p.j * z(i) * z((i + 1) % n);
        h(b, b) = e;
        if (p.gamma != 0.0)
            for (int i = 0; i < n; ++i) h(b ^ (Eigen::Index{1} << i), b) += p.gamma;
    }
    return HermitianOperator(std::move(h));
}

CMatrix random_basis_eigenvectors(const Subspace& shell, std::uint64_t seed) {
    Rng rng(seed, 0x626173697355ULL);
    const auto k = static_cast<Eigen::Index>(shell.rank());
    const CMatrix u = haar_unitary(k, rng);
    if (shell.is_coordinate()) {
        CMatrix v = CMatrix::Zero(static_cast<Eigen::Index>(shell.ambient()), k);
        for (Eigen::Index i = 0; i < k; ++i) v.row(shell.indices()[static_cast<std::size_t>(i)]) = u.row(i);
        return v;
    }
    return shell.frame() * u;
}

HermitianOperator build_random_basis_hamiltonian(const Subspace& shell, const RVector& spectrum,
                                                 std::uint64_t seed) {
    if (static_cast<std::size_t>(spectrum.size()) != shell.rank())
        throw std::invalid_argument("build_random_basis_hamiltonian: spectrum length must equal shell dimension");
    std::vector<double> sorted(spectrum.data(), spectrum.data() + spectrum.size());
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 1; i < sorted.size(); ++i)
        if (sorted[i] == sorted[i - 1])
            throw std::invalid_argument("build_random_basis_hamiltonian: repeated eigenvalue");
    const CMatrix v = random_basis_eigenvectors(shell, seed);
    CMatrix h = v * spectrum.cast<Complex>().asDiagonal() * v.adjoint();
    h = 0.5 * (h + h.adjoint()).eval();
    return HermitianOperator(std::move(h));
}

PureState product_state(const SpinRegister& reg, const std::vector<Qubit>& factors) {
    if (static_cast<int>(factors.size()) != reg.n_sites())
        throw std::invalid_argument("product_state: one factor per site required");
    for (const auto& f : factors)
        if (std::abs(std::norm(f[0]) + std::norm(f[1]) - 1.0) > tol::norm)
            throw std::invalid_argument("product_state: factor not normalized");
    const auto d = static_cast<Eigen::Index>(reg.dim());
    CVector v(d);
    for (Eigen::Index b = 0; b < d; ++b) {
        Complex a = 1.0;
        for (int i = 0; i < reg.n_sites(); ++i) a *= factors[static_cast<std::size_t>(i)][(b >> i) & 1];
        v(b) = a;
    }
    return PureState::from_unnormalized(v);
}

RVector gibbs_weights(const RVector& energies, double beta) {
    if (!std::isfinite(beta)) throw std::invalid_argument("gibbs: beta must be finite");
    if (energies.size() == 0) throw std::invalid_argument("gibbs: empty spectrum");
    RVector expo = -beta * energies;
    expo.array() -= expo.maxCoeff();
    RVector p = expo.array().exp();
    return p / p.sum();
}

DensityMatrix build_gibbs(const SpectralDecomposition& spec, double beta) {
    return DensityMatrix::from_spectrum(spec.eigenvectors(), gibbs_weights(spec.eigenvalues(), beta));
}

DensityMatrix build_gibbs(const HermitianOperator& h, double beta) { return build_gibbs(eig_hermitian(h), beta); }

}  // namespace thermeq
