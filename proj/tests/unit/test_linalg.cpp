#include <doctest.h>

#include "oracles.hpp"

#include "thermeq/parallel.hpp"
#include "thermeq/partial_trace.hpp"
#include "thermeq/register.hpp"
#include "thermeq/rng.hpp"
#include "thermeq/spectral.hpp"
#include "thermeq/states.hpp"
#include "thermeq/subspace.hpp"
#include "thermeq/unitary.hpp"

#include <numbers>

using namespace thermeq;

namespace {

CMatrix diag(std::initializer_list<double> v) {
    RVector r(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) r(i++) = x;
    return r.cast<Complex>().asDiagonal();
}

CMatrix ket_bra(const CVector& a) { return a * a.adjoint(); }

}  // namespace

TEST_CASE("register: dimensions and cells") {
    SpinRegister r(3);
    CHECK(r.dim() == 8);
    CHECK(r.cells().size() == 1);
    CHECK(SpinRegister::with_uniform_cells(6, 2).n_cells() == 3);
    CHECK_THROWS(SpinRegister(0));
    CHECK_THROWS(SpinRegister(17));
    CHECK_NOTHROW(SpinRegister(18, {}, 20));
    CHECK_THROWS(SpinRegister(4, {{0, 1}, {1, 2, 3}}));
    CHECK_THROWS(SpinRegister(4, {{0, 1}, {2}}));
    CHECK_THROWS(SpinRegister::with_uniform_cells(5, 2));
    CHECK(sites_for_dim(64) == 6);
    CHECK_THROWS(sites_for_dim(12));
    CHECK(diameter({2, 3, 5}) == 4);
    CHECK(complement({0, 2}, 4) == SiteSet{1, 3});
}

TEST_CASE("embed_site_operator follows the bit convention") {
    const SpinRegister r1(1), r2(2);
    CHECK(max_abs(embed_site_operator(r1, 0, pauli_z()).matrix() - diag({1, -1})) == 0.0);
    CHECK(max_abs(embed_site_operator(r2, 0, pauli_z()).matrix() - diag({1, -1, 1, -1})) == 0.0);
    CHECK(max_abs(embed_site_operator(r2, 1, pauli_z()).matrix() - diag({1, 1, -1, -1})) == 0.0);
    CHECK_THROWS_AS(embed_site_operator(r2, 2, pauli_z()), std::out_of_range);
    CHECK_THROWS_AS(embed_site_operator(r2, -1, pauli_z()), std::out_of_range);
    CMatrix bad = pauli_x();
    bad(0, 1) = 2.0;
    CHECK_THROWS(embed_site_operator(r2, 0, bad));

    const SpinRegister r4(4);
    for (int site = 0; site < 4; ++site) {
        const CMatrix lib = embed_site_operator(r4, site, pauli_y()).matrix();
        CHECK(max_abs(lib - oracle::embed(4, site, pauli_y())) == 0.0);
    }
    const RVector ev = hermitian_eigenvalues(embed_site_operator(r4, 2, pauli_x()).matrix());
    for (Eigen::Index i = 0; i < 8; ++i) CHECK(ev(i) == doctest::Approx(-1.0));
    for (Eigen::Index i = 8; i < 16; ++i) CHECK(ev(i) == doctest::Approx(1.0));
}

TEST_CASE("partial trace: examples") {
    // |up> (x) |down> with site 0 = bit 0: index 0b10 = 2
    CVector prod = CVector::Zero(4);
    prod(2) = 1.0;
    const DensityMatrix rho = DensityMatrix::from_pure(prod);
    CHECK(max_abs(partial_trace(rho, {0}).matrix() - diag({1, 0})) < 1e-15);
    CHECK(max_abs(partial_trace(rho, {1}).matrix() - diag({0, 1})) < 1e-15);

    CVector bell = CVector::Zero(4);
    bell(1) = bell(2) = 1.0 / std::numbers::sqrt2;
    CHECK(max_abs(partial_trace(DensityMatrix::from_pure(bell), {0}).matrix() - diag({0.5, 0.5})) < 1e-15);
    CHECK_THROWS(partial_trace(rho, SiteSet{}));
    CHECK_THROWS(partial_trace(rho, SiteSet{2}));
}

TEST_CASE("partial trace: subsubsystem composition on a random 3-site state") {
    const DensityMatrix rho(oracle::random_density(8, 11));
    const DensityMatrix r01 = partial_trace(rho, {0, 1});
    const DensityMatrix r0 = partial_trace(rho, {0});
    CHECK(max_abs(partial_trace(r01, {0}).matrix() - r0.matrix()) <= 1e-12);
}

TEST_CASE("partial trace agrees with the brute-force oracle") {
    const CMatrix rho = oracle::random_density(32, 12);
    for (const SiteSet& keep : {SiteSet{0}, SiteSet{4}, SiteSet{1, 3}, SiteSet{0, 2, 4}, SiteSet{0, 1, 2, 3, 4}}) {
        const CMatrix lib = partial_trace(rho, 5, keep);
        CHECK(max_abs(lib - oracle::partial_trace(rho, 5, keep)) <= 1e-14);
        CHECK(std::abs(lib.trace() - Complex(1.0)) <= 1e-10);
        CHECK(hermitian_eigenvalues(lib).minCoeff() >= -1e-10);
    }
    const CVector psi = oracle::random_unit(32, 13);
    for (const SiteSet& keep : {SiteSet{2}, SiteSet{0, 3}, SiteSet{1, 2, 4}})
        CHECK(max_abs(reduced_state(psi, 5, keep) - oracle::partial_trace(ket_bra(psi), 5, keep)) <= 1e-14);
}

TEST_CASE("Schmidt symmetry of the two reduced states") {
    const CVector psi = oracle::random_unit(64, 14);
    const RVector a = hermitian_eigenvalues(reduced_state(psi, 6, {0, 1}));
    const RVector b = hermitian_eigenvalues(reduced_state(psi, 6, {2, 3, 4, 5}));
    for (Eigen::Index i = 0; i < 4; ++i) CHECK(std::abs(a(3 - i) - b(15 - i)) <= 1e-10);
    for (Eigen::Index i = 0; i < 12; ++i) CHECK(std::abs(b(i)) <= 1e-10);
}

TEST_CASE("trace norm distance") {
    const CMatrix up = diag({1, 0}), down = diag({0, 1}), mixed = diag({0.5, 0.5});
    CHECK(trace_norm_distance(up, up) == doctest::Approx(0.0));
    CHECK(trace_norm_distance(up, mixed) == doctest::Approx(1.0));
    CHECK(trace_norm_distance(up, down) == doctest::Approx(2.0));
    CHECK_THROWS(trace_norm_distance(up, CMatrix::Identity(3, 3)));
    for (std::uint64_t s = 0; s < 20; ++s) {
        const CMatrix a = oracle::random_density(6, 100 + s), b = oracle::random_density(6, 200 + s),
                      c = oracle::random_density(6, 300 + s);
        const double ab = trace_norm_distance(a, b);
        CHECK(ab == doctest::Approx(trace_norm_distance(b, a)).epsilon(1e-12));
        CHECK(ab <= trace_norm_distance(a, c) + trace_norm_distance(c, b) + 1e-12);
        CHECK(ab <= 2.0 + 1e-12);
        CHECK(ab == doctest::Approx(oracle::trace_norm(a - b)).epsilon(1e-10));
    }
    // pure states: distance 2 exactly when orthogonal
    CVector x = oracle::random_unit(5, 1), y = oracle::random_unit(5, 2);
    y -= x * x.dot(y);
    y.normalize();
    CHECK(trace_norm_distance(ket_bra(x), ket_bra(y)) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(trace_norm_distance(ket_bra(x), ket_bra(oracle::random_unit(5, 3))) < 2.0 - 1e-6);
}

TEST_CASE("eig_hermitian") {
    SUBCASE("diagonal input keeps a permutation") {
        const auto s = eig_hermitian(diag({3, -1, 2}));
        CHECK(s.is_permutation());
        CHECK(s.eigenvalues()(0) == -1.0);
        CHECK(s.eigenvalues()(2) == 3.0);
        CHECK(s.basis_index(0) == 1);
        CHECK(s.basis_index(2) == 0);
    }
    SUBCASE("pauli x") {
        const auto s = eig_hermitian(pauli_x());
        CHECK(s.eigenvalues()(0) == doctest::Approx(-1.0));
        CHECK(s.eigenvalues()(1) == doctest::Approx(1.0));
    }
    SUBCASE("random 64 x 64 reconstruction") {
        const CMatrix h = oracle::random_hermitian(64, 5);
        const auto s = eig_hermitian(h);
        CHECK(s.reconstruction_error(h) <= 1e-10);
        CHECK(s.unitarity_error() <= 1e-10);
        for (Eigen::Index i = 1; i < 64; ++i) CHECK(s.eigenvalue(i - 1) <= s.eigenvalue(i));
    }
    SUBCASE("reconstruction at dim 1024") {
        const CMatrix h = oracle::random_hermitian(1024, 6);
        CHECK(eig_hermitian(h).reconstruction_error(h) <= 1e-8);
    }
    SUBCASE("non-Hermitian input") {
        CMatrix h = oracle::random_hermitian(4, 7);
        h(0, 1) += 1e-6;
        CHECK_THROWS_AS(eig_hermitian(h), std::invalid_argument);
    }
    SUBCASE("constructor validation") {
        RVector e(2);
        e << 1.0, 0.0;
        CHECK_THROWS(SpectralDecomposition(e, std::vector<Eigen::Index>{0, 1}));
        e << 0.0, 1.0;
        CHECK_THROWS(SpectralDecomposition(e, std::vector<Eigen::Index>{0, 0}));
    }
}

TEST_CASE("subspaces and projections") {
    const Subspace s(4, {0, 2});
    CVector in = CVector::Zero(4), out = CVector::Zero(4);
    in(2) = 1.0;
    out(1) = 1.0;
    CHECK(project_onto(s, PureState(in)).weight == doctest::Approx(1.0));
    CHECK(project_onto(s, PureState(out)).weight == doctest::Approx(0.0));
    CHECK_THROWS(project_onto(s, PureState(CVector::Ones(3) / std::sqrt(3.0))));
    CHECK_THROWS(Subspace(4, {0, 0}));
    CHECK_THROWS(Subspace(4, {4}));
    CHECK_THROWS(Subspace(4, std::vector<Eigen::Index>{}));
    CMatrix bad(3, 2);
    bad << 1, 1, 0, 0, 0, 0;
    CHECK_THROWS(Subspace(bad));

    // Parseval over a complete decomposition with dense frames
    Rng rng(3);
    const CMatrix u = haar_unitary(6, rng);
    const PureState psi(oracle::random_unit(6, 9));
    double total = 0.0;
    for (Eigen::Index k = 0; k < 3; ++k) {
        const Subspace part(CMatrix(u.middleCols(2 * k, 2)));
        const auto p = project_onto(part, psi);
        CHECK(p.component.norm() * p.component.norm() == doctest::Approx(p.weight));
        total += p.weight;
    }
    CHECK(std::abs(total - 1.0) <= 1e-10);
}

TEST_CASE("state carriers validate their invariants") {
    CHECK_THROWS(PureState(CVector::Ones(2)));
    CHECK_NOTHROW(PureState(CVector::Ones(2) / std::numbers::sqrt2));
    CHECK(PureState(CVector::Ones(4) / 2.0).n_sites() == 2);
    CHECK(PureState(CVector::Ones(3) / std::sqrt(3.0)).n_sites() == -1);
    CHECK_THROWS(DensityMatrix(diag({0.6, 0.6})));
    CHECK_THROWS(DensityMatrix(diag({1.5, -0.5})));
    CMatrix nh = diag({0.5, 0.5});
    nh(0, 1) = 0.1;
    CHECK_THROWS(DensityMatrix(nh));
    CHECK_THROWS(HermitianOperator(nh));
    CHECK(DensityMatrix::maximally_mixed(4).purity() == doctest::Approx(0.25));
}

TEST_CASE("Haar unitaries and Householder rotations") {
    Rng rng(21);
    const CMatrix u = haar_unitary(12, rng);
    CHECK(max_abs(u.adjoint() * u - CMatrix::Identity(12, 12)) <= 1e-12);
    const CMatrix v = haar_isometry(12, 5, rng);
    CHECK(max_abs(v.adjoint() * v - CMatrix::Identity(5, 5)) <= 1e-12);
    CHECK_THROWS(haar_isometry(4, 5, rng));

    const auto h = HouseholderRotation::haar(10, rng);
    const CMatrix m = h.matrix();
    CHECK(max_abs(m.adjoint() * m - CMatrix::Identity(10, 10)) <= 1e-12);
    const CVector x = oracle::random_unit(10, 4);
    CHECK((h.apply(x) - m * x).norm() <= 1e-12);
    CHECK((h.apply_adjoint(h.apply(x)) - x).norm() <= 1e-12);

    const CVector a = oracle::random_unit(10, 5), b = oracle::random_unit(10, 6);
    const auto map = HouseholderRotation::mapping(a, b);
    CHECK((map.apply(a) - b).norm() <= 1e-12);
    CHECK(map.n_reflectors() <= 2);
    CHECK((HouseholderRotation::mapping(a, a).apply(a) - a).norm() <= 1e-12);
}

TEST_CASE("rng streams are pure functions of (seed, stream)") {
    Rng a(5, 3), b(5, 3), c(5, 4);
    for (int i = 0; i < 10; ++i) {
        const auto x = a(), y = b(), z = c();
        CHECK(x == y);
        CHECK(x != z);
    }
    Rng r(1);
    for (int i = 0; i < 1000; ++i) {
        const double u = r.uniform(-2.0, 3.0);
        CHECK(u > -2.0);
        CHECK(u < 3.0);
        CHECK(r.below(7) < 7);
    }
}

TEST_CASE("parallel_map returns index order for any worker count") {
    const auto f = [](std::size_t i) { return Rng(9, i).uniform(); };
    const auto one = parallel_map(1000, 1, f);
    const auto four = parallel_map(1000, 4, f);
    CHECK(one == four);
    CHECK_THROWS_AS(parallel_map(10, 3, [](std::size_t i) -> int {
                        if (i == 7) throw std::runtime_error("boom");
                        return 0;
                    }),
                    std::runtime_error);
}
