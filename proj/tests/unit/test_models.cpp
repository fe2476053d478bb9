#include <doctest.h>

#include "oracles.hpp"

#include "thermeq/models.hpp"
#include "thermeq/partial_trace.hpp"
#include "thermeq/spectral.hpp"

#include <bit>
#include <cmath>
#include <numbers>

using namespace thermeq;

TEST_CASE("sample_fields") {
    const auto zero = sample_fields(5, 0.0, 1);
    for (double h : zero.fields) CHECK(h == 0.0);
    CHECK(sample_fields(8, 2.0, 42).fields == sample_fields(8, 2.0, 42).fields);
    CHECK(sample_fields(8, 2.0, 42).fields != sample_fields(8, 2.0, 43).fields);
    CHECK_THROWS(sample_fields(3, -1.0, 1));

    const auto big = sample_fields(10000, 1.0, 7);
    double mean = 0.0;
    for (double h : big.fields) {
        CHECK(std::abs(h) < 1.0);
        mean += h / 1e4;
    }
    CHECK(std::abs(mean) <= 4.0 / std::sqrt(3e4));
}

TEST_CASE("build_h2") {
    const auto h1 = build_h2(SpinRegister(1), {0.3}).matrix();
    CHECK(h1(0, 0).real() == doctest::Approx(0.3));
    CHECK(h1(1, 1).real() == doctest::Approx(-0.3));

    const auto h = build_h2(SpinRegister(2), {1.0, 2.0});
    CHECK(h.is_diagonal());
    const RVector ev = hermitian_eigenvalues(h.matrix());
    CHECK(ev(0) == doctest::Approx(-3.0));
    CHECK(ev(1) == doctest::Approx(-1.0));
    CHECK(ev(2) == doctest::Approx(1.0));
    CHECK(ev(3) == doctest::Approx(3.0));
    CHECK_THROWS(build_h2(SpinRegister(3), {1.0, 2.0}));

    const SpinRegister r(5);
    const auto f = sample_fields(5, 1.0, 3).fields;
    const CMatrix m = build_h2(r, f).matrix();
    for (std::size_t b = 0; b < 32; ++b) {
        double e = 0.0;
        for (int i = 0; i < 5; ++i) e += f[static_cast<std::size_t>(i)] * oracle::spin(b, i);
        CHECK(m(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(b)).real() == doctest::Approx(e));
    }
    for (int i = 0; i < 5; ++i) {
        const CMatrix z = embed_site_operator(r, i, pauli_z()).matrix();
        CHECK(max_abs(m * z - z * m) == 0.0);
    }
}

TEST_CASE("build_h5") {
    const SpinRegister r(4);
    const auto f = sample_fields(4, 1.5, 9).fields;
    ModelParams p;
    p.fields = f;
    CHECK(max_abs(build_h5(r, p).matrix() - build_h2(r, f).matrix()) == 0.0);

    ModelParams bond;
    bond.j = 1.0;
    bond.fields = {0.0, 0.0};
    const CMatrix b = build_h5(SpinRegister(2), bond).matrix();
    CHECK(b(0, 0).real() == 1.0);
    CHECK(b(1, 1).real() == -1.0);
    CHECK(b(2, 2).real() == -1.0);
    CHECK(b(3, 3).real() == 1.0);

    ModelParams full{1.0, 0.4, f, false};
    const CMatrix h = build_h5(r, full).matrix();
    CHECK(hermiticity_error(h) == 0.0);
    for (Eigen::Index i = 0; i < 16; ++i)
        for (Eigen::Index j = 0; j < 16; ++j)
            if (i != j && h(i, j) != Complex(0.0)) CHECK(std::popcount(static_cast<unsigned>(i ^ j)) == 1);
    for (int i = 0; i < 4; ++i) {
        const CMatrix z = embed_site_operator(r, i, pauli_z()).matrix();
        CHECK(max_abs(h * z - z * h) > 1e-6);
    }

    // periodic flag adds the wrap bond
    ModelParams open{1.0, 0.0, {0, 0, 0}, false}, ring{1.0, 0.0, {0, 0, 0}, true};
    const CMatrix ho = build_h5(SpinRegister(3), open).matrix(), hr = build_h5(SpinRegister(3), ring).matrix();
    CHECK(hr(0, 0).real() == 3.0);
    CHECK(ho(0, 0).real() == 2.0);

    CHECK_THROWS(build_h5(SpinRegister(1), ModelParams{1.0, 0.0, {0.0}, false}));
    CHECK_THROWS(build_h5(r, ModelParams{1.0, 0.0, {0.0}, false}));
}

TEST_CASE("random-basis Hamiltonian") {
    const Subspace shell(8, {1, 2, 5, 6});
    RVector spec(4);
    spec << -1.0, 0.2, 0.7, 2.0;
    const CMatrix h = build_random_basis_hamiltonian(shell, spec, 5).matrix();
    const CMatrix p = shell.projector();
    CHECK(max_abs(h * p - p * h) <= 1e-8);
    const RVector ev = hermitian_eigenvalues(shell.restrict(h));
    CHECK((ev - spec).cwiseAbs().maxCoeff() <= 1e-8);
    // zero off the shell
    CHECK(max_abs(h.row(0)) == 0.0);
    RVector dup(4);
    dup << 0.0, 1.0, 1.0, 2.0;
    CHECK_THROWS(build_random_basis_hamiltonian(shell, dup, 5));
    CHECK_THROWS(build_random_basis_hamiltonian(shell, RVector::Zero(3), 5));

    const Subspace one(4, {2});
    RVector lam(1);
    lam << 1.5;
    const CMatrix r1 = build_random_basis_hamiltonian(one, lam, 1).matrix();
    CHECK(std::abs(r1(2, 2) - Complex(1.5)) <= 1e-12);
    CHECK(std::abs(r1.trace() - Complex(1.5)) <= 1e-12);
}

TEST_CASE("product states") {
    const SpinRegister r(3);
    const PureState up = product_state(r, {ket_up(), ket_up(), ket_up()});
    CHECK(std::abs(up(0) - Complex(1.0)) == 0.0);
    const PureState right = product_state(SpinRegister(2), {ket_right(), ket_right()});
    for (Eigen::Index i = 0; i < 4; ++i) CHECK(std::abs(right(i) - Complex(0.5)) <= 1e-15);
    // bit 0 = site 0
    const PureState mixed = product_state(SpinRegister(2), {ket_down(), ket_up()});
    CHECK(std::abs(mixed(1)) == doctest::Approx(1.0));
    CHECK_THROWS(product_state(r, {ket_up(), ket_up()}));
    CHECK_THROWS(product_state(SpinRegister(1), {Qubit{Complex(1.0), Complex(1.0)}}));

    const std::vector<Qubit> f{ket_left(), ket_down(), Qubit{Complex(0.6), Complex(0.0, 0.8)}};
    const PureState psi = product_state(r, f);
    for (int s = 0; s < 3; ++s) {
        CVector q(2);
        q << f[static_cast<std::size_t>(s)][0], f[static_cast<std::size_t>(s)][1];
        CHECK(max_abs(reduced_state(psi, {s}) - q * q.adjoint()) <= 1e-14);
    }
}

TEST_CASE("Gibbs states") {
    const auto h = build_h5(SpinRegister(3), ModelParams{1.0, 0.5, {0.1, -0.2, 0.3}, false});
    const auto g0 = build_gibbs(h, 0.0);
    CHECK(max_abs(g0.matrix() - CMatrix::Identity(8, 8) / 8.0) <= 1e-14);

    RVector two(2);
    two << 0.0, 1.0;
    const auto w = gibbs_weights(two, 50.0);
    CHECK(w(1) == doctest::Approx(std::exp(-50.0) / (1.0 + std::exp(-50.0))).epsilon(1e-10));
    CHECK(gibbs_weights(two, 1e4)(1) == 0.0);

    double prev = 1e300;
    for (double beta = -2.0; beta <= 2.0; beta += 0.25) {
        const double e = build_gibbs(h, beta).expectation(h.matrix());
        CHECK(e < prev);
        prev = e;
    }
    const CMatrix shifted = h.matrix() + 1e3 * CMatrix::Identity(8, 8);
    CHECK(max_abs(build_gibbs(HermitianOperator(shifted), 0.7).matrix() - build_gibbs(h, 0.7).matrix()) <= 1e-12);
}
