#include <doctest.h>

#include "oracles.hpp"

#include "thermeq/dynamics.hpp"
#include "thermeq/models.hpp"
#include "thermeq/partial_trace.hpp"

#include <cmath>
#include <numeric>

using namespace thermeq;

namespace {

SpectralDecomposition h5_spec(int n, std::uint64_t seed) {
    return eig_hermitian(build_h5(SpinRegister(n), ModelParams{1.0, 0.6, sample_fields(n, 0.8, seed).fields, false}));
}

}  // namespace

TEST_CASE("observables") {
    const Observable mx = magnetization(4, {0, 2}, 'x');
    CHECK_FALSE(mx.is_dense());
    CHECK(max_abs(mx.to_dense() - oracle::embed(4, 0, pauli_x()) - oracle::embed(4, 2, pauli_x())) <= 1e-14);
    const CVector v = oracle::random_unit(16, 2);
    CHECK(mx.expectation(v) == doctest::Approx(v.dot(mx.to_dense() * v).real()));
    CHECK(mx.expectation(2.0 * v) == doctest::Approx(4.0 * mx.expectation(v)));
    CHECK(magnetization(3, {1}, 'y').to_dense().isApprox(oracle::embed(3, 1, pauli_y())));
    CHECK_THROWS(magnetization(3, {1}, 'w'));
    CHECK_THROWS(Observable::dense(CMatrix::Ones(2, 3)));
    CHECK_THROWS(Observable::dense(CMatrix(pauli_x() * Complex(0.0, 1.0))));
    CHECK_THROWS(Observable::local_sum(3, {{{1, 0}, CMatrix::Identity(4, 4)}}));
    CHECK_THROWS(Observable::local_sum(3, {{{1}, CMatrix::Identity(4, 4)}}));
    CHECK_THROWS(mx.expectation(CVector::Ones(8)));
}

TEST_CASE("evolution") {
    const CMatrix h = build_h5(SpinRegister(5), ModelParams{1.0, 0.6, sample_fields(5, 0.8, 3).fields, false}).matrix();
    const auto spec = eig_hermitian(h);
    const PureState psi(oracle::random_unit(32, 6));
    const EvolutionContext ctx(spec, psi);
    CHECK(max_abs(evolve(ctx, 0.0).amplitudes() - psi.amplitudes()) <= 1e-12);
    const double e0 = psi.expectation(h);
    for (double t : {0.3, 2.0, 50.0}) {
        const PureState pt = evolve(ctx, t);
        CHECK(pt.amplitudes().norm() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(pt.expectation(h) == doctest::Approx(e0).epsilon(1e-10));
    }
    // group property
    const CVector a = evolve_coefficients(ctx, 1.7);
    const EvolutionContext mid(spec, evolve(ctx, 1.0));
    CHECK(max_abs(evolve_coefficients(mid, 0.7) - a) <= 1e-10);
    CHECK(ctx.n_groups() == 32);
    CHECK_THROWS(EvolutionContext(spec, PureState::basis(16, 0)));
    CHECK_THROWS(EvolutionContext(spec, psi, -1.0));
}

TEST_CASE("time averages and pinching") {
    const auto spec = h5_spec(4, 1);
    const PureState psi(oracle::random_unit(16, 3));
    const EvolutionContext ctx(spec, psi);
    const CMatrix a = oracle::random_hermitian(16, 4);
    CHECK(infinite_time_average(ctx, a) == doctest::Approx(diagonal_ensemble_average(ctx, a)).epsilon(1e-12));
    const Observable mz = magnetization(4, {0, 1, 2, 3}, 'z');
    CHECK(infinite_time_average(ctx, mz) == doctest::Approx(infinite_time_average(ctx, mz.to_dense())).epsilon(1e-12));
    const CMatrix p = pinch(ctx, a);
    CHECK(max_abs(pinch(ctx, p) - p) <= 1e-12);
    CHECK(psi.expectation(p) == doctest::Approx(infinite_time_average(ctx, a)).epsilon(1e-12));
    const auto q = quadrature_time_average(ctx, a, 2e3);
    CHECK(q.mean == doctest::Approx(infinite_time_average(ctx, a)).epsilon(0.02));
    CHECK_THROWS(pinch(ctx, CMatrix::Identity(4, 4)));
    CHECK_THROWS(quadrature_time_average(ctx, a, 0.0));

    // a fully degenerate spectrum: nothing dephases
    const SpectralDecomposition flat(RVector::Zero(4), std::vector<Eigen::Index>{0, 1, 2, 3});
    const PureState plus(CVector::Constant(4, Complex(0.5)));
    const EvolutionContext dctx(flat, plus);
    CHECK(dctx.n_groups() == 1);
    const CMatrix x = oracle::embed(2, 0, pauli_x());
    CHECK(infinite_time_average(dctx, x) == doctest::Approx(1.0));
    CHECK(diagonal_ensemble_average(dctx, x) == doctest::Approx(0.0));
}

TEST_CASE("time variance") {
    // two levels, |right>, sigma_x: cos(2t) has variance 1/2
    RVector e(2);
    e << -1.0, 1.0;
    const SpectralDecomposition two(e, std::vector<Eigen::Index>{1, 0});
    const PureState right(CVector::Constant(2, Complex(1.0 / std::sqrt(2.0))));
    const EvolutionContext ctx(two, right);
    const auto v = time_variance(ctx, pauli_x());
    CHECK(v.exact);
    CHECK(v.value == doctest::Approx(0.5));
    CHECK(v.max_offdiag == doctest::Approx(1.0));
    CHECK(v.bound_holds);

    // diagonal observable does not fluctuate
    const auto z = time_variance(ctx, pauli_z());
    CHECK(z.value == doctest::Approx(0.0));

    // quadrature agrees with the closed form on a generic spectrum
    const auto spec = h5_spec(3, 8);
    const PureState psi(oracle::random_unit(8, 1));
    const EvolutionContext g(spec, psi);
    const CMatrix a = oracle::random_hermitian(8, 2);
    const auto tv = time_variance(g, a);
    REQUIRE(tv.exact);
    CHECK(tv.bound_holds);
    CHECK(quadrature_time_average(g, a, 2e4).variance == doctest::Approx(tv.value).epsilon(0.05));
    CHECK_THROWS(time_variance(g, CMatrix::Identity(4, 4)));
}

TEST_CASE("gap degeneracy scan") {
    RVector three(3);
    three << 0.0, 1.0, 2.0;
    const auto s = gap_degeneracy_scan(three, 1e-9);
    CHECK(s.count == 4);
    CHECK(s.count == oracle::gap_resonances(three, 1e-9));

    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const RVector e = h5_spec(3, seed).eigenvalues();
        CHECK(gap_degeneracy_scan(e, 1e-3).count == oracle::gap_resonances(e, 1e-3));
        CHECK(gap_degeneracy_scan(e, 0.5).count == oracle::gap_resonances(e, 0.5));
    }
    // sums of independent fields resonate massively
    const RVector h2 = eig_hermitian(build_h2(SpinRegister(4), sample_fields(4, 1.0, 2).fields)).eigenvalues();
    const std::size_t c = gap_degeneracy_scan(h2, 1e-9, 8).count;
    CHECK(c == oracle::gap_resonances(h2, 1e-9));
    CHECK(c > 100);
    CHECK(gap_degeneracy_scan(h2, 1e-9, 8).quadruples.size() == 8);

    CHECK_THROWS(gap_degeneracy_scan(RVector::LinSpaced(4097, 0.0, 1.0), 1e-9));
    CHECK_THROWS(gap_degeneracy_scan(three, -1.0));
    CHECK(inverse_mean_spacing(three) == doctest::Approx(1.0));
    CHECK_THROWS(inverse_mean_spacing(RVector::Zero(3)));
}

TEST_CASE("MATE-ETH average bound") {
    // the field model: eigenstates are basis states, the eq sector is a coordinate block
    const SpinRegister reg(4);
    const auto spec = eig_hermitian(build_h2(reg, sample_fields(4, 1.0, 5).fields));
    const Subspace eq(16, {3, 5, 6, 9, 10, 12});
    CVector in(16);
    in.setZero();
    in(3) = in(5) = in(6) = in(9) = 0.5;
    const auto ok = mate_eth_average_bound(EvolutionContext(spec, PureState(in)), eq, 0.1);
    CHECK(ok.applicable);
    CHECK(ok.n_support == 4);
    CHECK(ok.average == doctest::Approx(1.0));
    CHECK(ok.bound_holds);

    const auto orth = mate_eth_average_bound(EvolutionContext(spec, PureState::basis(16, 0)), eq, 0.1);
    CHECK_FALSE(orth.applicable);
    CHECK(orth.n_out_of_mate == 1);
    CHECK(orth.average == doctest::Approx(0.0));
    CHECK_FALSE(orth.bound_holds);
    CHECK_THROWS(mate_eth_average_bound(EvolutionContext(spec, PureState::basis(16, 0)), eq, 0.0));
    CHECK_THROWS(mate_eth_average_bound(EvolutionContext(spec, PureState::basis(16, 0)), Subspace(8, {0}), 0.1));
}

TEST_CASE("x relaxation under random fields") {
    const int n = 5;
    const auto fields = sample_fields(n, 1.0, 12).fields;
    const SpinRegister reg(n);
    const auto spec = eig_hermitian(build_h2(reg, fields));
    const PureState right = product_state(reg, std::vector<Qubit>(n, ket_right()));
    const EvolutionContext ctx(spec, right);
    const Observable mx = magnetization(n, {0, 1, 2, 3, 4}, 'x');
    std::vector<double> grid;
    for (int k = 0; k <= 20; ++k) grid.push_back(0.37 * k);
    const auto r = relaxation_experiment(ctx, mx, grid, 2);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        double expect = 0.0;
        for (double h : fields) expect += std::cos(2.0 * h * grid[k]);
        CHECK(r.value[k] == doctest::Approx(expect).epsilon(1e-10));
    }
    CHECK(r.infinite_average == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r.to_csv({{"n", "5"}}).find("t,") != std::string::npos);

    // z magnetization of each cell is conserved
    const Observable mz = magnetization(n, {0, 1}, 'z');
    const auto rz = relaxation_experiment(ctx, mz, grid);
    for (double x : rz.value) CHECK(x == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_THROWS(relaxation_experiment(ctx, magnetization(3, {0}, 'z'), grid));
}
