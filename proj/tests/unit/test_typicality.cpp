#include <doctest.h>

#include "oracles.hpp"

#include "thermeq/models.hpp"
#include "thermeq/partial_trace.hpp"
#include "thermeq/typicality.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

using namespace thermeq;

namespace {

std::vector<Eigen::Index> range(Eigen::Index lo, Eigen::Index hi) {
    std::vector<Eigen::Index> v(static_cast<std::size_t>(hi - lo));
    std::iota(v.begin(), v.end(), lo);
    return v;
}

}  // namespace

TEST_CASE("uniform samples live in the subspace") {
    const Subspace s(64, {3, 9, 17, 40});
    const PureState a = sample_uniform(s, 11, 0);
    CHECK(a.amplitudes().norm() == doctest::Approx(1.0));
    CHECK(s.weight(a) == doctest::Approx(1.0));
    CHECK(a.amplitudes() == sample_uniform(s, 11, 0).amplitudes());
    CHECK(a.amplitudes() != sample_uniform(s, 11, 1).amplitudes());
    CHECK(a.amplitudes() != sample_uniform(s, 12, 0).amplitudes());
    Rng rng(1);
    CHECK_THROWS(sample_sphere(0, rng));
}

TEST_CASE("moments of random unit vectors") {
    // d = 1: a uniform phase
    const auto one = moment_check(Subspace::full(1), 20000, 5);
    CHECK(one.max_z() < 5.0);
    CHECK(one.fourth(0, 0) == doctest::Approx(1.0));

    const auto r = moment_check(Subspace::full(8), 20000, 6);
    CHECK(r.d == 8);
    CHECK(r.max_z() < 5.0);
    CHECK(r.second.trace().real() == doctest::Approx(1.0));
    CHECK(r.fourth.sum() == doctest::Approx(1.0));
    CHECK(r.fourth(0, 0) == doctest::Approx(2.0 / 72.0).epsilon(0.05));

    CHECK_THROWS(moment_report({}));
    CHECK_THROWS(moment_report({CVector::Ones(2), CVector::Ones(3)}));
}

TEST_CASE("variance bound") {
    const Subspace s(32, range(0, 16));
    const auto id = variance_bound_check(CMatrix::Identity(32, 32), s, 100, 1);
    CHECK(id.exact_mean == doctest::Approx(1.0));
    CHECK(id.bound == doctest::Approx(0.0));
    CHECK(id.variance == doctest::Approx(0.0).epsilon(1e-20));
    CHECK(id.mean_ok);
    CHECK(id.variance_ok);

    // rank-one projector inside the subspace: Var |c_1|^2 = (k - 1) / (k^2 (k + 1))
    CMatrix p = CMatrix::Zero(32, 32);
    p(0, 0) = 1.0;
    const auto r = variance_bound_check(p, s, 20000, 2, 0.1);
    CHECK(r.exact_mean == doctest::Approx(1.0 / 16.0));
    CHECK(r.exact_variance == doctest::Approx(15.0 / (256.0 * 17.0)));
    CHECK(r.bound == doctest::Approx(r.exact_variance));
    CHECK(r.mean_ok);
    CHECK(r.variance_ok);
    CHECK(r.cheb_ok);
    CHECK(std::abs(r.variance - r.exact_variance) <= 5.0 * r.variance_se);

    // an operator reaching outside the subspace: the bound exceeds the exact variance
    const CMatrix a = oracle::random_hermitian(32, 4);
    const auto out = variance_bound_check(a, s, 2000, 3);
    CHECK(out.exact_variance <= out.bound + 1e-15);

    CHECK_THROWS(variance_bound_check(CMatrix::Identity(8, 8), s, 10, 1));
    CHECK_THROWS(variance_bound_check(p, s, 1, 1));
}

TEST_CASE("bipartitions") {
    const auto sites = abstract_bipartition(16, 4);
    CHECK(sites.is_site_based());
    CHECK(sites.d1() == 4);
    const auto plain = abstract_bipartition(12, 3);
    CHECK_FALSE(plain.is_site_based());
    CHECK_FALSE(plain.is_rotated());
    CHECK(plain.d2() == 4);
    CHECK(abstract_bipartition(16, 4, 7).is_rotated());
    CHECK_THROWS(abstract_bipartition(10, 3));
    CHECK_THROWS(Bipartition::split(10, 0));
    CHECK_THROWS(sites.rotated(HouseholderRotation(16)));

    // split index a + d1 b
    const CVector phi = oracle::random_unit(3, 1), chi = oracle::random_unit(4, 2);
    CVector prod(12);
    for (Eigen::Index b = 0; b < 4; ++b)
        for (Eigen::Index a = 0; a < 3; ++a) prod(a + 3 * b) = phi(a) * chi(b);
    CHECK(max_abs(plain.reduce(prod) - phi * phi.adjoint()) <= 1e-14);
    CHECK(max_abs(plain.reduce_average(Subspace::full(12)) - CMatrix::Identity(3, 3) / 3.0) <= 1e-14);

    // site-based reduction agrees with the oracle
    const CVector psi = oracle::random_unit(16, 3);
    CHECK(max_abs(sites.reduce(psi) - oracle::partial_trace(psi * psi.adjoint(), 4, {0, 1})) <= 1e-14);
    // rotated reduction sees U^dagger psi
    const auto rot = abstract_bipartition(16, 4, 7);
    const CVector coords = rot.factor_coordinates(psi);
    CHECK(coords.norm() == doctest::Approx(1.0));
    CHECK(max_abs(rot.reduce(psi) - Bipartition::split(16, 4).reduce(coords)) <= 1e-14);
}

TEST_CASE("concentration bound") {
    const double pi3 = std::pow(std::numbers::pi, 3);
    CHECK(psw_bound(16384, 0.3) == doctest::Approx(4.0 * std::exp(-16384.0 * 0.09 / (18.0 * pi3))));
    CHECK(psw_bound(16384, 0.3) == doctest::Approx(0.2848).epsilon(1e-3));

    // trace distances never exceed 2
    const auto r = psw_check(Subspace::full(256), abstract_bipartition(256, 2), 2.0, 200, 4);
    CHECK(r.violations == 0);
    CHECK(r.holds);
    CHECK(r.threshold == doctest::Approx(2.0 + 2.0 / 16.0));
    CHECK(r.max_distance <= 2.0);
    const auto t = psw_check(Subspace::full(256), abstract_bipartition(256, 2), 0.3, 200, 4);
    CHECK(t.holds);
    CHECK(t.mean_distance == doctest::Approx(r.mean_distance));

    CHECK_THROWS(psw_check(Subspace::full(256), abstract_bipartition(128, 2), 0.3, 10, 1));
    CHECK_THROWS(psw_check(Subspace::full(256), abstract_bipartition(256, 2), 0.0, 10, 1));
    CHECK_THROWS(psw_check(Subspace::full(256), abstract_bipartition(256, 2), 0.3, 0, 1));

    const auto m = multi_region_check(Subspace::full(1024), 10, {{0}, {5}}, 0.5, 50, 2);
    CHECK(m.dimension_condition);
    CHECK(m.holds);
    CHECK_THROWS(multi_region_check(Subspace::full(1024), 10, {}, 0.5, 50, 2));
}

TEST_CASE("GAP sampling") {
    // a pure state gives back itself up to a phase
    const CVector psi = oracle::random_unit(8, 4);
    for (auto method : {GapMethod::importance_resampling, GapMethod::exact_mixture}) {
        const GapSampler g(DensityMatrix::from_pure(psi), method);
        CHECK(g.rank() == 1);
        const PureState s = g.sample(3, 0);
        CHECK(std::abs(psi.dot(s.amplitudes())) == doctest::Approx(1.0));
    }
    CHECK_THROWS(GapSampler(eig_hermitian(CMatrix::Identity(2, 2)), RVector::Zero(2)));
    CHECK_THROWS(GapSampler(eig_hermitian(CMatrix::Identity(2, 2)), RVector::Ones(3)));
    CHECK_THROWS(GapSampler(DensityMatrix::maximally_mixed(2), GapMethod::exact_mixture, 0));

    // E |psi><psi| = rho
    const DensityMatrix rho(oracle::random_density(4, 9));
    for (auto method : {GapMethod::importance_resampling, GapMethod::exact_mixture}) {
        const GapSampler g(rho, method, 64);
        CMatrix mean = CMatrix::Zero(4, 4);
        const int n = 4000;
        for (int i = 0; i < n; ++i) {
            const CVector v = g.sample(5, static_cast<std::uint64_t>(i)).amplitudes();
            mean += v * v.adjoint() / double(n);
        }
        CHECK(0.5 * oracle::trace_norm(mean - rho.matrix()) < 0.05);
    }
}

TEST_CASE("summaries and spectral mixtures") {
    const auto s = summarize({5.0, 1.0, 3.0, 2.0, 4.0});
    CHECK(s.n == 5);
    CHECK(s.median == 3.0);
    CHECK(s.mean == 3.0);
    CHECK(s.max == 5.0);
    CHECK(s.q1 <= s.median);
    CHECK(s.q3 >= s.median);

    const auto h = build_h5(SpinRegister(4), ModelParams{1.0, 0.5, {0.1, 0.2, 0.3, 0.4}, false});
    const auto spec = eig_hermitian(h);
    const RVector flat = RVector::Constant(16, 1.0 / 16.0);
    CHECK(max_abs(reduced_spectral_mixture(spec, flat, 4, {1, 2}) - CMatrix::Identity(4, 4) / 4.0) <= 1e-12);
    const RVector p = gibbs_weights(spec.eigenvalues(), 0.8);
    const CMatrix full = build_gibbs(h, 0.8).matrix();
    CHECK(max_abs(reduced_spectral_mixture(spec, p, 4, {0, 3}) - oracle::partial_trace(full, 4, {0, 3})) <= 1e-12);
}

TEST_CASE("abstract subsystems") {
    const CVector psi = oracle::random_unit(256, 8);
    const auto trivial = mite_most_estimate(psi, 1, 10, 0.1, 1);
    CHECK(trivial.fraction == 1.0);
    CHECK(trivial.passes == 10);

    const auto most = mite_most_estimate(psi, 4, 50, 0.5, 2);
    CHECK(most.fraction >= 0.9);
    CHECK(most.distances.max < 1.0);
    CHECK_THROWS(mite_most_estimate(CVector::Ones(4), 2, 10, 0.1, 1));
    CHECK_THROWS(mite_most_estimate(psi, 2, 10, 0.0, 1));

    // the chosen subsystem sees a pure state
    for (std::size_t d1 : {2u, 4u, 16u}) {
        const Bipartition bp = adversarial_subsystem(psi, d1, 3);
        const CMatrix r = bp.reduce(psi);
        CHECK((r * r).trace().real() == doctest::Approx(1.0));
        const auto k = static_cast<Eigen::Index>(d1);
        CHECK(trace_norm_distance(r, CMatrix::Identity(k, k) / double(d1)) ==
              doctest::Approx(2.0 * (1.0 - 1.0 / double(d1))));
    }
    CHECK_THROWS(adversarial_subsystem(psi, 1, 1));
    CHECK_THROWS(adversarial_subsystem(psi, 256, 1));
    CHECK_THROWS(adversarial_subsystem(psi, 3, 1));
}

TEST_CASE("solve_beta") {
    RVector e(2);
    e << 0.0, 1.0;
    CHECK(solve_beta(e, 0.5) == 0.0);
    CHECK(solve_beta(e, 1.0 / (1.0 + std::numbers::e)) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(solve_beta(e, 1.0 / (1.0 + std::exp(-2.0))) == doctest::Approx(-2.0).epsilon(1e-9));
    CHECK_THROWS(solve_beta(e, 1.0));
    CHECK_THROWS(solve_beta(e, -0.1));
    CHECK_THROWS(solve_beta(RVector(), 0.0));
}

TEST_CASE("ensemble equivalence") {
    const auto spec = eig_hermitian(build_h5(SpinRegister(6), ModelParams{1.0, 0.6, sample_fields(6, 0.5, 3).fields, false}));
    const auto all = ensemble_equivalence_sweep(spec, range(0, 64), {{0}, {0, 1}}, 0.1);
    CHECK(all.beta == 0.0);
    for (const auto& r : all.rows) CHECK(r.distance <= 1e-12);
    CHECK(all.ell0 == 2);

    const auto shell = ensemble_equivalence_sweep(spec, range(16, 28), {{0}, {2}, {0, 1}, {0, 1, 2}}, 0.5);
    CHECK(shell.beta > 0.0);
    CHECK(shell.gibbs_mean_energy == doctest::Approx(shell.shell_mean_energy).epsilon(1e-8));
    CHECK(shell.rows.size() == 4);
    CHECK(shell.max_by_diameter.size() == 3);
    CHECK_THROWS(ensemble_equivalence_sweep(spec, {}, {{0}}, 0.1));
}
