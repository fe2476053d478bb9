#pragma once

#include "thermeq/rng.hpp"
#include "thermeq/spectral.hpp"
#include "thermeq/states.hpp"
#include "thermeq/subspace.hpp"
#include "thermeq/types.hpp"
#include "thermeq/unitary.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace thermeq {

/// Haar-uniform unit vector of the subspace: complex Gaussian frame
/// coefficients, normalized. Sample `index` uses Rng(seed, index).
PureState sample_uniform(const Subspace& s, std::uint64_t seed, std::uint64_t index = 0);
CVector sample_sphere(Eigen::Index k, Rng& rng);

// ---------------------------------------------------------------- moments

using RMatrix = Eigen::MatrixXd;

struct MomentReport {
    std::size_t d = 0;
    std::size_t n_samples = 0;
    CVector first;    // E c_a
    CMatrix second;   // E conj(c_a) c_b
    CMatrix third;    // E |c_a|^2 c_b
    RMatrix fourth;   // E |c_a|^2 |c_b|^2
    // largest |empirical - exact| / SE over entries (real and imaginary
    // parts separately); exact values 0, delta_ab/d, 0, (1+delta_ab)/(d(d+1))
    double max_z_first = 0.0;
    double max_z_second = 0.0;
    double max_z_third = 0.0;
    double max_z_fourth = 0.0;
    double max_z() const;
};

/// Moments of the frame coefficients of sample_uniform(s, seed, i).
MomentReport moment_check(const Subspace& s, std::size_t n_samples, std::uint64_t seed, int jobs = 1);
/// Same statistics for an arbitrary list of unit coefficient vectors.
MomentReport moment_report(const std::vector<CVector>& coeffs);

struct VarianceBoundReport {
    std::size_t n_samples = 0;
    double mean = 0.0;
    double mean_se = 0.0;
    double exact_mean = 0.0;  // tr(A rho_R)
    double variance = 0.0;
    double variance_se = 0.0;
    double exact_variance = 0.0;  // of <psi|A|psi> under the uniform measure
    double bound = 0.0;           // V_A(rho_R) / (d_R + 1)
    bool mean_ok = false;         // within 5 SE
    bool variance_ok = false;     // variance <= bound + 3 SE
    // Chebyshev count, when cheb_eps > 0
    double cheb_eps = 0.0;
    double cheb_fraction = 0.0;
    double cheb_bound = 0.0;
    double cheb_slack = 0.0;
    bool cheb_ok = true;
};

VarianceBoundReport variance_bound_check(const CMatrix& a, const Subspace& s, std::size_t n_samples,
                                         std::uint64_t seed, double cheb_eps = 0.0, int jobs = 1);

// ---------------------------------------------------------------- bipartitions

/// H = H_1 (x) H_2 with the canonical split index = a + d1 * b, optionally
/// conjugated by a unitary U: the tensor coordinates of psi are U^dagger psi.
/// A site-based bipartition instead keeps an arbitrary site set as factor 1.
class Bipartition {
  public:
    static Bipartition split(std::size_t ambient, std::size_t d1);
    static Bipartition sites(int n_sites, SiteSet keep);
    Bipartition rotated(HouseholderRotation u) const;

    std::size_t d1() const { return d1_; }
    std::size_t d2() const { return d2_; }
    std::size_t ambient() const { return d1_ * d2_; }
    bool is_rotated() const { return rotation_.has_value(); }
    bool is_site_based() const { return sites_.has_value(); }
    const std::optional<HouseholderRotation>& rotation() const { return rotation_; }

    /// U^dagger psi (identity when unrotated).
    CVector factor_coordinates(const CVector& psi) const;
    /// Reduced state on the first factor.
    CMatrix reduce(const CVector& psi) const;
    /// tr_2(P / rank) for a subspace.
    CMatrix reduce_average(const Subspace& s) const;

  private:
    Bipartition(std::size_t d1, std::size_t d2) : d1_(d1), d2_(d2) {}
    std::size_t d1_;
    std::size_t d2_;
    std::optional<HouseholderRotation> rotation_;
    std::optional<SiteSet> sites_;
    int n_sites_ = 0;
};

/// Site split when d1 and ambient are powers of two and no seed is given;
/// otherwise the canonical split, Haar rotated when a seed is given.
Bipartition abstract_bipartition(std::size_t ambient, std::size_t d1,
                                 std::optional<std::uint64_t> rotation_seed = std::nullopt);

// ---------------------------------------------------------------- concentration

struct PswReport {
    std::size_t n_samples = 0;
    std::size_t d_r = 0;
    std::size_t d1 = 0;
    double eps_tilde = 0.0;
    double threshold = 0.0;  // eps_tilde + d1 / sqrt(d_R)
    double bound = 0.0;      // 4 exp(-d_R eps^2 / (18 pi^3))
    std::size_t violations = 0;
    double rate = 0.0;
    double slack = 0.0;  // 3 binomial SE at min(bound, 1)
    bool holds = false;
    double mean_distance = 0.0;
    double max_distance = 0.0;
};

double psw_bound(std::size_t d_r, double eps_tilde);

PswReport psw_check(const Subspace& shell, const Bipartition& bp, double eps_tilde, std::size_t n_samples,
                    std::uint64_t seed, int jobs = 1);

struct MultiRegionReport {
    std::size_t n_samples = 0;
    double epsilon = 0.0;
    std::size_t r = 0;
    bool dimension_condition = false;  // every d_i < eps sqrt(dmc) / 2
    double success_fraction = 0.0;
    double bound = 0.0;  // 1 - 4 r exp(-dmc eps^2 / (72 pi^3))
    double slack = 0.0;
    bool holds = false;
};

/// Joint success over several site regions, with the union-bound estimate.
MultiRegionReport multi_region_check(const Subspace& shell, int n_sites, const std::vector<SiteSet>& regions,
                                     double epsilon, std::size_t n_samples, std::uint64_t seed, int jobs = 1);

// ---------------------------------------------------------------- GAP

enum class GapMethod { importance_resampling, exact_mixture };

/// Sampler for GAP(rho). Importance resampling draws `batch` Gaussian
/// vectors of covariance rho and keeps one with probability proportional to
/// its squared norm; the exact mixture draws the size-biased component
/// directly (pick k with probability p_k, |g_k|^2 ~ Gamma(2, 1)).
class GapSampler {
  public:
    explicit GapSampler(const DensityMatrix& rho, GapMethod method = GapMethod::importance_resampling,
                        std::size_t batch = 64);
    GapSampler(SpectralDecomposition basis, const RVector& p, GapMethod method = GapMethod::importance_resampling,
               std::size_t batch = 64);

    PureState sample(std::uint64_t seed, std::uint64_t index = 0) const;
    std::size_t rank() const { return static_cast<std::size_t>(support_.size()); }
    std::size_t dim() const { return basis_.dim(); }

  private:
    void init(const RVector& p);
    CVector draw_coefficients(Rng& rng) const;
    SpectralDecomposition basis_;
    std::vector<Eigen::Index> support_;  // eigen indices with p > 0
    RVector sqrt_p_;
    RVector cum_p_;
    GapMethod method_;
    std::size_t batch_;
};

PureState sample_gap(const DensityMatrix& rho, std::uint64_t seed);

struct DistanceStats {
    std::size_t n = 0;
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    double mean = 0.0;
    double max = 0.0;
};

DistanceStats summarize(std::vector<double> values);

struct GapProbeReport {
    double beta = 0.0;
    std::vector<SiteSet> regions;
    std::vector<DistanceStats> per_region;
    DistanceStats worst;  // of max over regions per sample
};

/// sum_j p_j tr_{complement}|v_j><v_j| for eigenvectors of spec (fast for
/// permutation decompositions).
CMatrix reduced_spectral_mixture(const SpectralDecomposition& spec, const RVector& p, int n_sites,
                                 const SiteSet& keep);

/// Distances of GAP(rho_beta) samples to the Gibbs marginals. Report only.
GapProbeReport gap_mite_conjecture_probe(const SpectralDecomposition& spec, double beta,
                                         const std::vector<SiteSet>& regions, std::size_t n_samples,
                                         std::uint64_t seed, int jobs = 1,
                                         GapMethod method = GapMethod::importance_resampling);

// ---------------------------------------------------------------- abstract subsystems

struct MiteMostReport {
    std::size_t n_subsystems = 0;
    std::size_t passes = 0;
    double fraction = 0.0;
    DistanceStats distances;
};

/// Fraction of Haar-rotated bipartitions (factor dimension drawn uniformly
/// among divisors of dim in [2, d0]) on which psi's factor-1 state is within
/// epsilon of I/d1. The ambient space plays the role of the shell.
MiteMostReport mite_most_estimate(const CVector& psi, std::size_t d0, std::size_t n_subsystems, double epsilon,
                                  std::uint64_t seed, int jobs = 1);

/// Bipartition under which psi is exactly a product state.
Bipartition adversarial_subsystem(const CVector& psi, std::size_t d1, std::uint64_t seed);

// ---------------------------------------------------------------- ensemble equivalence

/// beta with sum_j p_beta(j) E_j = target, by bracketed bisection.
double solve_beta(const RVector& energies, double target, double tol = 1e-12);

struct EnsembleRow {
    SiteSet region;
    int diameter = 0;
    double distance = 0.0;
};

struct EnsembleReport {
    double beta = 0.0;
    double shell_mean_energy = 0.0;
    double gibbs_mean_energy = 0.0;
    std::vector<EnsembleRow> rows;
    std::vector<std::pair<int, double>> max_by_diameter;
    int ell0 = 0;  // largest D with every region of diameter <= D below epsilon
};

EnsembleReport ensemble_equivalence_sweep(const SpectralDecomposition& spec, const std::vector<Eigen::Index>& shell_idx,
                                          const std::vector<SiteSet>& regions, double epsilon,
                                          double beta_tol = 1e-12);

}  // namespace thermeq
