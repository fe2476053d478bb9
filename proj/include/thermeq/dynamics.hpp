#pragma once

#include "thermeq/spectral.hpp"
#include "thermeq/states.hpp"
#include "thermeq/subspace.hpp"
#include "thermeq/types.hpp"

#include <array>
#include <string>
#include <vector>

namespace thermeq {

struct LocalTerm {
    SiteSet sites;
    CMatrix local;  // 2^|sites| square, local bit t <-> sites[t] sorted ascending
};

/// Observable given densely or as a sum of few-site terms. The local form
/// evaluates expectations through reduced states, O(d) per term, so
/// 12-site magnetizations never materialize a d x d matrix.
class Observable {
  public:
    static Observable dense(CMatrix a);
    static Observable local_sum(int n_sites, std::vector<LocalTerm> terms);

    std::size_t dim() const { return dim_; }
    bool is_dense() const { return dense_.size() > 0; }
    const CMatrix& matrix() const { return dense_; }
    const std::vector<LocalTerm>& terms() const { return terms_; }

    /// <v|A|v> for a possibly unnormalized v.
    double expectation(const CVector& v) const;
    CMatrix to_dense() const;

  private:
    std::size_t dim_ = 0;
    int n_sites_ = 0;
    CMatrix dense_;
    std::vector<LocalTerm> terms_;
};

/// sum_{i in sites} sigma^axis_i as a local sum; axis 'x', 'y' or 'z'.
Observable magnetization(int n_sites, const SiteSet& sites, char axis);

/// Spectral data plus initial eigen-coefficients. Eigenvalues closer than
/// rel_tol * (spectral range) are grouped as one degenerate level.
class EvolutionContext {
  public:
    EvolutionContext(SpectralDecomposition spec, const PureState& psi, double rel_tol = 1e-9);

    const SpectralDecomposition& spec() const { return spec_; }
    const CVector& coefficients() const { return c_; }
    /// Group boundaries over eigen indices: group g is [b[g], b[g+1]).
    const std::vector<Eigen::Index>& groups() const { return bounds_; }
    std::size_t n_groups() const { return bounds_.size() - 1; }
    double grouping_tolerance() const { return tol_; }

  private:
    SpectralDecomposition spec_;
    CVector c_;
    std::vector<Eigen::Index> bounds_;
    double tol_;
};

/// Eigen-coefficients e^{-i E t} c.
CVector evolve_coefficients(const EvolutionContext& ctx, double t);
PureState evolve(const EvolutionContext& ctx, double t);

/// sum over degenerate groups of <psi_g|A|psi_g>, psi_g the projection of
/// psi onto group g.
double infinite_time_average(const EvolutionContext& ctx, const Observable& a);
double infinite_time_average(const EvolutionContext& ctx, const CMatrix& a);

/// sum_a |c_a|^2 <a|A|a> (the non-degenerate formula).
double diagonal_ensemble_average(const EvolutionContext& ctx, const CMatrix& a);

/// sum_g P_g A P_g in the computational basis.
CMatrix pinch(const EvolutionContext& ctx, const CMatrix& a);

struct MateEthAverage {
    bool applicable = false;  // every eigenstate in the support of psi is in MATE
    std::size_t n_support = 0;
    std::size_t n_out_of_mate = 0;
    double average = 0.0;  // infinite-time average of <P_eq>
    double bound = 0.0;    // 1 - delta
    bool bound_holds = false;
};

MateEthAverage mate_eth_average_bound(const EvolutionContext& ctx, const Subspace& p_eq, double delta);

struct GapScan {
    std::size_t count = 0;  // ordered quadruples violating non-degenerate gaps
    std::vector<std::array<Eigen::Index, 4>> quadruples;  // first `cap` found
    double tolerance = 0.0;
};

inline constexpr std::size_t kMaxGapScanLevels = 4096;

/// Quadruples (a, b, a', b') with |(E_a - E_b) - (E_a' - E_b')| <= tol other
/// than a = a', b = b' or a = b, a' = b'.
GapScan gap_degeneracy_scan(const RVector& energies, double tol, std::size_t cap = 64);

struct QuadratureResult {
    double t_max = 0.0;
    double dt = 0.0;
    std::size_t steps = 0;
    double mean = 0.0;
    double variance = 0.0;
};

/// Inverse mean level spacing (D - 1) / (E_max - E_min).
double inverse_mean_spacing(const RVector& energies);

/// Trapezoid time average and variance of <psi_t|A|psi_t> over [0, T] with
/// T = t_spacings / mean spacing and step <= 0.1 / max|E - mean E|. The global
/// energy shift is removed first; it does not change any expectation value.
QuadratureResult quadrature_time_average(const EvolutionContext& ctx, const CMatrix& a, double t_spacings);

struct TimeVarianceResult {
    double value = 0.0;
    bool exact = false;  // false: gap resonances found, value is a quadrature estimate
    std::size_t resonances = 0;
    double max_offdiag = 0.0;
    double bound = 0.0;  // max_offdiag^2
    bool bound_holds = false;
};

/// sum_{a != b} |c_a|^2 |A_ab|^2 |c_b|^2 in the eigenbasis; on resonant
/// spectra the value comes from quadrature over `fallback_spacings`.
TimeVarianceResult time_variance(const EvolutionContext& ctx, const CMatrix& a, double gap_rel_tol = 1e-9,
                                 double fallback_spacings = 1e4);

struct RelaxationResult {
    std::vector<double> t;
    std::vector<double> value;
    double infinite_average = 0.0;
    std::string to_csv(const std::vector<std::pair<std::string, std::string>>& meta = {}) const;
};

RelaxationResult relaxation_experiment(const EvolutionContext& ctx, const Observable& a, const std::vector<double>& t_grid,
                                       int jobs = 1);

}  // namespace thermeq
