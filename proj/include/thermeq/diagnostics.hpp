#pragma once

#include "thermeq/macrostates.hpp"
#include "thermeq/spectral.hpp"
#include "thermeq/states.hpp"
#include "thermeq/subspace.hpp"
#include "thermeq/types.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace thermeq {

// ---------------------------------------------------------------- MATE

struct MateVerdict {
    double weight = 0.0;
    double delta = 0.0;
    bool in_mate = false;
};

MateVerdict mate_verdict(double weight, double delta);
MateVerdict mate_test(const PureState& psi, const Subspace& p_eq, double delta);
MateVerdict mate_test(const DensityMatrix& rho, const Subspace& p_eq, double delta);

/// Eigenvalue law for random mixed states: nonnegative weights summing to 1.
struct SpectrumLaw {
    std::string name;
    RVector p;

    static SpectrumLaw fixed(RVector p);
    static SpectrumLaw flat(Eigen::Index rank);
    static SpectrumLaw pure() { return flat(1); }
};

struct MixedSweepResult {
    std::size_t n_samples = 0;
    double fraction = 0.0;
    double bound = 0.0;  // 1 - eps/delta
    double slack = 0.0;  // 3 binomial standard errors at the bound
    bool holds = false;  // fraction >= bound - slack
    double min_weight = 0.0;
    double max_weight = 0.0;
};

/// rho = sum_j p_j |v_j><v_j| with v the first rank columns of a Haar
/// unitary on the shell; sample i uses Rng(seed, i).
MixedSweepResult mixed_state_mate_sweep(const Subspace& shell, const MacroDecomposition& decomp,
                                        const SpectrumLaw& law, double delta, std::size_t n_samples,
                                        std::uint64_t seed, int jobs = 1);

/// Fraction of columns b of `basis` (ambient coordinates) with <b|P_eq|b> > 1 - delta.
double basis_mate_fraction(const CMatrix& basis, const Subspace& p_eq, double delta);

// ---------------------------------------------------------------- MITE

struct RegionDistance {
    SiteSet region;
    double distance = 0.0;
};

struct MiteVerdict {
    std::vector<RegionDistance> per_region;
    double epsilon = 0.0;
    bool in_mite = false;
    int ell0 = 0;  // largest region diameter tested
    double worst() const;
};

/// Reduced micro-canonical states for a fixed list of regions, computed once
/// and reused for every tested state.
class MiteReference {
  public:
    MiteReference(const Subspace& shell, int n_sites, std::vector<SiteSet> regions);

    const std::vector<SiteSet>& regions() const { return regions_; }
    const std::vector<CMatrix>& reduced() const { return ref_; }
    int n_sites() const { return n_sites_; }

    MiteVerdict test(const CVector& psi, double epsilon) const;
    MiteVerdict test(const DensityMatrix& rho, double epsilon) const;

  private:
    MiteVerdict verdict(const std::vector<CMatrix>& reduced, double epsilon) const;
    int n_sites_;
    std::vector<SiteSet> regions_;
    std::vector<CMatrix> ref_;
};

MiteVerdict mite_test(const PureState& psi, const Subspace& shell, const std::vector<SiteSet>& regions, double epsilon);
MiteVerdict mite_test(const DensityMatrix& rho, const Subspace& shell, const std::vector<SiteSet>& regions,
                      double epsilon);

struct MiteMateReport {
    std::size_t n_samples = 0;
    std::size_t n_mite = 0;
    std::size_t n_mate = 0;
    std::size_t n_both = 0;
    std::size_t mate_not_mite = 0;
    std::size_t violations = 0;  // in MITE but not in MATE
    double max_worst_distance = 0.0;
    double min_mate_weight = 1.0;
};

/// Counts MITE-and-not-MATE states. Every observable of `family` must carry
/// a support contained in one of the regions.
MiteMateReport mite_implies_mate_check(const std::vector<PureState>& samples, const MacroDecomposition& decomp,
                                       const MacroObservableFamily& family, const MiteReference& mite,
                                       double epsilon, double delta);

// ---------------------------------------------------------------- TMATE

struct TmateObservable {
    std::string label;
    CMatrix op;
    double delta_m = 0.0;
};

struct TmateEntry {
    std::string label;
    double thermal_value = 0.0;  // V_j = tr(rho_mc M_j)
    double probability = 0.0;    // tr(rho P_j)
    std::size_t window_rank = 0;
};

struct TmateVerdict {
    std::vector<TmateEntry> entries;
    double delta = 0.0;
    bool in_tmate = false;
};

TmateVerdict tmate_test(const DensityMatrix& rho, const std::vector<TmateObservable>& obs,
                        const DensityMatrix& rho_mc, double delta);
TmateVerdict tmate_test(const PureState& psi, const std::vector<TmateObservable>& obs,
                        const DensityMatrix& rho_mc, double delta);

// ---------------------------------------------------------------- normality

struct NormalityVerdict {
    std::vector<double> ratios;
    double band_lo = 0.99;
    double band_hi = 1.01;
    bool normal = false;
};

NormalityVerdict normality_test(const PureState& psi, const MacroDecomposition& decomp,
                                std::pair<double, double> band = {0.99, 1.01});

// ---------------------------------------------------------------- relative to a set of observables

/// Total variation between the eigenvalue distributions that rho and sigma
/// induce on `a` (eigenvalues clustered at 1e-8).
double induced_total_variation(const CMatrix& rho, const CMatrix& sigma, const CMatrix& a);

struct RelativeEquilibriumVerdict {
    std::vector<double> tv;
    double tolerance = 0.0;
    bool in_equilibrium = false;
};

RelativeEquilibriumVerdict relative_equilibrium_test(const DensityMatrix& rho, const std::vector<CMatrix>& observables,
                                                     const DensityMatrix& rho_mc, double tv_tolerance);

/// Maximum of induced_total_variation over all observables on the region:
/// half the trace distance of the two reduced states.
double region_max_total_variation(const CMatrix& rho_s, const CMatrix& sigma_s);

// ---------------------------------------------------------------- ETH scans

enum class Alignment { in_eq, orthogonal, mixed };
std::string to_string(Alignment a);
Alignment classify_alignment(double weight, double delta);

struct EthRow {
    Eigen::Index index = 0;
    double energy = 0.0;
    double mate_weight = 0.0;
    double worst_mite_distance = 0.0;
    Alignment alignment = Alignment::mixed;
    bool in_mate = false;
    bool in_mite = false;
};

struct EthScanReport {
    std::vector<EthRow> rows;
    double epsilon_mate = 0.0;  // from the decomposition
    double epsilon_mite = 0.0;
    double delta = 0.0;
    double mate_fraction = 0.0;
    double mite_fraction = 0.0;
    double in_eq_fraction = 0.0;
    double orthogonal_fraction = 0.0;
    double mixed_fraction = 0.0;
    bool mate_eth = false;
    bool mite_eth = false;
    double basis_count_bound = 0.0;  // 1 - eps/delta
    bool basis_count_holds = false;

    /// index,E,mate_weight,worst_mite_distance,alignment,in_mate,in_mite
    std::string to_csv() const;
};

/// Scans the eigenvectors `shell_idx` of `spec`. The decomposition must live
/// in the span of those eigenvectors and carry an equilibrium sector. With
/// no regions the MITE columns are 0 and every row counts as in MITE.
EthScanReport eth_scan(const SpectralDecomposition& spec, const std::vector<Eigen::Index>& shell_idx,
                       const MacroDecomposition& decomp, const std::vector<SiteSet>& regions, double epsilon,
                       double delta, int jobs = 1);

struct OffdiagReport {
    double max_offdiag = 0.0;
    std::size_t n_pairs = 0;
    std::vector<double> bin_edges;
    std::vector<std::size_t> counts;
};

/// |<a|A|b>| for a != b among the eigenvectors `shell_idx`.
OffdiagReport offdiag_eth_scan(const SpectralDecomposition& spec, const CMatrix& a,
                               const std::vector<Eigen::Index>& shell_idx, std::size_t n_bins = 20);

}  // namespace thermeq
