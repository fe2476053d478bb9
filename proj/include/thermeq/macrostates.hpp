#pragma once

#include "thermeq/register.hpp"
#include "thermeq/spectral.hpp"
#include "thermeq/states.hpp"
#include "thermeq/subspace.hpp"
#include "thermeq/types.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace thermeq {

struct CoarseGrainSpec {
    double resolution = 1.0;
};

/// Nearest multiple of the resolution, ties (within 1e-9 of a half step)
/// going to the even multiple.
double coarse_grain(double value, const CoarseGrainSpec& spec);

/// One macro observable. Diagonal observables keep only their diagonal so
/// 12-site families do not allocate d x d matrices.
class MacroObservable {
  public:
    MacroObservable(std::string label, HermitianOperator op, std::optional<SiteSet> support = {});
    MacroObservable(std::string label, RVector diagonal, std::optional<SiteSet> support = {});

    const std::string& label() const { return label_; }
    const std::optional<SiteSet>& support() const { return support_; }
    std::size_t dim() const;
    bool is_diagonal() const { return diag_.has_value(); }
    const RVector& diagonal() const { return *diag_; }
    /// Dense matrix (materialized for diagonal observables).
    CMatrix dense() const;
    /// M x for a block of column vectors.
    CMatrix apply(const CMatrix& x) const;

  private:
    std::string label_;
    std::optional<RVector> diag_;
    std::optional<CMatrix> op_;
    std::optional<SiteSet> support_;
};

class MacroObservableFamily {
  public:
    explicit MacroObservableFamily(std::vector<MacroObservable> observables,
                                   double commutator_tolerance = 1e-10);

    const std::vector<MacroObservable>& observables() const { return obs_; }
    std::size_t size() const { return obs_.size(); }
    std::size_t dim() const { return obs_.front().dim(); }
    double commutator_tolerance() const { return tol_; }
    bool all_diagonal() const;

  private:
    std::vector<MacroObservable> obs_;
    double tol_;
};

enum class Axis { z, x };

Axis parse_axis(const std::string& s);
std::string to_string(Axis a);

/// Raw (not coarse-grained) sum of sigma^axis over `cell`, embedded.
CMatrix cell_magnetization_operator(const SpinRegister& reg, const SiteSet& cell, Axis axis);

/// One coarse-grained magnetization per register cell.
MacroObservableFamily build_cell_magnetization(const SpinRegister& reg, Axis axis, const CoarseGrainSpec& spec);
/// Per-cell axes; all entries must agree (a mixed family would not commute).
MacroObservableFamily build_cell_magnetization(const SpinRegister& reg, const std::vector<Axis>& axes,
                                               const CoarseGrainSpec& spec);

/// Eigenvalue indices with e - delta_e < E <= e.
std::vector<Eigen::Index> shell_indices(const SpectralDecomposition& spec, double e, double delta_e);
/// Span of those eigenvectors; throws when the window is empty.
Subspace energy_shell(const SpectralDecomposition& spec, double e, double delta_e);

struct Sector {
    std::vector<double> nu;
    Subspace subspace;
};

struct EquilibriumMacrostate {
    std::size_t index = 0;
    double epsilon = 0.0;
    bool dominant = false;
};

class MacroDecomposition {
  public:
    MacroDecomposition(std::vector<std::string> labels, std::vector<Sector> sectors, std::size_t total_rank);

    const std::vector<std::string>& labels() const { return labels_; }
    const std::vector<Sector>& sectors() const { return sectors_; }
    std::size_t size() const { return sectors_.size(); }
    std::size_t total_rank() const { return total_rank_; }
    std::size_t ambient() const { return sectors_.front().subspace.ambient(); }

    MacroDecomposition with_equilibrium(const EquilibriumMacrostate& eq) const;
    const std::optional<EquilibriumMacrostate>& equilibrium() const { return eq_; }
    /// Throws if no equilibrium sector was designated.
    const Sector& eq_sector() const;
    const Subspace& eq_subspace() const { return eq_sector().subspace; }
    double epsilon() const;

  private:
    std::vector<std::string> labels_;
    std::vector<Sector> sectors_;
    std::size_t total_rank_;
    std::optional<EquilibriumMacrostate> eq_;
};

/// Joint eigenspaces of the family within `within` (whole space if absent).
MacroDecomposition joint_decomposition(const MacroObservableFamily& family,
                                       const std::optional<Subspace>& within = std::nullopt);

class EquilibriumTieError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kDefaultDominanceThreshold = 0.1;

/// Sector with the largest tr(rho_ref P_nu); rho_ref defaults to the
/// micro-canonical state, i.e. the largest sector.
EquilibriumMacrostate find_equilibrium_macrostate(const MacroDecomposition& decomp,
                                                  const std::optional<DensityMatrix>& rho_ref = std::nullopt,
                                                  double dominance_threshold = kDefaultDominanceThreshold);

}  // namespace thermeq
