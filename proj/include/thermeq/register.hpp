#pragma once

#include "thermeq/types.hpp"

#include <cstddef>
#include <vector>

namespace thermeq {

// Bit convention used everywhere: site i <-> bit i of the basis index,
// bit 0 least significant, bit value 0 = spin up (sigma_z = +1).

class SpinRegister {
  public:
    static constexpr int kDefaultMaxSites = 16;

    /// `cells` must be disjoint and cover every site; empty means one cell
    /// holding the whole chain.
    explicit SpinRegister(int n_sites, std::vector<SiteSet> cells = {},
                          int max_sites = kDefaultMaxSites);

    /// Consecutive cells of `cell_size` sites; n_sites must be a multiple.
    static SpinRegister with_uniform_cells(int n_sites, int cell_size,
                                           int max_sites = kDefaultMaxSites);

    int n_sites() const { return n_sites_; }
    std::size_t dim() const { return pow2(n_sites_); }
    const std::vector<SiteSet>& cells() const { return cells_; }
    int n_cells() const { return static_cast<int>(cells_.size()); }

    /// Throws unless `sites` is nonempty, in range and duplicate free.
    void check_sites(const SiteSet& sites) const;

  private:
    int n_sites_;
    std::vector<SiteSet> cells_;
};

/// Bit mask with the bits of `sites` set.
std::size_t site_mask(const SiteSet& sites);

/// Offsets for the 2^|sites| local patterns: entry a scatters bit t of a
/// onto bit sites[t].
std::vector<std::size_t> scatter_table(const SiteSet& sites);

/// Complement of `sites` within [0, n_sites), ascending.
SiteSet complement(const SiteSet& sites, int n_sites);

/// max - min + 1 over the site labels (chain distance), 0 for empty sets.
int diameter(const SiteSet& sites);

}  // namespace thermeq
