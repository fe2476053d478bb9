#include "thermeq/register.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace thermeq {

int sites_for_dim(std::size_t dim) {
    if (dim == 0 || (dim & (dim - 1)) != 0)
        throw std::invalid_argument("dimension " + std::to_string(dim) + " is not a power of two");
    int n = 0;
    while ((std::size_t{1} << n) < dim) ++n;
    return n;
}

SpinRegister::SpinRegister(int n_sites, std::vector<SiteSet> cells, int max_sites)
    : n_sites_(n_sites), cells_(std::move(cells)) {
    if (n_sites < 1) throw std::invalid_argument("SpinRegister: n_sites must be positive");
    if (n_sites > max_sites)
        throw std::invalid_argument("SpinRegister: n_sites " + std::to_string(n_sites) +
                                    " exceeds cap " + std::to_string(max_sites));
    if (cells_.empty()) {
        SiteSet all(static_cast<std::size_t>(n_sites));
        for (int i = 0; i < n_sites; ++i) all[static_cast<std::size_t>(i)] = i;
        cells_.push_back(std::move(all));
        return;
    }
    std::vector<int> seen(static_cast<std::size_t>(n_sites), 0);
    for (auto& c : cells_) {
        if (c.empty()) throw std::invalid_argument("SpinRegister: empty cell");
        std::sort(c.begin(), c.end());
        for (int s : c) {
            if (s < 0 || s >= n_sites) throw std::invalid_argument("SpinRegister: cell site out of range");
            if (seen[static_cast<std::size_t>(s)]++) throw std::invalid_argument("SpinRegister: cells overlap");
        }
    }
    for (int v : seen)
        if (v == 0) throw std::invalid_argument("SpinRegister: cells do not cover all sites");
}

SpinRegister SpinRegister::with_uniform_cells(int n_sites, int cell_size, int max_sites) {
    if (cell_size < 1 || n_sites % cell_size != 0)
        throw std::invalid_argument("with_uniform_cells: cell size must divide n_sites");
    std::vector<SiteSet> cells;
    for (int start = 0; start < n_sites; start += cell_size) {
        SiteSet c;
        for (int i = start; i < start + cell_size; ++i) c.push_back(i);
        cells.push_back(std::move(c));
    }
    return SpinRegister(n_sites, std::move(cells), max_sites);
}

void SpinRegister::check_sites(const SiteSet& sites) const {
    if (sites.empty()) throw std::invalid_argument("site set is empty");
    std::vector<int> seen(static_cast<std::size_t>(n_sites_), 0);
    for (int s : sites) {
        if (s < 0 || s >= n_sites_)
            throw std::out_of_range("site " + std::to_string(s) + " outside register of " +
                                    std::to_string(n_sites_));
        if (seen[static_cast<std::size_t>(s)]++) throw std::invalid_argument("duplicate site in set");
    }
}

std::size_t site_mask(const SiteSet& sites) {
    std::size_t m = 0;
    for (int s : sites) m |= std::size_t{1} << s;
    return m;
}

std::vector<std::size_t> scatter_table(const SiteSet& sites) {
    const std::size_t n = pow2(static_cast<int>(sites.size()));
    std::vector<std::size_t> out(n, 0);
    for (std::size_t a = 0; a < n; ++a) {
        std::size_t off = 0;
        for (std::size_t t = 0; t < sites.size(); ++t)
            if ((a >> t) & 1U) off |= std::size_t{1} << sites[t];
        out[a] = off;
    }
    return out;
}

SiteSet complement(const SiteSet& sites, int n_sites) {
    const std::size_t m = site_mask(sites);
    SiteSet out;
    for (int i = 0; i < n_sites; ++i)
        if (!((m >> i) & 1U)) out.push_back(i);
    return out;
}

int diameter(const SiteSet& sites) {
    if (sites.empty()) return 0;
    auto [lo, hi] = std::minmax_element(sites.begin(), sites.end());
    return *hi - *lo + 1;
}

}  // namespace thermeq
