#pragma once

// Brute-force reference computations. Everything here works on explicit
// index loops and shares no code with the library.

#include "thermeq/types.hpp"
#include "thermeq/rng.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace oracle {

using thermeq::CMatrix;
using thermeq::Complex;
using thermeq::CVector;
using thermeq::RVector;
using thermeq::SiteSet;

inline int bit(std::size_t b, int site) { return static_cast<int>((b >> site) & 1u); }
inline int spin(std::size_t b, int site) { return bit(b, site) ? -1 : 1; }

/// local on `site`, identity elsewhere, entry by entry.
inline CMatrix embed(int n, int site, const CMatrix& local) {
    const std::size_t d = std::size_t{1} << n;
    CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c) {
            bool others_equal = true;
            for (int s = 0; s < n; ++s)
                if (s != site && bit(r, s) != bit(c, s)) others_equal = false;
            if (others_equal)
                out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = local(bit(r, site), bit(c, site));
        }
    return out;
}

/// tr over the complement of `keep`; kept sites become output bits in the
/// order given.
inline CMatrix partial_trace(const CMatrix& rho, int n, const SiteSet& keep) {
    const auto k = static_cast<int>(keep.size());
    const std::size_t dk = std::size_t{1} << k, d = std::size_t{1} << n;
    CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dk));
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c) {
            bool traced_equal = true;
            for (int s = 0; s < n; ++s) {
                bool kept = false;
                for (int q : keep) kept = kept || q == s;
                if (!kept && bit(r, s) != bit(c, s)) traced_equal = false;
            }
            if (!traced_equal) continue;
            std::size_t a = 0, b = 0;
            for (int t = 0; t < k; ++t) {
                a |= static_cast<std::size_t>(bit(r, keep[t])) << t;
                b |= static_cast<std::size_t>(bit(c, keep[t])) << t;
            }
            out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) +=
                rho(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        }
    return out;
}

/// Random density matrix G G^dagger / tr.
inline CMatrix random_density(Eigen::Index d, std::uint64_t seed) {
    thermeq::Rng rng(seed, 77);
    CMatrix g(d, d);
    for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index i = 0; i < d; ++i) g(i, j) = rng.complex_normal();
    CMatrix rho = g * g.adjoint();
    return rho / rho.trace().real();
}

inline CMatrix random_hermitian(Eigen::Index d, std::uint64_t seed) {
    thermeq::Rng rng(seed, 78);
    CMatrix g(d, d);
    for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index i = 0; i < d; ++i) g(i, j) = rng.complex_normal();
    return (g + g.adjoint()) / 2.0;
}

inline CVector random_unit(Eigen::Index d, std::uint64_t seed) {
    thermeq::Rng rng(seed, 79);
    CVector v(d);
    for (Eigen::Index i = 0; i < d; ++i) v(i) = rng.complex_normal();
    return v / v.norm();
}

/// Number of n-bit strings satisfying `pred`.
inline std::size_t count_strings(int n, const std::function<bool(std::size_t)>& pred) {
    std::size_t c = 0;
    for (std::size_t b = 0; b < (std::size_t{1} << n); ++b) c += pred(b) ? 1 : 0;
    return c;
}

inline int magnetization(std::size_t b, const SiteSet& sites) {
    int m = 0;
    for (int s : sites) m += spin(b, s);
    return m;
}

inline double choose(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

/// P(|X - n p| > t) for X ~ Binomial(n, p), summed term by term.
inline double binomial_two_sided_tail(int n, double p, double t) {
    double s = 0.0;
    for (int k = 0; k <= n; ++k)
        if (std::abs(k - n * p) > t) s += choose(n, k) * std::pow(p, k) * std::pow(1.0 - p, n - k);
    return s;
}

/// Ordered pairs of distinct index pairs (a,b) != (c,d) with equal gaps
/// within tol, excluding the case a = b and c = d.
inline std::size_t gap_resonances(const RVector& e, double tol) {
    const auto d = e.size();
    std::size_t count = 0;
    for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = 0; b < d; ++b)
            for (Eigen::Index c = 0; c < d; ++c)
                for (Eigen::Index f = 0; f < d; ++f) {
                    if (a == c && b == f) continue;
                    if (a == b && c == f) continue;
                    if (std::abs((e(a) - e(b)) - (e(c) - e(f))) <= tol) ++count;
                }
    return count;
}

/// Lattice points with positive integer coordinates and sum of squares <= r^2.
inline std::uint64_t positive_lattice_points(int dims, double r) {
    std::function<std::uint64_t(int, double)> rec = [&](int k, double left) -> std::uint64_t {
        if (k == 0) return 1;
        std::uint64_t c = 0;
        for (long long x = 1; static_cast<double>(x * x) <= left; ++x) c += rec(k - 1, left - static_cast<double>(x * x));
        return c;
    };
    return rec(dims, r * r);
}

/// Trace norm via the eigenvalues of a Hermitian matrix, using Eigen's own
/// solver rather than the library's.
inline double trace_norm(const CMatrix& a) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(a, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().sum();
}

}  // namespace oracle
