#pragma once

#include "thermeq/types.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace thermeq {

/// Counter-based SplitMix64 generator.
///
/// The i-th output of stream `s` under seed `k` is a pure function of
/// (k, s, i): the key is derived by mixing seed and stream, and each draw
/// hashes key + counter * golden-gamma. There is no hidden global state, so
/// Monte Carlo loops address sample `i` as `Rng(seed, i)` and produce the
/// same numbers regardless of how the index range is split across workers.
class Rng {
  public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL))) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return mix(key_ + (++counter_) * kGamma); }

    std::uint64_t counter() const { return counter_; }

    /// Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform() {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Uniform on (lo, hi), never returning either endpoint for lo < hi.
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n) by rejection (unbiased).
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = max() - max() % n;
        std::uint64_t x;
        do {
            x = (*this)();
        } while (x >= limit);
        return x % n;
    }

    /// Standard normal via Box-Muller; the sine branch is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform()));
        const double phi = 2.0 * std::numbers::pi * uniform();
        spare_ = r * std::sin(phi);
        has_spare_ = true;
        return r * std::cos(phi);
    }

    /// Circular complex Gaussian with E|z|^2 = 1.
    Complex complex_normal() {
        constexpr double s = 0.7071067811865476;
        const double re = normal();
        const double im = normal();
        return {s * re, s * im};
    }

    CVector complex_normal_vector(Eigen::Index n) {
        CVector v(n);
        for (Eigen::Index i = 0; i < n; ++i) v(i) = complex_normal();
        return v;
    }

    /// Unit-modulus complex number with uniform phase.
    Complex phase() {
        const double phi = 2.0 * std::numbers::pi * uniform();
        return {std::cos(phi), std::sin(phi)};
    }

  private:
    static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

    static constexpr std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace thermeq
