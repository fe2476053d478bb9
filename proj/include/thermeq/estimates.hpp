#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <string>

namespace thermeq {

/// Positive magnitude stored as its base-10 logarithm, so values like
/// 10^(10^25) or 10^(-10^5) stay finite. Zero is log10 = -inf.
class LogNumber {
  public:
    LogNumber() = default;
    static LogNumber from_log10(double l) { return LogNumber(l); }
    static LogNumber from_ln(double l);
    static LogNumber from_value(double v);  // v >= 0

    double log10() const { return log10_; }
    double ln() const;
    /// log10(log10 x); requires x > 1.
    double log10_log10() const;
    /// Plain double (may be 0 or inf).
    double value() const;

    LogNumber operator*(const LogNumber& o) const { return LogNumber(log10_ + o.log10_); }
    LogNumber operator/(const LogNumber& o) const { return LogNumber(log10_ - o.log10_); }
    LogNumber pow(double k) const { return LogNumber(log10_ * k); }
    LogNumber operator+(const LogNumber& o) const;

    auto operator<=>(const LogNumber& o) const { return log10_ <=> o.log10_; }
    bool operator==(const LogNumber& o) const = default;

    std::string to_string() const;

  private:
    explicit LogNumber(double l) : log10_(l) {}
    double log10_ = -std::numeric_limits<double>::infinity();
};

// ---------------------------------------------------------------- constants

namespace constants {
inline constexpr double hbar = 1.054571817e-34;     // J s, CODATA 2018 (exact after SI redefinition)
inline constexpr double boltzmann = 1.380649e-23;   // J/K, CODATA 2018 exact
}  // namespace constants

// ---------------------------------------------------------------- cells

/// m exp(-m N dM^2): probability that any of m cell fractions leaves its
/// equilibrium bin, N particles, relative resolution dM.
LogNumber mate_epsilon_estimate(double m_cells, double n_particles, double delta_m);

/// delta = sqrt(epsilon); epsilon in (0, 1].
LogNumber delta_choice(const LogNumber& epsilon);

struct BinomialDeviation {
    double n_total = 0.0;
    double m_cells = 0.0;
    double mean = 0.0;       // n_total / m
    double sigma = 0.0;      // sqrt(n_total p (1 - p))
    double threshold = 0.0;  // rel_tol * mean
    bool exact_available = false;
    LogNumber exact;         // P(|N_i - mean| > threshold), exact sum
    LogNumber gaussian;      // two-sided normal tail erfc(t / (sigma sqrt 2))
    LogNumber bound;         // Bernstein: 2 exp(-t^2 / (2 (sigma^2 + t / 3)))
    double ratio = 0.0;      // gaussian / exact when exact is available and nonzero
    LogNumber union_exact;   // min(1, m * exact)
    LogNumber union_bound;   // min(1, m * bound)
};

inline constexpr double kExactBinomialLimit = 1e6;

/// Occupation N_i ~ Bin(n_total, 1/m) of one cell.
BinomialDeviation exact_binomial_deviation(double n_total, double m_cells, double rel_tol);

/// Bernstein tail 2 exp(-t^2 / (2 (sigma^2 + t / 3))) capped at 1; rigorous
/// for sums of independent bounded variables.
LogNumber gaussian_tail_bound(double n_total, double m_cells, double threshold);

struct ExorbitantCells {
    double exponent = 0.0;  // (rel_tol n)^2 / (2 n), natural log of the cell count
    LogNumber cells;        // e^exponent
};

/// Cell count for which an occupation deviation by more than rel_tol * n
/// becomes likely somewhere, n particles per cell (Gaussian per-cell tail).
ExorbitantCells exorbitant_cell_count(double n_per_cell, double rel_tol);

// ---------------------------------------------------------------- level counting

struct IdealGasCount {
    LogNumber levels;       // n_{dT}, Gamma function volume
    LogNumber levels_rough; // same with (3N/2)! ~ (3N/2e)^{3N/2}
    double per_particle = 0.0;  // c in N 10^{c N + k}
    double offset = 0.0;        // k
};

/// Levels of N free particles in a cubic box with energy in
/// [3NkT/2, 3Nk(T + dT)/2].
IdealGasCount ideal_gas_level_count(double n_particles, double box_len, double mass, double temp, double delta_t);

/// Volume of the positive orthant of a radius-R ball in `dims` dimensions.
LogNumber orthant_volume(int dims, double radius);

/// Lattice points with positive coordinates and |n| <= R, by enumeration.
std::uint64_t lattice_count_below(int dims, double radius);

struct DmcRange {
    LogNumber lower;  // 10^(N/10)
    LogNumber upper;  // 10^(30N)
};

DmcRange dmc_heuristics(double n);

/// log10 sqrt(2^N), the micro-canonical dimension for N spins at half the
/// Hilbert-space exponent.
double spin_dmc_log10(double n);

}  // namespace thermeq
