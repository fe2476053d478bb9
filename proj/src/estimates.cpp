#include "thermeq/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace thermeq {

namespace {

constexpr double kLn10 = std::numbers::ln10;

// ln Gamma(x + 1); Stirling with the 1/(12x) term for large x
double log_factorial(double x) {
    if (x > 1e6) return x * std::log(x) - x + 0.5 * std::log(2.0 * std::numbers::pi * x) + 1.0 / (12.0 * x);
    return std::lgamma(x + 1.0);
}

// ln of a sum given its terms' logs
double log_sum_exp(const std::vector<double>& v) {
    if (v.empty()) return -std::numeric_limits<double>::infinity();
    const double mx = *std::max_element(v.begin(), v.end());
    if (!std::isfinite(mx)) return mx;
    double s = 0.0;
    for (double x : v) s += std::exp(x - mx);
    return mx + std::log(s);
}

// ln erfc(x) for x >= 0, asymptotic once erfc underflows
double log_erfc(double x) {
    const double e = std::erfc(x);
    if (e > 1e-300) return std::log(e);
    const double x2 = x * x;
    return -x2 - std::log(x * std::sqrt(std::numbers::pi)) + std::log1p(-0.5 / x2 + 0.75 / (x2 * x2));
}

LogNumber cap_one(const LogNumber& x) { return std::min(x, LogNumber::from_log10(0.0)); }

}  // namespace

// ---------------------------------------------------------------- LogNumber

LogNumber LogNumber::from_ln(double l) { return LogNumber(l / kLn10); }

LogNumber LogNumber::from_value(double v) {
    if (!(v >= 0.0)) throw std::invalid_argument("LogNumber: value must be non-negative");
    return LogNumber(std::log10(v));
}

double LogNumber::ln() const { return log10_ * kLn10; }

double LogNumber::log10_log10() const {
    if (!(log10_ > 0.0)) throw std::domain_error("LogNumber: log10_log10 needs a value above 1");
    return std::log10(log10_);
}

double LogNumber::value() const { return std::pow(10.0, log10_); }

LogNumber LogNumber::operator+(const LogNumber& o) const {
    const double hi = std::max(log10_, o.log10_), lo = std::min(log10_, o.log10_);
    if (!std::isfinite(lo)) return LogNumber(hi);
    return LogNumber(hi + std::log10(1.0 + std::pow(10.0, lo - hi)));
}

std::string LogNumber::to_string() const {
    std::ostringstream os;
    os.precision(6);
    if (!std::isfinite(log10_)) {
        os << (log10_ < 0 ? "0" : "inf");
    } else if (std::abs(log10_) < 300) {
        os << value();
    } else {
        os << "10^(" << log10_ << ")";
    }
    return os.str();
}

// ---------------------------------------------------------------- cells

LogNumber mate_epsilon_estimate(double m_cells, double n_particles, double delta_m) {
    if (!(m_cells > 0.0 && n_particles > 0.0 && delta_m >= 0.0))
        throw std::invalid_argument("mate_epsilon_estimate: parameters must be positive");
    return LogNumber::from_log10(std::log10(m_cells) - m_cells * n_particles * delta_m * delta_m / kLn10);
}

LogNumber delta_choice(const LogNumber& epsilon) {
    if (!(epsilon.log10() <= 0.0) || !std::isfinite(epsilon.log10()))
        throw std::invalid_argument("delta_choice: epsilon must lie in (0, 1]");
    return epsilon.pow(0.5);
}

LogNumber gaussian_tail_bound(double n_total, double m_cells, double threshold) {
    if (!(m_cells >= 1.0 && n_total >= m_cells && threshold >= 0.0))
        throw std::invalid_argument("gaussian_tail_bound: need n_total >= m_cells >= 1 and threshold >= 0");
    const double p = 1.0 / m_cells;
    const double var = n_total * p * (1.0 - p);
    const double t = threshold;
    if (t == 0.0) return LogNumber::from_log10(0.0);
    const double denom = 2.0 * (var + t / 3.0);
    return cap_one(LogNumber::from_ln(std::log(2.0) - t * t / denom));
}

BinomialDeviation exact_binomial_deviation(double n_total, double m_cells, double rel_tol) {
    if (!(m_cells >= 1.0 && n_total / m_cells >= 1.0))
        throw std::invalid_argument("exact_binomial_deviation: need n_total / m_cells >= 1");
    if (!(rel_tol >= 0.0)) throw std::invalid_argument("exact_binomial_deviation: rel_tol must be non-negative");
    BinomialDeviation r;
    r.n_total = n_total;
    r.m_cells = m_cells;
    const double p = 1.0 / m_cells;
    r.mean = n_total * p;
    r.sigma = std::sqrt(n_total * p * (1.0 - p));
    r.threshold = rel_tol * r.mean;

    if (n_total <= kExactBinomialLimit && n_total == std::floor(n_total)) {
        const auto n = static_cast<long long>(n_total);
        const double lp = std::log(p), lq = std::log1p(-p);
        const double lnf = log_factorial(n_total);
        std::vector<double> terms;
        for (long long k = 0; k <= n; ++k) {
            // |k - mean| == t is not a deviation; the margin absorbs rounding in t
            if (std::abs(static_cast<double>(k) - r.mean) <= r.threshold * (1.0 + 1e-12) + 1e-9) continue;
            const auto kd = static_cast<double>(k);
            double lt = lnf - log_factorial(kd) - log_factorial(n_total - kd) + kd * lp;
            if (m_cells > 1.0) lt += (n_total - kd) * lq;
            else if (k != n) continue;  // p = 1: all mass at k = n
            terms.push_back(lt);
        }
        r.exact = cap_one(LogNumber::from_ln(log_sum_exp(terms)));
        r.exact_available = true;
    }

    if (r.sigma > 0.0) {
        r.gaussian = cap_one(LogNumber::from_ln(log_erfc(r.threshold / (r.sigma * std::sqrt(2.0)))));
    } else {
        r.gaussian = r.threshold > 0.0 ? LogNumber() : LogNumber::from_log10(0.0);
    }
    r.bound = gaussian_tail_bound(n_total, m_cells, r.threshold);
    const LogNumber m = LogNumber::from_value(m_cells);
    if (r.exact_available) {
        r.union_exact = cap_one(m * r.exact);
        if (std::isfinite(r.exact.log10())) r.ratio = (r.gaussian / r.exact).value();
    }
    r.union_bound = cap_one(m * r.bound);
    return r;
}

ExorbitantCells exorbitant_cell_count(double n_per_cell, double rel_tol) {
    if (!(n_per_cell > 0.0 && rel_tol > 0.0))
        throw std::invalid_argument("exorbitant_cell_count: parameters must be positive");
    ExorbitantCells r;
    const double t = rel_tol * n_per_cell;
    r.exponent = t * t / (2.0 * n_per_cell);
    r.cells = LogNumber::from_ln(r.exponent);
    return r;
}

// ---------------------------------------------------------------- level counting

LogNumber orthant_volume(int dims, double radius) {
    if (dims < 1 || !(radius >= 0.0)) throw std::invalid_argument("orthant_volume: bad dimension or radius");
    const double d = dims;
    const double ln = -d * std::log(2.0) + 0.5 * d * std::log(std::numbers::pi) + d * std::log(radius) -
                      log_factorial(0.5 * d);
    return LogNumber::from_ln(ln);
}

std::uint64_t lattice_count_below(int dims, double radius) {
    if (dims < 1 || !(radius >= 0.0)) throw std::invalid_argument("lattice_count_below: bad dimension or radius");
    const double r2 = radius * radius;
    std::function<std::uint64_t(int, double)> rec = [&](int left, double budget) -> std::uint64_t {
        if (left == 0) return 1;
        std::uint64_t c = 0;
        for (long long k = 1; static_cast<double>(k * k) <= budget; ++k) c += rec(left - 1, budget - static_cast<double>(k * k));
        return c;
    };
    return rec(dims, r2);
}

IdealGasCount ideal_gas_level_count(double n_particles, double box_len, double mass, double temp, double delta_t) {
    if (!(n_particles > 0.0 && box_len > 0.0 && mass > 0.0 && temp > 0.0 && delta_t > 0.0))
        throw std::invalid_argument("ideal_gas_level_count: parameters must be positive");
    using constants::boltzmann;
    using constants::hbar;
    const double pi = std::numbers::pi;
    const double d = 3.0 * n_particles;
    const double energy = 1.5 * n_particles * boltzmann * temp;
    // R^2 = L^2 2 m E / (hbar pi)^2, kept in logs
    const double ln_r2 = 2.0 * std::log(box_len) + std::log(2.0 * mass * energy) - 2.0 * std::log(hbar * pi);
    const double ln_levels_below = -d * std::log(2.0) + 0.5 * d * std::log(pi) + 0.5 * d * ln_r2 - log_factorial(0.5 * d);
    // n_dT = dn/dE * dE = (3N/2) n(E) dT / T
    IdealGasCount r;
    r.levels = LogNumber::from_ln(std::log(0.5 * d) + ln_levels_below + std::log(delta_t / temp));

    const double base = 3.0 * std::numbers::e * box_len * box_len * mass * boltzmann / (2.0 * pi * hbar * hbar);
    const double ln_rough = std::log(0.5 * d) + 0.5 * d * std::log(base) + (0.5 * d - 1.0) * std::log(temp) + std::log(delta_t);
    r.levels_rough = LogNumber::from_ln(ln_rough);
    r.per_particle = 1.5 * std::log10(base * temp);
    r.offset = std::log10(1.5) + std::log10(delta_t / temp);
    return r;
}

DmcRange dmc_heuristics(double n) {
    if (!(n >= 1.0)) throw std::invalid_argument("dmc_heuristics: n must be at least 1");
    return {LogNumber::from_log10(n / 10.0), LogNumber::from_log10(30.0 * n)};
}

double spin_dmc_log10(double n) { return 0.5 * n * std::log10(2.0); }

}  // namespace thermeq
