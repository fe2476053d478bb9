#include "thermeq/typicality.hpp"

#include "thermeq/models.hpp"
#include "thermeq/parallel.hpp"
#include "thermeq/partial_trace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>

namespace thermeq {

CVector sample_sphere(Eigen::Index k, Rng& rng) {
    if (k < 1) throw std::invalid_argument("sample_sphere: dimension must be positive");
    CVector c = rng.complex_normal_vector(k);
    return c / c.norm();
}

PureState sample_uniform(const Subspace& s, std::uint64_t seed, std::uint64_t index) {
    Rng rng(seed, index);
    const CVector c = sample_sphere(static_cast<Eigen::Index>(s.rank()), rng);
    return PureState::from_unnormalized(s.embed(c));
}

// ---------------------------------------------------------------- moments

namespace {

constexpr std::size_t kChunk = 1024;

struct MomentSums {
    std::size_t n = 0;
    CVector s1;
    RVector s1_re2, s1_im2;
    CMatrix s2, s3;
    RMatrix s2_re2, s2_im2, s3_re2, s3_im2, s4, s4_2;

    explicit MomentSums(Eigen::Index d = 0)
        : s1(CVector::Zero(d)), s1_re2(RVector::Zero(d)), s1_im2(RVector::Zero(d)),
          s2(CMatrix::Zero(d, d)), s3(CMatrix::Zero(d, d)),
          s2_re2(RMatrix::Zero(d, d)), s2_im2(RMatrix::Zero(d, d)),
          s3_re2(RMatrix::Zero(d, d)), s3_im2(RMatrix::Zero(d, d)),
          s4(RMatrix::Zero(d, d)), s4_2(RMatrix::Zero(d, d)) {}

    void add(const CVector& c) {
        ++n;
        const RVector a2 = c.cwiseAbs2();
        s1 += c;
        s1_re2 += c.real().cwiseAbs2();
        s1_im2 += c.imag().cwiseAbs2();
        const CMatrix m2 = c.conjugate() * c.transpose();  // (a, b) -> conj(c_a) c_b
        const CMatrix m3 = a2.cast<Complex>() * c.transpose();
        const RMatrix m4 = a2 * a2.transpose();
        s2 += m2;
        s2_re2 += m2.real().cwiseAbs2();
        s2_im2 += m2.imag().cwiseAbs2();
        s3 += m3;
        s3_re2 += m3.real().cwiseAbs2();
        s3_im2 += m3.imag().cwiseAbs2();
        s4 += m4;
        s4_2 += m4.cwiseAbs2();
    }

    void merge(const MomentSums& o) {
        n += o.n;
        s1 += o.s1;
        s1_re2 += o.s1_re2;
        s1_im2 += o.s1_im2;
        s2 += o.s2;
        s2_re2 += o.s2_re2;
        s2_im2 += o.s2_im2;
        s3 += o.s3;
        s3_re2 += o.s3_re2;
        s3_im2 += o.s3_im2;
        s4 += o.s4;
        s4_2 += o.s4_2;
    }
};

double z_score(double sum, double sum_sq, std::size_t n, double exact) {
    const auto nn = static_cast<double>(n);
    const double mean = sum / nn;
    const double var = std::max(sum_sq / nn - mean * mean, 0.0);
    const double se = std::sqrt(var / (nn - 1.0));
    const double diff = std::abs(mean - exact);
    if (se == 0.0) return diff > 1e-12 ? std::numeric_limits<double>::infinity() : 0.0;
    return diff / se;
}

MomentReport finish(const MomentSums& s, std::size_t d) {
    if (s.n < 2) throw std::invalid_argument("moment report needs at least two samples");
    MomentReport r;
    r.d = d;
    r.n_samples = s.n;
    const auto nn = static_cast<double>(s.n);
    const auto dd = static_cast<double>(d);
    r.first = s.s1 / nn;
    r.second = s.s2 / nn;
    r.third = s.s3 / nn;
    r.fourth = s.s4 / nn;
    const auto di = static_cast<Eigen::Index>(d);
    for (Eigen::Index a = 0; a < di; ++a) {
        r.max_z_first = std::max({r.max_z_first, z_score(s.s1(a).real(), s.s1_re2(a), s.n, 0.0),
                                  z_score(s.s1(a).imag(), s.s1_im2(a), s.n, 0.0)});
        for (Eigen::Index b = 0; b < di; ++b) {
            const double e2 = a == b ? 1.0 / dd : 0.0;
            const double e4 = (a == b ? 2.0 : 1.0) / (dd * (dd + 1.0));
            r.max_z_second = std::max({r.max_z_second, z_score(s.s2(a, b).real(), s.s2_re2(a, b), s.n, e2),
                                       z_score(s.s2(a, b).imag(), s.s2_im2(a, b), s.n, 0.0)});
            r.max_z_third = std::max({r.max_z_third, z_score(s.s3(a, b).real(), s.s3_re2(a, b), s.n, 0.0),
                                      z_score(s.s3(a, b).imag(), s.s3_im2(a, b), s.n, 0.0)});
            r.max_z_fourth = std::max(r.max_z_fourth, z_score(s.s4(a, b), s.s4_2(a, b), s.n, e4));
        }
    }
    return r;
}

}  // namespace

double MomentReport::max_z() const { return std::max({max_z_first, max_z_second, max_z_third, max_z_fourth}); }

MomentReport moment_check(const Subspace& s, std::size_t n_samples, std::uint64_t seed, int jobs) {
    const auto k = static_cast<Eigen::Index>(s.rank());
    const std::size_t n_chunks = (n_samples + kChunk - 1) / kChunk;
    const auto parts = parallel_map(n_chunks, jobs, [&](std::size_t c) {
        MomentSums part(k);
        const std::size_t hi = std::min(n_samples, (c + 1) * kChunk);
        for (std::size_t i = c * kChunk; i < hi; ++i) {
            const PureState psi = sample_uniform(s, seed, i);
            part.add(s.coefficients(psi.amplitudes()));
        }
        return part;
    });
    MomentSums total(k);
    for (const auto& p : parts) total.merge(p);
    return finish(total, s.rank());
}

MomentReport moment_report(const std::vector<CVector>& coeffs) {
    if (coeffs.empty()) throw std::invalid_argument("moment_report: no samples");
    const auto k = coeffs.front().size();
    MomentSums total(k);
    for (const auto& c : coeffs) {
        if (c.size() != k) throw std::invalid_argument("moment_report: inconsistent dimensions");
        total.add(c);
    }
    return finish(total, static_cast<std::size_t>(k));
}

VarianceBoundReport variance_bound_check(const CMatrix& a, const Subspace& s, std::size_t n_samples,
                                         std::uint64_t seed, double cheb_eps, int jobs) {
    if (static_cast<std::size_t>(a.rows()) != s.ambient() || a.rows() != a.cols())
        throw std::invalid_argument("variance_bound_check: dimension mismatch");
    if (n_samples < 2) throw std::invalid_argument("variance_bound_check: need at least two samples");
    const auto k = static_cast<double>(s.rank());
    const CMatrix f = s.frame();
    const CMatrix af = a * f;
    const CMatrix ar = f.adjoint() * af;
    const double mean_exact = ar.trace().real() / k;
    const double a2 = af.squaredNorm() / k;  // tr(A^2 rho_R)
    const double ar2 = ar.squaredNorm() / k;  // tr(A_R^2) / k
    VarianceBoundReport r;
    r.n_samples = n_samples;
    r.exact_mean = mean_exact;
    r.bound = std::max(a2 - mean_exact * mean_exact, 0.0) / (k + 1.0);
    r.exact_variance = std::max(ar2 - mean_exact * mean_exact, 0.0) / (k + 1.0);

    const auto xs = parallel_map(n_samples, jobs, [&](std::size_t i) {
        Rng rng(seed, i);
        const CVector c = sample_sphere(static_cast<Eigen::Index>(s.rank()), rng);
        return c.dot(ar * c).real();
    });
    const auto n = static_cast<double>(n_samples);
    double sum = 0.0;
    for (double x : xs) sum += x;
    r.mean = sum / n;
    double m2 = 0.0, m4 = 0.0;
    for (double x : xs) {
        const double dx = x - r.mean;
        m2 += dx * dx;
        m4 += dx * dx * dx * dx;
    }
    r.variance = m2 / (n - 1.0);
    m4 /= n;
    const double pop_var = m2 / n;
    r.mean_se = std::sqrt(r.variance / n);
    r.variance_se = std::sqrt(std::max(m4 - pop_var * pop_var, 0.0) / n);
    r.mean_ok = std::abs(r.mean - r.exact_mean) <= 5.0 * r.mean_se + 1e-12;
    r.variance_ok = r.variance <= r.bound + 3.0 * r.variance_se + 1e-15;
    if (cheb_eps > 0.0) {
        std::size_t hits = 0;
        for (double x : xs) hits += std::abs(x - mean_exact) > cheb_eps;
        r.cheb_eps = cheb_eps;
        r.cheb_fraction = static_cast<double>(hits) / n;
        r.cheb_bound = r.bound / (cheb_eps * cheb_eps);
        const double b = std::clamp(r.cheb_bound, 0.0, 1.0);
        r.cheb_slack = 3.0 * std::sqrt(std::max(b * (1.0 - b), 1.0 / n) / n);
        r.cheb_ok = r.cheb_fraction <= r.cheb_bound + r.cheb_slack;
    }
    return r;
}

// ---------------------------------------------------------------- bipartitions

Bipartition Bipartition::split(std::size_t ambient, std::size_t d1) {
    if (d1 == 0 || ambient == 0 || ambient % d1 != 0)
        throw std::invalid_argument("Bipartition: d1 must divide the ambient dimension");
    return Bipartition(d1, ambient / d1);
}

Bipartition Bipartition::sites(int n_sites, SiteSet keep) {
    SpinRegister(n_sites, {}, 62).check_sites(keep);
    std::sort(keep.begin(), keep.end());
    Bipartition b(pow2(static_cast<int>(keep.size())), pow2(n_sites - static_cast<int>(keep.size())));
    b.sites_ = std::move(keep);
    b.n_sites_ = n_sites;
    return b;
}

Bipartition Bipartition::rotated(HouseholderRotation u) const {
    if (sites_) throw std::logic_error("Bipartition: site-based bipartitions are not rotated");
    if (u.dim() != ambient()) throw std::invalid_argument("Bipartition: rotation dimension mismatch");
    Bipartition b = *this;
    b.rotation_ = std::move(u);
    return b;
}

CVector Bipartition::factor_coordinates(const CVector& psi) const {
    if (static_cast<std::size_t>(psi.size()) != ambient()) throw std::invalid_argument("Bipartition: dimension mismatch");
    return rotation_ ? rotation_->apply_adjoint(psi) : psi;
}

CMatrix Bipartition::reduce(const CVector& psi) const {
    if (sites_) return reduced_state(psi, n_sites_, *sites_);
    return reduced_state_split(factor_coordinates(psi), d1_);
}

CMatrix Bipartition::reduce_average(const Subspace& s) const {
    if (s.ambient() != ambient()) throw std::invalid_argument("Bipartition::reduce_average: dimension mismatch");
    const auto k = static_cast<Eigen::Index>(d1_);
    if (s.rank() == ambient()) return CMatrix::Identity(k, k) / static_cast<double>(d1_);
    if (sites_) return reduced_mc_state(s, n_sites_, *sites_);
    CMatrix out = CMatrix::Zero(k, k);
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(s.rank()); ++j) out += reduce(s.column(j));
    return out / static_cast<double>(s.rank());
}

Bipartition abstract_bipartition(std::size_t ambient, std::size_t d1, std::optional<std::uint64_t> rotation_seed) {
    if (d1 == 0 || ambient == 0 || ambient % d1 != 0)
        throw std::invalid_argument("abstract_bipartition: d1 must divide the ambient dimension");
    const bool pow2_dims = (ambient & (ambient - 1)) == 0 && (d1 & (d1 - 1)) == 0;
    if (!rotation_seed) {
        if (pow2_dims && d1 > 1) {
            SiteSet keep;
            for (int i = 0; i < sites_for_dim(d1); ++i) keep.push_back(i);
            return Bipartition::sites(sites_for_dim(ambient), keep);
        }
        return Bipartition::split(ambient, d1);
    }
    Rng rng(*rotation_seed, 0x726f74ULL);
    return Bipartition::split(ambient, d1).rotated(HouseholderRotation::haar(ambient, rng));
}

// ---------------------------------------------------------------- concentration

double psw_bound(std::size_t d_r, double eps_tilde) {
    const double pi3 = std::pow(std::numbers::pi, 3);
    return 4.0 * std::exp(-static_cast<double>(d_r) * eps_tilde * eps_tilde / (18.0 * pi3));
}

PswReport psw_check(const Subspace& shell, const Bipartition& bp, double eps_tilde, std::size_t n_samples,
                    std::uint64_t seed, int jobs) {
    if (bp.ambient() != shell.ambient()) throw std::invalid_argument("psw_check: bipartition dimension mismatch");
    if (!(eps_tilde > 0.0)) throw std::invalid_argument("psw_check: eps_tilde must be positive");
    if (n_samples == 0) throw std::invalid_argument("psw_check: no samples");
    PswReport r;
    r.n_samples = n_samples;
    r.d_r = shell.rank();
    r.d1 = bp.d1();
    r.eps_tilde = eps_tilde;
    r.threshold = eps_tilde + static_cast<double>(bp.d1()) / std::sqrt(static_cast<double>(shell.rank()));
    r.bound = psw_bound(shell.rank(), eps_tilde);
    const CMatrix ref = bp.reduce_average(shell);
    const auto dist = parallel_map(n_samples, jobs, [&](std::size_t i) {
        const PureState psi = sample_uniform(shell, seed, i);
        return trace_norm_distance(bp.reduce(psi.amplitudes()), ref);
    });
    double sum = 0.0;
    for (double x : dist) {
        r.violations += x >= r.threshold;
        sum += x;
        r.max_distance = std::max(r.max_distance, x);
    }
    const auto n = static_cast<double>(n_samples);
    r.mean_distance = sum / n;
    r.rate = static_cast<double>(r.violations) / n;
    const double b = std::min(r.bound, 1.0);
    r.slack = 3.0 * std::sqrt(b * (1.0 - b) / n);
    r.holds = r.rate <= r.bound + r.slack;
    return r;
}

MultiRegionReport multi_region_check(const Subspace& shell, int n_sites, const std::vector<SiteSet>& regions,
                                     double epsilon, std::size_t n_samples, std::uint64_t seed, int jobs) {
    if (regions.empty()) throw std::invalid_argument("multi_region_check: no regions");
    if (n_samples == 0) throw std::invalid_argument("multi_region_check: no samples");
    MultiRegionReport r;
    r.n_samples = n_samples;
    r.epsilon = epsilon;
    r.r = regions.size();
    const double dmc = static_cast<double>(shell.rank());
    r.dimension_condition = true;
    std::vector<CMatrix> ref;
    for (const auto& reg : regions) {
        r.dimension_condition =
            r.dimension_condition && static_cast<double>(pow2(static_cast<int>(reg.size()))) < 0.5 * epsilon * std::sqrt(dmc);
        ref.push_back(reduced_mc_state(shell, n_sites, reg));
    }
    const double pi3 = std::pow(std::numbers::pi, 3);
    r.bound = 1.0 - 4.0 * static_cast<double>(r.r) * std::exp(-dmc * epsilon * epsilon / (72.0 * pi3));
    const auto ok = parallel_map(n_samples, jobs, [&](std::size_t i) -> char {
        const PureState psi = sample_uniform(shell, seed, i);
        for (std::size_t k = 0; k < regions.size(); ++k)
            if (trace_norm_distance(reduced_state(psi.amplitudes(), n_sites, regions[k]), ref[k]) >= epsilon) return 0;
        return 1;
    });
    std::size_t hits = 0;
    for (char c : ok) hits += static_cast<std::size_t>(c);
    const auto n = static_cast<double>(n_samples);
    r.success_fraction = static_cast<double>(hits) / n;
    const double b = std::clamp(r.bound, 0.0, 1.0);
    r.slack = 3.0 * std::sqrt(b * (1.0 - b) / n);
    r.holds = r.success_fraction >= r.bound - r.slack;
    return r;
}

// ---------------------------------------------------------------- GAP

GapSampler::GapSampler(SpectralDecomposition basis, const RVector& p, GapMethod method, std::size_t batch)
    : basis_(std::move(basis)), method_(method), batch_(batch) {
    init(p);
}

GapSampler::GapSampler(const DensityMatrix& rho, GapMethod method, std::size_t batch)
    : basis_(eig_hermitian(rho.matrix())), method_(method), batch_(batch) {
    init(basis_.eigenvalues().cwiseMax(0.0));
}

void GapSampler::init(const RVector& p) {
    if (static_cast<std::size_t>(p.size()) != basis_.dim()) throw std::invalid_argument("GapSampler: weight count mismatch");
    if (batch_ == 0) throw std::invalid_argument("GapSampler: batch must be positive");
    const double top = p.size() > 0 ? p.maxCoeff() : 0.0;
    if (!(top > 0.0)) throw std::invalid_argument("GapSampler: density matrix has rank 0");
    double total = 0.0;
    for (Eigen::Index j = 0; j < p.size(); ++j)
        if (p(j) > 1e-14 * top) {
            support_.push_back(j);
            total += p(j);
        }
    const auto r = static_cast<Eigen::Index>(support_.size());
    sqrt_p_.resize(r);
    cum_p_.resize(r);
    double acc = 0.0;
    for (Eigen::Index k = 0; k < r; ++k) {
        const double pk = p(support_[static_cast<std::size_t>(k)]) / total;
        sqrt_p_(k) = std::sqrt(pk);
        acc += pk;
        cum_p_(k) = acc;
    }
}

CVector GapSampler::draw_coefficients(Rng& rng) const {
    const Eigen::Index r = sqrt_p_.size();
    if (method_ == GapMethod::exact_mixture) {
        const double u = rng.uniform() * cum_p_(r - 1);
        const auto k = static_cast<Eigen::Index>(std::lower_bound(cum_p_.data(), cum_p_.data() + r, u) - cum_p_.data());
        CVector z = rng.complex_normal_vector(r);
        const double g2 = -std::log(rng.uniform()) - std::log(rng.uniform());  // Gamma(2, 1)
        z(std::min(k, r - 1)) = std::sqrt(g2) * rng.phase();
        return sqrt_p_.cast<Complex>().cwiseProduct(z);
    }
    std::vector<CVector> cand;
    cand.reserve(batch_);
    std::vector<double> w(batch_);
    double total = 0.0;
    for (std::size_t b = 0; b < batch_; ++b) {
        cand.push_back(sqrt_p_.cast<Complex>().cwiseProduct(rng.complex_normal_vector(r)));
        w[b] = cand.back().squaredNorm();
        total += w[b];
    }
    const double u = rng.uniform() * total;
    double acc = 0.0;
    for (std::size_t b = 0; b < batch_; ++b) {
        acc += w[b];
        if (u < acc) return cand[b];
    }
    return cand.back();
}

PureState GapSampler::sample(std::uint64_t seed, std::uint64_t index) const {
    Rng rng(seed, index);
    const CVector g = draw_coefficients(rng);
    CVector c = CVector::Zero(static_cast<Eigen::Index>(basis_.dim()));
    for (std::size_t k = 0; k < support_.size(); ++k) c(support_[k]) = g(static_cast<Eigen::Index>(k));
    return PureState::from_unnormalized(basis_.from_eigenbasis(c));
}

PureState sample_gap(const DensityMatrix& rho, std::uint64_t seed) { return GapSampler(rho).sample(seed, 0); }

DistanceStats summarize(std::vector<double> v) {
    DistanceStats s;
    s.n = v.size();
    if (v.empty()) return s;
    std::sort(v.begin(), v.end());
    auto q = [&](double f) {
        const double pos = f * static_cast<double>(v.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const std::size_t hi = std::min(lo + 1, v.size() - 1);
        return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
    };
    s.median = q(0.5);
    s.q1 = q(0.25);
    s.q3 = q(0.75);
    double sum = 0.0;
    for (double x : v) sum += x;
    s.mean = sum / static_cast<double>(v.size());
    s.max = v.back();
    return s;
}

CMatrix reduced_spectral_mixture(const SpectralDecomposition& spec, const RVector& p, int n_sites, const SiteSet& keep) {
    if (static_cast<std::size_t>(p.size()) != spec.dim()) throw std::invalid_argument("reduced_spectral_mixture: size");
    if (!spec.is_permutation()) return reduced_mixture(spec.dense(), p, n_sites, keep);
    SpinRegister(n_sites, {}, 62).check_sites(keep);
    SiteSet sorted = keep;
    std::sort(sorted.begin(), sorted.end());
    const auto k = static_cast<Eigen::Index>(pow2(static_cast<int>(sorted.size())));
    CMatrix out = CMatrix::Zero(k, k);
    for (Eigen::Index j = 0; j < p.size(); ++j) {
        const auto idx = static_cast<std::size_t>(spec.basis_index(j));
        std::size_t a = 0;
        for (std::size_t t = 0; t < sorted.size(); ++t)
            if ((idx >> sorted[t]) & 1U) a |= std::size_t{1} << t;
        out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)) += p(j);
    }
    return out;
}

GapProbeReport gap_mite_conjecture_probe(const SpectralDecomposition& spec, double beta,
                                         const std::vector<SiteSet>& regions, std::size_t n_samples,
                                         std::uint64_t seed, int jobs, GapMethod method) {
    if (regions.empty()) throw std::invalid_argument("gap_mite_conjecture_probe: no regions");
    const int n_sites = sites_for_dim(spec.dim());
    const RVector p = gibbs_weights(spec.eigenvalues(), beta);
    const GapSampler sampler(spec, p, method);
    std::vector<CMatrix> ref;
    for (const auto& r : regions) ref.push_back(reduced_spectral_mixture(spec, p, n_sites, r));
    const auto dists = parallel_map(n_samples, jobs, [&](std::size_t i) {
        const PureState psi = sampler.sample(seed, i);
        std::vector<double> d;
        for (std::size_t k = 0; k < regions.size(); ++k)
            d.push_back(trace_norm_distance(reduced_state(psi.amplitudes(), n_sites, regions[k]), ref[k]));
        return d;
    });
    GapProbeReport rep;
    rep.beta = beta;
    rep.regions = regions;
    std::vector<double> worst;
    for (const auto& d : dists) worst.push_back(*std::max_element(d.begin(), d.end()));
    for (std::size_t k = 0; k < regions.size(); ++k) {
        std::vector<double> col;
        for (const auto& d : dists) col.push_back(d[k]);
        rep.per_region.push_back(summarize(std::move(col)));
    }
    rep.worst = summarize(std::move(worst));
    return rep;
}

// ---------------------------------------------------------------- abstract subsystems

MiteMostReport mite_most_estimate(const CVector& psi, std::size_t d0, std::size_t n_subsystems, double epsilon,
                                  std::uint64_t seed, int jobs) {
    const auto d = static_cast<std::size_t>(psi.size());
    if (d == 0 || std::abs(psi.norm() - 1.0) > tol::norm) throw std::invalid_argument("mite_most_estimate: psi not normalized");
    if (!(epsilon > 0.0)) throw std::invalid_argument("mite_most_estimate: epsilon must be positive");
    std::vector<std::size_t> divisors;
    for (std::size_t k = 2; k <= std::min(d0, d); ++k)
        if (d % k == 0) divisors.push_back(k);
    MiteMostReport r;
    r.n_subsystems = n_subsystems;
    if (divisors.empty()) {
        // only the one-dimensional factor: both reduced states equal 1
        r.passes = n_subsystems;
        r.fraction = 1.0;
        r.distances = summarize(std::vector<double>(n_subsystems, 0.0));
        return r;
    }
    const auto dist = parallel_map(n_subsystems, jobs, [&](std::size_t i) {
        Rng rng(seed, i);
        const std::size_t d1 = divisors[rng.below(divisors.size())];
        const HouseholderRotation u = HouseholderRotation::haar(d, rng);
        const CMatrix rho1 = reduced_state_split(u.apply_adjoint(psi), d1);
        const auto k = static_cast<Eigen::Index>(d1);
        return trace_norm_distance(rho1, CMatrix::Identity(k, k) / static_cast<double>(d1));
    });
    for (double x : dist) r.passes += x < epsilon;
    r.fraction = n_subsystems ? static_cast<double>(r.passes) / static_cast<double>(n_subsystems) : 1.0;
    r.distances = summarize(dist);
    return r;
}

Bipartition adversarial_subsystem(const CVector& psi, std::size_t d1, std::uint64_t seed) {
    const auto d = static_cast<std::size_t>(psi.size());
    if (d1 < 2 || d1 > d / 2 || d % d1 != 0)
        throw std::invalid_argument("adversarial_subsystem: need d1 | dim and 2 <= d1 <= dim/2");
    if (std::abs(psi.norm() - 1.0) > tol::norm) throw std::invalid_argument("adversarial_subsystem: psi not normalized");
    Rng rng(seed, 0x616476ULL);
    const std::size_t d2 = d / d1;
    const CVector phi = sample_sphere(static_cast<Eigen::Index>(d1), rng);
    const CVector chi = sample_sphere(static_cast<Eigen::Index>(d2), rng);
    CVector prod(static_cast<Eigen::Index>(d));
    for (std::size_t b = 0; b < d2; ++b)
        for (std::size_t a = 0; a < d1; ++a)
            prod(static_cast<Eigen::Index>(a + d1 * b)) = phi(static_cast<Eigen::Index>(a)) * chi(static_cast<Eigen::Index>(b));
    prod.normalize();
    return Bipartition::split(d, d1).rotated(HouseholderRotation::mapping(prod, psi));
}

// ---------------------------------------------------------------- ensemble equivalence

double solve_beta(const RVector& energies, double target, double tol) {
    if (energies.size() == 0) throw std::invalid_argument("solve_beta: empty spectrum");
    const double lo_e = energies.minCoeff(), hi_e = energies.maxCoeff();
    const double scale = std::max(hi_e - lo_e, 1e-300);
    auto f = [&](double beta) { return gibbs_weights(energies, beta).dot(energies) - target; };
    if (std::abs(f(0.0)) <= 1e-13 * scale) return 0.0;
    if (!(target > lo_e && target < hi_e))
        throw std::runtime_error("solve_beta: target energy outside the open spectral range; no finite beta");
    double lo = -1.0 / scale, hi = 1.0 / scale;
    for (int it = 0; f(lo) < 0.0; ++it) {
        lo *= 2.0;
        if (it > 200) throw std::runtime_error("solve_beta: failed to bracket from below");
    }
    for (int it = 0; f(hi) > 0.0; ++it) {
        hi *= 2.0;
        if (it > 200) throw std::runtime_error("solve_beta: failed to bracket from above");
    }
    for (int it = 0; it < 400 && hi - lo > tol * std::max(1.0, std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) > 0.0 ? lo : hi) = mid;
    }
    const double beta = 0.5 * (lo + hi);
    if (std::abs(f(beta)) > 1e-6 * scale) throw std::runtime_error("solve_beta: bisection did not converge");
    return beta;
}

EnsembleReport ensemble_equivalence_sweep(const SpectralDecomposition& spec, const std::vector<Eigen::Index>& shell_idx,
                                          const std::vector<SiteSet>& regions, double epsilon, double beta_tol) {
    if (shell_idx.empty()) throw std::invalid_argument("ensemble_equivalence_sweep: empty shell");
    const int n_sites = sites_for_dim(spec.dim());
    EnsembleReport rep;
    double e_mc = 0.0;
    for (auto j : shell_idx) e_mc += spec.eigenvalue(j);
    e_mc /= static_cast<double>(shell_idx.size());
    rep.shell_mean_energy = e_mc;
    rep.beta = shell_idx.size() == spec.dim() ? 0.0 : solve_beta(spec.eigenvalues(), e_mc, beta_tol);
    const RVector p = gibbs_weights(spec.eigenvalues(), rep.beta);
    rep.gibbs_mean_energy = p.dot(spec.eigenvalues());
    const Subspace shell = spec.span(shell_idx);
    for (const auto& r : regions) {
        const CMatrix mc = reduced_mc_state(shell, n_sites, r);
        const CMatrix gb = reduced_spectral_mixture(spec, p, n_sites, r);
        rep.rows.push_back({r, diameter(r), trace_norm_distance(mc, gb)});
    }
    std::map<int, double> by_d;
    for (const auto& row : rep.rows) by_d[row.diameter] = std::max(by_d[row.diameter], row.distance);
    rep.max_by_diameter.assign(by_d.begin(), by_d.end());
    rep.ell0 = 0;
    for (const auto& [dm, mx] : rep.max_by_diameter) {
        if (mx >= epsilon) break;
        rep.ell0 = dm;
    }
    return rep;
}

}  // namespace thermeq
