#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <vector>

namespace thermeq {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

/// Sorted list of distinct lattice sites.
using SiteSet = std::vector<int>;

/// Numerical tolerances shared by the structural invariants of all carriers.
namespace tol {
inline constexpr double hermitian = 1e-10;
inline constexpr double norm = 1e-10;
inline constexpr double trace = 1e-10;
inline constexpr double positivity = -1e-8;
inline constexpr double orthonormal = 1e-8;
inline constexpr double cluster = 1e-8;
}  // namespace tol

/// Largest |a(i,j)| over all entries; 0 for empty matrices.
inline double max_abs(const CMatrix& a) {
    return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

inline double hermiticity_error(const CMatrix& a) {
    return max_abs(a - a.adjoint());
}

/// Number of sites n with 2^n == dim; throws if dim is not a power of two.
int sites_for_dim(std::size_t dim);

inline std::size_t pow2(int n) { return std::size_t{1} << n; }

}  // namespace thermeq
