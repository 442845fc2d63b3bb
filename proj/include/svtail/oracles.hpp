#pragma once

// Independent reference computations used by the self-test suite and the unit
// tests. Nothing here goes through the sampling or linear-algebra paths it is
// used to check.

#include <array>

#include "svtail/types.hpp"

namespace svtail::oracles {

// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);

// CDF of a chi-square variable with k degrees of freedom at x.
inline double chi_square_cdf(double k, double x) { return gamma_p(k / 2.0, x / 2.0); }

// CDF of a chi variable (norm of a k-dimensional standard normal) at x.
inline double chi_cdf(double k, double x) { return gamma_p(k / 2.0, x * x / 2.0); }

// Standard normal CDF.
double normal_cdf(double x);

// Eigenvalues of a symmetric 3x3 matrix by the closed-form trigonometric
// solution of the characteristic cubic, descending.
std::array<double, 3> symmetric_3x3_eigenvalues(const RealMatrix& s);

// Distance from x to Sparse(k) by exhaustive minimization over all supports
// of size k. Exponential in n; intended for n <= 12.
double dist_to_sparse_exhaustive(const RealVector& x, int k);

// Least-squares residual min_z ||v - B z|| through the normal equations.
double normal_equations_residual(const RealVector& v, const RealMatrix& b);

// log P(Binomial(n, p) >= k), exact summation in log space.
double log_binomial_tail(int n, double p, int k);

// Second moment of one coordinate of the uniform distribution on the unit l1
// ball in dimension d, by quadrature of d * int_0^1 x^2 (1-x)^{d-1} dx.
double ell1_coordinate_second_moment(int d);

}  // namespace svtail::oracles
