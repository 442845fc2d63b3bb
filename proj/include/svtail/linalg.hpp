#pragma once

#include <vector>

#include "svtail/types.hpp"

namespace svtail {

// Relative tolerance for rank decisions during orthonormalization.
inline constexpr double kRankTolerance = 1e-10;

// Orthonormal basis of a subspace of R^N, built by modified Gram-Schmidt
// with one reorthogonalization pass. Columns whose residual falls below
// `tolerance` times the original column norm are dropped as dependent.
struct SubspaceBasis {
    int ambient_dim = 0;
    RealMatrix q;  // ambient_dim x rank, orthonormal columns
    double tolerance = kRankTolerance;
    int dropped_columns = 0;

    int rank() const { return static_cast<int>(q.cols()); }
};

SubspaceBasis orthonormal_basis(const RealMatrix& b, double tolerance = kRankTolerance);

// Singular values of A in descending order, length min(N, n).
RealVector singular_values(const RealMatrix& a);

inline double smallest_singular_value(const RealMatrix& a) {
    RealVector sv = singular_values(a);
    return sv(sv.size() - 1);
}

// sqrt(sum a_ij^2), the Euclidean norm of the flattened entries.
double hs_norm(const RealMatrix& a);

// || v - P_{colspan(B)} v ||. Rank-deficient B is handled by dropping
// dependent columns. Requires B.cols() < B.rows().
double distance_to_colspan(const RealVector& v, const RealMatrix& b);

// Coordinates of P_{H_{J^c}^perp} A_J in an orthonormal basis of H_{J^c}^perp,
// an (N - n + d) x d matrix W with ||W x|| = dist(A_J x, H_{J^c}).
// Throws DegenerateSample if the complement columns are dependent.
RealMatrix projected_block(const RealMatrix& a, const std::vector<int>& j);

}  // namespace svtail
