#include "svtail/linalg.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace svtail {

namespace {

void require_finite(const RealMatrix& a, const char* what) {
    if (!a.allFinite()) throw std::invalid_argument(std::string(what) + ": non-finite entries");
}

// Orthogonalize v against the first `count` columns of q, twice.
void orthogonalize_against(RealVector& v, const RealMatrix& q, int count) {
    for (int pass = 0; pass < 2; ++pass) {
        for (int i = 0; i < count; ++i) {
            v -= q.col(i).dot(v) * q.col(i);
        }
    }
}

}  // namespace

SubspaceBasis orthonormal_basis(const RealMatrix& b, double tolerance) {
    require_finite(b, "orthonormal_basis");
    SubspaceBasis basis;
    basis.ambient_dim = static_cast<int>(b.rows());
    basis.tolerance = tolerance;
    basis.q.resize(b.rows(), b.cols());
    int rank = 0;
    for (int j = 0; j < b.cols(); ++j) {
        RealVector v = b.col(j);
        double original_norm = v.norm();
        orthogonalize_against(v, basis.q, rank);
        double residual = v.norm();
        if (residual <= tolerance * std::max(original_norm, 1e-300)) {
            ++basis.dropped_columns;
            continue;
        }
        basis.q.col(rank) = v / residual;
        ++rank;
    }
    basis.q.conservativeResize(Eigen::NoChange, rank);
    return basis;
}

RealVector singular_values(const RealMatrix& a) {
    require_finite(a, "singular_values");
    if (std::min(a.rows(), a.cols()) <= 16) {
        return Eigen::JacobiSVD<RealMatrix>(a).singularValues();
    }
    return Eigen::BDCSVD<RealMatrix>(a).singularValues();
}

double hs_norm(const RealMatrix& a) {
    require_finite(a, "hs_norm");
    return a.norm();
}

double distance_to_colspan(const RealVector& v, const RealMatrix& b) {
    if (v.size() != b.rows()) throw std::invalid_argument("distance_to_colspan: dimension mismatch");
    if (b.cols() >= b.rows()) throw std::invalid_argument("distance_to_colspan: requires k < N");
    require_finite(b, "distance_to_colspan");
    SubspaceBasis basis = orthonormal_basis(b);
    RealVector residual = v;
    orthogonalize_against(residual, basis.q, basis.rank());
    return residual.norm();
}

RealMatrix projected_block(const RealMatrix& a, const std::vector<int>& j) {
    require_finite(a, "projected_block");
    const int n = static_cast<int>(a.cols());
    const int big_n = static_cast<int>(a.rows());
    const int d = static_cast<int>(j.size());
    if (d < 1) throw std::invalid_argument("projected_block: J must be non-empty");
    std::vector<bool> in_j(n, false);
    for (int idx : j) {
        if (idx < 0 || idx >= n) throw std::invalid_argument("projected_block: index out of range");
        if (in_j[idx]) throw std::invalid_argument("projected_block: repeated index in J");
        in_j[idx] = true;
    }

    RealMatrix a_jc(big_n, n - d);
    RealMatrix a_j(big_n, d);
    int cj = 0, cjc = 0;
    for (int col = 0; col < n; ++col) {
        if (in_j[col]) a_j.col(cj++) = a.col(col);
        else a_jc.col(cjc++) = a.col(col);
    }

    SubspaceBasis complement_span = orthonormal_basis(a_jc);
    if (complement_span.rank() != n - d) {
        throw DegenerateSample("projected_block: columns of A_{J^c} are linearly dependent");
    }

    // Extend the span basis to a full orthonormal basis of R^N; the extension
    // columns span H_{J^c}^perp.
    const int codim = big_n - (n - d);
    RealMatrix q(big_n, big_n);
    q.leftCols(n - d) = complement_span.q;
    int rank = n - d;
    for (int e = 0; e < big_n && rank < big_n; ++e) {
        RealVector v = RealVector::Unit(big_n, e);
        orthogonalize_against(v, q, rank);
        double residual = v.norm();
        if (residual <= kRankTolerance) continue;
        q.col(rank) = v / residual;
        ++rank;
    }
    if (rank != big_n) throw std::logic_error("projected_block: basis completion failed");

    return q.middleCols(n - d, codim).transpose() * a_j;
}

}  // namespace svtail
