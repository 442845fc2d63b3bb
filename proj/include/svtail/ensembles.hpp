#pragma once

#include <memory>
#include <string>

#include "svtail/rng.hpp"
#include "svtail/types.hpp"

namespace svtail {

enum class EnsembleKind {
    Gaussian,        // i.i.d. standard normal entries
    UniformCube,     // i.i.d. uniform on [-sqrt(3), sqrt(3)]
    Laplace,         // i.i.d. Laplace with unit variance
    Ell1Ball,        // uniform on the l1 ball scaled to isotropy
    IndependentColumns,  // matrix-only: independent column draws
    Concatenated,        // matrix-only: independent copies side by side
};

const char* ensemble_kind_name(EnsembleKind kind);
EnsembleKind ensemble_kind_from_name(const std::string& name);

// Declarative description of an isotropic log-concave distribution. Immutable
// after construction; shareable across threads.
class EnsembleSpec {
public:
    static EnsembleSpec gaussian() { return EnsembleSpec(EnsembleKind::Gaussian); }
    static EnsembleSpec uniform_cube() { return EnsembleSpec(EnsembleKind::UniformCube); }
    static EnsembleSpec laplace() { return EnsembleSpec(EnsembleKind::Laplace); }
    static EnsembleSpec ell1_ball() { return EnsembleSpec(EnsembleKind::Ell1Ball); }
    static EnsembleSpec independent_columns(EnsembleSpec column_spec);

    EnsembleKind kind() const { return kind_; }
    // Column spec for IndependentColumns, base spec for Concatenated.
    const EnsembleSpec& inner() const;
    int copies() const { return copies_; }
    int base_rows() const { return base_rows_; }
    int base_cols() const { return base_cols_; }

    // True for kinds that define a distribution over vectors.
    bool vector_compatible() const {
        return kind_ != EnsembleKind::IndependentColumns && kind_ != EnsembleKind::Concatenated;
    }

    friend EnsembleSpec make_concatenated(const EnsembleSpec& spec, int N, int n);

private:
    explicit EnsembleSpec(EnsembleKind kind) : kind_(kind) {}

    EnsembleKind kind_;
    std::shared_ptr<const EnsembleSpec> inner_;
    int copies_ = 0;
    int base_rows_ = 0;
    int base_cols_ = 0;
};

// One draw of the n-dimensional law. Deterministic given seed.
RealVector sample_vector(const EnsembleSpec& spec, int n, RandomSeed seed);

// One draw of the N x n matrix law (the entries jointly form one draw of the
// Nn-dimensional law; IndependentColumns draws columns independently).
RealMatrix sample_matrix(const EnsembleSpec& spec, int N, int n, RandomSeed seed);

// Spec whose samples are N x (n*floor(N/n)) matrices built from floor(N/n)
// independent N x n draws of `spec` placed side by side. Requires N >= 2n.
EnsembleSpec make_concatenated(const EnsembleSpec& spec, int N, int n);

struct IsotropyReport {
    double max_cov_deviation = 0.0;  // max |Cov_hat_ij - delta_ij|
    double max_mean_abs = 0.0;       // max |mean_i|
    long long trials = 0;
};

// Empirical check of the zero-mean / identity-covariance contract.
IsotropyReport isotropy_report(const EnsembleSpec& spec, int n, long long trials, RandomSeed seed);

namespace detail {
// Samplers driven by an already-positioned generator; used internally so a
// single stream can produce several independent draws.
RealVector sample_vector_with(const EnsembleSpec& spec, int n, CounterRng& rng);
RealMatrix sample_matrix_with(const EnsembleSpec& spec, int N, int n, CounterRng& rng);
}  // namespace detail

}  // namespace svtail
