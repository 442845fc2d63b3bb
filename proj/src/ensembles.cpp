#include "svtail/ensembles.hpp"

#include <cmath>
#include <stdexcept>

namespace svtail {

const char* ensemble_kind_name(EnsembleKind kind) {
    switch (kind) {
        case EnsembleKind::Gaussian: return "gaussian";
        case EnsembleKind::UniformCube: return "uniform_cube";
        case EnsembleKind::Laplace: return "laplace";
        case EnsembleKind::Ell1Ball: return "ell1_ball";
        case EnsembleKind::IndependentColumns: return "independent_columns";
        case EnsembleKind::Concatenated: return "concatenated";
    }
    throw std::logic_error("unreachable ensemble kind");
}

EnsembleKind ensemble_kind_from_name(const std::string& name) {
    if (name == "gaussian") return EnsembleKind::Gaussian;
    if (name == "uniform_cube") return EnsembleKind::UniformCube;
    if (name == "laplace") return EnsembleKind::Laplace;
    if (name == "ell1_ball") return EnsembleKind::Ell1Ball;
    if (name == "independent_columns") return EnsembleKind::IndependentColumns;
    if (name == "concatenated") return EnsembleKind::Concatenated;
    throw std::invalid_argument("unknown ensemble kind: " + name);
}

EnsembleSpec EnsembleSpec::independent_columns(EnsembleSpec column_spec) {
    if (!column_spec.vector_compatible()) {
        throw std::invalid_argument("independent_columns requires a vector-compatible column spec");
    }
    EnsembleSpec spec(EnsembleKind::IndependentColumns);
    spec.inner_ = std::make_shared<EnsembleSpec>(std::move(column_spec));
    return spec;
}

const EnsembleSpec& EnsembleSpec::inner() const {
    if (!inner_) throw std::logic_error("spec has no inner spec");
    return *inner_;
}

EnsembleSpec make_concatenated(const EnsembleSpec& spec, int N, int n) {
    if (N < 2 * n) throw std::invalid_argument("make_concatenated requires N >= 2n");
    if (N < 1 || n < 1) throw std::invalid_argument("dimensions must be positive");
    EnsembleSpec out(EnsembleKind::Concatenated);
    out.inner_ = std::make_shared<EnsembleSpec>(spec);
    out.copies_ = N / n;
    out.base_rows_ = N;
    out.base_cols_ = n;
    return out;
}

namespace {

// Uniform draw from the unit l1 ball in R^d scaled by r_d so that every
// coordinate has unit variance: direction (xi_i E_i)/sum E_j with i.i.d.
// exponentials E and uniform signs xi, radius U^{1/d},
// r_d = sqrt((d+1)(d+2)/2).
void fill_ell1_ball(double* out, int d, CounterRng& rng) {
    double sum = 0.0;
    for (int i = 0; i < d; ++i) {
        out[i] = rng.next_exponential();
        sum += out[i];
    }
    double radius = std::pow(rng.next_double_open(), 1.0 / d);
    double r_d = std::sqrt(0.5 * (d + 1.0) * (d + 2.0));
    double scale = r_d * radius / sum;
    for (int i = 0; i < d; ++i) out[i] *= rng.next_sign() * scale;
}

void fill_iid(double* out, long long count, EnsembleKind kind, CounterRng& rng) {
    static const double kCubeHalfWidth = std::sqrt(3.0);
    static const double kLaplaceScale = 1.0 / std::sqrt(2.0);
    switch (kind) {
        case EnsembleKind::Gaussian:
            for (long long i = 0; i < count; ++i) out[i] = rng.next_gaussian();
            return;
        case EnsembleKind::UniformCube:
            for (long long i = 0; i < count; ++i)
                out[i] = rng.next_uniform(-kCubeHalfWidth, kCubeHalfWidth);
            return;
        case EnsembleKind::Laplace:
            for (long long i = 0; i < count; ++i)
                out[i] = rng.next_sign() * kLaplaceScale * rng.next_exponential();
            return;
        default:
            throw std::logic_error("fill_iid: not a product kind");
    }
}

}  // namespace

namespace detail {

RealVector sample_vector_with(const EnsembleSpec& spec, int n, CounterRng& rng) {
    if (n < 1) throw std::invalid_argument("sample_vector requires n >= 1");
    if (!spec.vector_compatible()) {
        throw std::invalid_argument("sample_vector requires a vector-compatible ensemble kind");
    }
    RealVector x(n);
    if (spec.kind() == EnsembleKind::Ell1Ball) {
        fill_ell1_ball(x.data(), n, rng);
    } else {
        fill_iid(x.data(), n, spec.kind(), rng);
    }
    return x;
}

RealMatrix sample_matrix_with(const EnsembleSpec& spec, int N, int n, CounterRng& rng) {
    if (N < 1 || n < 1) throw std::invalid_argument("sample_matrix requires N, n >= 1");
    switch (spec.kind()) {
        case EnsembleKind::Gaussian:
        case EnsembleKind::UniformCube:
        case EnsembleKind::Laplace: {
            RealMatrix a(N, n);
            fill_iid(a.data(), static_cast<long long>(N) * n, spec.kind(), rng);
            return a;
        }
        case EnsembleKind::Ell1Ball: {
            // The matrix is one draw of the Nn-dimensional law.
            RealMatrix a(N, n);
            fill_ell1_ball(a.data(), N * n, rng);
            return a;
        }
        case EnsembleKind::IndependentColumns: {
            RealMatrix a(N, n);
            for (int j = 0; j < n; ++j) a.col(j) = sample_vector_with(spec.inner(), N, rng);
            return a;
        }
        case EnsembleKind::Concatenated: {
            int s = spec.copies();
            if (N != spec.base_rows() || n != spec.base_cols() * s) {
                throw std::invalid_argument("concatenated spec produces " +
                                            std::to_string(spec.base_rows()) + "x" +
                                            std::to_string(spec.base_cols() * s) + " matrices");
            }
            RealMatrix a(N, n);
            for (int b = 0; b < s; ++b) {
                a.middleCols(b * spec.base_cols(), spec.base_cols()) =
                    sample_matrix_with(spec.inner(), spec.base_rows(), spec.base_cols(), rng);
            }
            return a;
        }
    }
    throw std::logic_error("unreachable ensemble kind");
}

}  // namespace detail

RealVector sample_vector(const EnsembleSpec& spec, int n, RandomSeed seed) {
    CounterRng rng(seed);
    return detail::sample_vector_with(spec, n, rng);
}

RealMatrix sample_matrix(const EnsembleSpec& spec, int N, int n, RandomSeed seed) {
    CounterRng rng(seed);
    return detail::sample_matrix_with(spec, N, n, rng);
}

IsotropyReport isotropy_report(const EnsembleSpec& spec, int n, long long trials, RandomSeed seed) {
    if (trials < 2) throw std::invalid_argument("isotropy_report requires trials >= 2");
    RealVector mean = RealVector::Zero(n);
    RealMatrix second = RealMatrix::Zero(n, n);
    for (long long t = 0; t < trials; ++t) {
        RealVector x = sample_vector(spec, n, RandomSeed{seed.master, seed.stream + static_cast<std::uint64_t>(t)});
        mean += x;
        second.selfadjointView<Eigen::Lower>().rankUpdate(x);
    }
    mean /= static_cast<double>(trials);
    second /= static_cast<double>(trials);
    RealMatrix cov = RealMatrix(second.selfadjointView<Eigen::Lower>()) - mean * mean.transpose();

    IsotropyReport report;
    report.trials = trials;
    report.max_mean_abs = mean.cwiseAbs().maxCoeff();
    report.max_cov_deviation = (cov - RealMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
    return report;
}

}  // namespace svtail
