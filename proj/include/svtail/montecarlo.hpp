#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "svtail/ensembles.hpp"
#include "svtail/geometry.hpp"
#include "svtail/types.hpp"

namespace svtail {

// Monte Carlo estimate of one event probability.
struct TailEstimate {
    long long trials = 0;
    long long successes = 0;
    long long discarded_degenerate = 0;
    std::uint64_t master_seed = 0;

    double p_hat() const { return trials > 0 ? static_cast<double>(successes) / trials : 0.0; }
    // 95% Wilson score interval.
    double ci_low() const;
    double ci_high() const;
    // 3/trials, reported when no events were observed.
    std::optional<double> rule_of_three() const;

    // Pooling of runs over disjoint streams; associative and commutative.
    static TailEstimate merge(const TailEstimate& a, const TailEstimate& b);
};

enum class Normalization {
    Absolute,  // t
    SqrtN,     // t * sqrt(N)
    InvSqrtN,  // t / sqrt(n)
    Gap,       // t * (sqrt(N+1) - sqrt(n))
};

const char* normalization_name(Normalization norm);
Normalization normalization_from_name(const std::string& name);
double resolve_threshold(Normalization norm, double t, int big_n, int n);

// ---- Tail estimators ------------------------------------------------------
// Thresholds are absolute here; normalization is applied by the caller.
// All estimators derive per-trial seeds from (seed.master, trial index), so
// results are independent of the thread count.

// P(sigma_min(A) <= t) for each threshold (nested events share samples).
std::vector<TailEstimate> estimate_sv_tail(const EnsembleSpec& spec, int big_n, int n,
                                           const std::vector<double>& thresholds, long long trials,
                                           RandomSeed seed, int threads);

// P(||X - y|| <= eps sqrt(n)).
TailEstimate estimate_smallball(const EnsembleSpec& spec, int n, double epsilon,
                                const RealVector& y, long long trials, RandomSeed seed,
                                int threads);

// P(||X|| >= C t sqrt(n)).
TailEstimate estimate_paouris(const EnsembleSpec& spec, int n, double t, double paouris_c,
                              long long trials, RandomSeed seed, int threads);

// P(L(A) <= t), with L(A) = min over supports S of size ceil(delta n) of
// sigma_min(A_S) - rho sigma_max(A), a certified lower-bound surrogate for
// inf over Comp(delta, rho) of ||A x||. Exhaustive supports; requires n <= 14.
TailEstimate estimate_comp_inf_tail(const EnsembleSpec& spec, int big_n, int n, double delta,
                                    double rho, double t, long long trials, RandomSeed seed,
                                    int threads);

// P(dist(A_1, H_1) < eps) for a square sample, per epsilon (nested events).
std::vector<TailEstimate> estimate_distance_tail(const EnsembleSpec& spec, int n,
                                                 const std::vector<double>& epsilons,
                                                 long long trials, RandomSeed seed, int threads);

// P(|X*_{ceil(n(1-c1))}| <= r) with X* the decreasing rearrangement by
// absolute value.
TailEstimate estimate_order_stat(const EnsembleSpec& spec, int n, double c1, double r,
                                 long long trials, RandomSeed seed, int threads);

struct ProjectedTailResult {
    std::vector<TailEstimate> sv_tail;       // P(sigma_min(W) <= t sqrt(2d-1))
    std::vector<TailEstimate> fixed_x_tail;  // P(||W x|| <= t sqrt(2d-1))
    int codimension = 0;                     // 2d - 1
    long long codimension_failures = 0;      // basis dimension mismatches
};

// Projected block W = P_{H_{J^c}^perp} A_J with |J| = d = N - n + 1.
// x is a fixed unit vector (uniform spread by default).
ProjectedTailResult estimate_projected_sv_tail(const EnsembleSpec& spec, int big_n, int n,
                                               const std::vector<int>& j,
                                               const std::vector<double>& thresholds,
                                               long long trials, RandomSeed seed, int threads,
                                               const RealVector* fixed_x = nullptr);

struct EventCoverReport {
    long long samples = 0;
    long long violations = 0;
    long long discarded_degenerate = 0;
    long long event_count = 0;  // how often the small-infimum event fired
    bool ok() const { return violations == 0; }
};

// Pointwise check that {inf over a sampled spread set of ||Wx|| <= eps sqrt(d)}
// is contained in E_1 ∪ (∪_i E_2,i) ∪ E_3 given the HS-norm bands with
// constant C_1 >= 1.
EventCoverReport verify_event_cover(const EnsembleSpec& spec, int big_n, int n, double epsilon,
                                    double c1, long long trials, RandomSeed seed, int threads,
                                    int spread_samples_per_trial = 32);

struct MomentReport {
    double empirical_mean = 0.0;
    double bound = 0.0;       // (eps^2 / n) ||A||_HS^2
    double std_error = 0.0;   // empirical standard error of the mean
    long long trials = 0;
    bool ok() const { return empirical_mean <= bound + 3.0 * std_error; }
};

// Second-moment bound: mean of ||A(y - eta_y)||^2 over draws against
// (eps^2/n) ||A||_HS^2 + 3 standard errors.
MomentReport verify_rounding_moment(const RealMatrix& a, const RealVector& y, double epsilon,
                                    long long trials, RandomSeed seed);

struct SparsityReport {
    TailEstimate in_sparse;  // P(eta_y in Sparse(m))
    int m = 0;
    double required = 0.70;
    bool ok() const { return in_sparse.p_hat() >= required; }
};

// Empirical P(eta_y in Sparse(m)) for the rounding of y under params.
SparsityReport verify_sparsity_prob(const RealVector& y, const DecompositionParams& params,
                                    RandomSeed seed, long long trials);

// ---- Helpers shared by experiments and tests ------------------------------

// Unit vector at l2 distance <= 0.9 rho from Sparse(floor(delta n)); always
// classifies Comp.
RealVector random_compressible_unit(int n, double delta, double rho, CounterRng& rng);

// Uniform on the unit sphere.
RealVector random_unit_vector(int n, CounterRng& rng);

// Uniform on the sphere conditioned on being spread (rejection sampling).
RealVector random_spread_unit(int d, const SpreadParams& params, CounterRng& rng);

}  // namespace svtail
