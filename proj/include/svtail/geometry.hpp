#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "svtail/rng.hpp"
#include "svtail/types.hpp"

namespace svtail {

// Absolute tolerance on coordinate/spacing ratios for lattice membership.
inline constexpr double kLatticeTolerance = 1e-12;

// Tolerance for "unit vector" preconditions.
inline constexpr double kUnitTolerance = 1e-10;

// Parameters of the compressible/incompressible decomposition and of the
// sparse rounding net.
struct DecompositionParams {
    double delta = 0.0;    // in (0,1)
    double rho = 0.0;      // in (0,1)
    double epsilon = 0.0;  // in (0, 1/2]
    int n = 0;

    // m = ceil(delta n) + ceil(n rho^2/eps^2 + 4 n rho/eps), clamped to n
    // (support size cannot exceed the dimension). Always recomputed.
    int sparsity_budget() const;

    // rho = (1 - delta) * epsilon / 5, which keeps m < (1 + delta) n / 2.
    static DecompositionParams square_regime(double delta, double epsilon, int n);
};

struct RoundingOutcome {
    RealVector eta;                       // on the lattice (eps/sqrt(n)) Z^n
    int support_size = 0;                 // nonzero coordinates of eta
    std::vector<double> fractional_parts; // p_i in [0,1)
    int attempts = 1;
};

struct SpreadParams {
    double c_lo = 0.1;
    double c_hi = 10.0;
    int d = 0;
};

enum class Compressibility { Comp, Incomp };

// Euclidean distance from x to the set of vectors with at most k nonzero
// coordinates: the l2 norm of the n-k smallest-magnitude coordinates.
double dist_to_sparse(const RealVector& x, int k);

// Comp iff dist(x, Sparse(floor(delta n))) <= rho; requires x unit.
Compressibility classify_compressible(const RealVector& x, double delta, double rho);

// Per-coordinate randomized snap of y to the lattice (eps/sqrt(n)) Z^n,
// unbiased and within eps/sqrt(n) of y in sup norm on every draw.
RoundingOutcome random_round(const RealVector& y, double epsilon, RandomSeed seed);

// Repeats random_round until ||A (x - eta)|| <= (2 eps / sqrt(n)) ||A||_HS.
// Each attempt succeeds with probability > 1/2; throws if max_attempts
// is exhausted. Requires eps in (0, 0.05).
RoundingOutcome rounding_approximation(const RealVector& x, const RealMatrix& a, double epsilon,
                                       RandomSeed seed, int max_attempts);

// Membership in the net (eps/sqrt(n)) Z^n  ∩  Sparse(m)  ∩  (1+eps) B_2^n.
bool sparse_net_contains(const RealVector& z, double epsilon, int m);

struct NetSizeBound {
    double bound = 0.0;      // (C_net / (delta^{3/2} eps))^m; +inf on overflow
    double log_bound = 0.0;  // natural log, always finite
    int m = 0;
};

NetSizeBound sparse_net_size_bound(int n, double delta, double rho, double epsilon, double c_net);

// Exhaustive cardinality of the net above; guarded to n <= 8.
std::uint64_t enumerate_sparse_net_count(int n, double delta, double rho, double epsilon);

// J = { i : rho/sqrt(2n) <= |x_i| <= 1/sqrt(delta n) } for incompressible
// unit x; empty optional if |J| < rho^2 delta n / 2 (which would falsify the
// spread guarantee). Throws on compressible input.
std::optional<std::vector<int>> spread_witness(const RealVector& x, double delta, double rho);

// True iff every |v_i| lies in [c_lo/sqrt(d), c_hi/sqrt(d)]; requires v unit.
bool is_spread(const RealVector& v, const SpreadParams& params);

namespace detail {
RoundingOutcome random_round_with(const RealVector& y, double epsilon, CounterRng& rng);
}

}  // namespace svtail
