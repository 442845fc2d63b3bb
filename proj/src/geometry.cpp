#include "svtail/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "svtail/linalg.hpp"

namespace svtail {

int DecompositionParams::sparsity_budget() const {
    if (n < 1) throw std::invalid_argument("DecompositionParams: n must be positive");
    if (delta <= 0.0 || delta >= 1.0) throw std::invalid_argument("DecompositionParams: delta must be in (0,1)");
    if (rho <= 0.0 || rho >= 1.0) throw std::invalid_argument("DecompositionParams: rho must be in (0,1)");
    if (epsilon <= 0.0 || epsilon > 0.5) throw std::invalid_argument("DecompositionParams: epsilon must be in (0,1/2]");
    double tail_terms = n * rho * rho / (epsilon * epsilon) + 4.0 * n * rho / epsilon;
    long long m = static_cast<long long>(std::ceil(delta * n)) +
                  static_cast<long long>(std::ceil(tail_terms));
    return static_cast<int>(std::min<long long>(m, n));
}

DecompositionParams DecompositionParams::square_regime(double delta, double epsilon, int n) {
    DecompositionParams p;
    p.delta = delta;
    p.epsilon = epsilon;
    p.rho = (1.0 - delta) * epsilon / 5.0;
    p.n = n;
    return p;
}

double dist_to_sparse(const RealVector& x, int k) {
    const int n = static_cast<int>(x.size());
    if (k < 0 || k > n) throw std::invalid_argument("dist_to_sparse: k must be in [0, n]");
    if (k == n) return 0.0;
    std::vector<double> squares(n);
    for (int i = 0; i < n; ++i) squares[i] = x(i) * x(i);
    // The n-k smallest squared magnitudes are what remains after zeroing the
    // best support of size k.
    std::nth_element(squares.begin(), squares.begin() + k, squares.end(), std::greater<double>());
    double tail = 0.0;
    for (int i = k; i < n; ++i) tail += squares[i];
    return std::sqrt(tail);
}

Compressibility classify_compressible(const RealVector& x, double delta, double rho) {
    if (std::abs(x.norm() - 1.0) > kUnitTolerance) {
        throw std::invalid_argument("classify_compressible: x must be a unit vector");
    }
    int k = static_cast<int>(std::floor(delta * static_cast<double>(x.size())));
    return dist_to_sparse(x, k) <= rho ? Compressibility::Comp : Compressibility::Incomp;
}

namespace detail {

RoundingOutcome random_round_with(const RealVector& y, double epsilon, CounterRng& rng) {
    if (epsilon <= 0.0) throw std::invalid_argument("random_round: epsilon must be positive");
    const int n = static_cast<int>(y.size());
    const double spacing = epsilon / std::sqrt(static_cast<double>(n));
    RoundingOutcome out;
    out.eta.resize(n);
    out.fractional_parts.resize(n);
    for (int i = 0; i < n; ++i) {
        double t = y(i) / spacing;
        double k = std::floor(t);
        double p = t - k;
        out.fractional_parts[i] = p;
        double up = (p > 0.0 && rng.next_double() < p) ? 1.0 : 0.0;
        out.eta(i) = spacing * (k + up);
        if (out.eta(i) != 0.0) ++out.support_size;
    }
    return out;
}

}  // namespace detail

RoundingOutcome random_round(const RealVector& y, double epsilon, RandomSeed seed) {
    CounterRng rng(seed);
    return detail::random_round_with(y, epsilon, rng);
}

RoundingOutcome rounding_approximation(const RealVector& x, const RealMatrix& a, double epsilon,
                                       RandomSeed seed, int max_attempts) {
    if (epsilon <= 0.0 || epsilon >= 0.05) {
        throw std::invalid_argument("rounding_approximation: epsilon must be in (0, 0.05)");
    }
    if (max_attempts < 1) throw std::invalid_argument("rounding_approximation: max_attempts must be >= 1");
    if (a.cols() != x.size()) throw std::invalid_argument("rounding_approximation: dimension mismatch");
    const double n = static_cast<double>(x.size());
    const double budget = 2.0 * epsilon / std::sqrt(n) * hs_norm(a);
    CounterRng rng(seed);
    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
        RoundingOutcome out = detail::random_round_with(x, epsilon, rng);
        if ((a * (x - out.eta)).norm() <= budget) {
            out.attempts = attempt;
            return out;
        }
    }
    throw std::runtime_error("rounding_approximation: exhausted max_attempts");
}

bool sparse_net_contains(const RealVector& z, double epsilon, int m) {
    const int n = static_cast<int>(z.size());
    if (epsilon <= 0.0) throw std::invalid_argument("sparse_net_contains: epsilon must be positive");
    if (m < 0 || m > n) throw std::invalid_argument("sparse_net_contains: m must be in [0, n]");
    const double spacing = epsilon / std::sqrt(static_cast<double>(n));
    int support = 0;
    for (int i = 0; i < n; ++i) {
        double t = z(i) / spacing;
        double k = std::round(t);
        if (std::abs(t - k) > kLatticeTolerance) return false;
        if (k != 0.0) ++support;
    }
    if (support > m) return false;
    return z.norm() <= (1.0 + epsilon) * (1.0 + kLatticeTolerance);
}

NetSizeBound sparse_net_size_bound(int n, double delta, double rho, double epsilon, double c_net) {
    if (c_net <= 0.0) throw std::invalid_argument("sparse_net_size_bound: C_net must be positive");
    DecompositionParams params{delta, rho, epsilon, n};
    NetSizeBound out;
    out.m = params.sparsity_budget();
    double log_base = std::log(c_net) - 1.5 * std::log(delta) - std::log(epsilon);
    out.log_bound = out.m * log_base;
    out.bound = std::exp(out.log_bound);  // +inf when it overflows
    return out;
}

namespace {

// Depth-first walk over lattice coordinates with a squared-norm budget and a
// support budget.
std::uint64_t count_net_points(int coord, int n, double spacing, double norm_sq_left,
                               int support_left, int m) {
    if (coord == n) return 1;
    std::uint64_t total = 0;
    // k = 0 always fits the remaining budget.
    total += count_net_points(coord + 1, n, spacing, norm_sq_left, support_left, m);
    if (support_left == 0) return total;
    int k_max = static_cast<int>(std::floor(std::sqrt(norm_sq_left) / spacing + kLatticeTolerance));
    for (int k = 1; k <= k_max; ++k) {
        double used = static_cast<double>(k) * k * spacing * spacing;
        if (used > norm_sq_left) break;
        // +k and -k are distinct points with the same budget use.
        total += 2 * count_net_points(coord + 1, n, spacing, norm_sq_left - used,
                                      support_left - 1, m);
    }
    return total;
}

}  // namespace

std::uint64_t enumerate_sparse_net_count(int n, double delta, double rho, double epsilon) {
    if (n > 8) throw std::invalid_argument("enumerate_sparse_net_count: guarded to n <= 8");
    DecompositionParams params{delta, rho, epsilon, n};
    int m = params.sparsity_budget();
    double spacing = epsilon / std::sqrt(static_cast<double>(n));
    double radius = 1.0 + epsilon;
    return count_net_points(0, n, spacing, radius * radius, m, m);
}

std::optional<std::vector<int>> spread_witness(const RealVector& x, double delta, double rho) {
    if (classify_compressible(x, delta, rho) == Compressibility::Comp) {
        throw std::invalid_argument("spread_witness: input is compressible");
    }
    const int n = static_cast<int>(x.size());
    const double lo = rho / std::sqrt(2.0 * n);
    const double hi = 1.0 / std::sqrt(delta * n);
    std::vector<int> j;
    for (int i = 0; i < n; ++i) {
        double mag = std::abs(x(i));
        if (mag >= lo && mag <= hi) j.push_back(i);
    }
    if (static_cast<double>(j.size()) < rho * rho * delta * n / 2.0) return std::nullopt;
    return j;
}

bool is_spread(const RealVector& v, const SpreadParams& params) {
    const int d = static_cast<int>(v.size());
    if (params.d != 0 && params.d != d) throw std::invalid_argument("is_spread: dimension mismatch");
    if (params.c_lo <= 0.0 || params.c_lo > params.c_hi) {
        throw std::invalid_argument("is_spread: requires 0 < c_lo <= c_hi");
    }
    const double lo = params.c_lo / std::sqrt(static_cast<double>(d));
    const double hi = params.c_hi / std::sqrt(static_cast<double>(d));
    for (int i = 0; i < d; ++i) {
        double mag = std::abs(v(i));
        if (mag < lo || mag > hi) return false;
    }
    return true;
}

}  // namespace svtail
