#include "svtail/oracles.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace svtail::oracles {

namespace {

// Series expansion, converges fast for x < a + 1.
double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int i = 0; i < 1000; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a, x), converges fast for x >= a + 1.
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 1000; ++i) {
        double an = -static_cast<double>(i) * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_p(double a, double x) {
    if (a <= 0.0) throw std::invalid_argument("gamma_p: a must be positive");
    if (x < 0.0) throw std::invalid_argument("gamma_p: x must be non-negative");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_cf(a, x);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

std::array<double, 3> symmetric_3x3_eigenvalues(const RealMatrix& s) {
    if (s.rows() != 3 || s.cols() != 3) throw std::invalid_argument("expected a 3x3 matrix");
    // Shift and scale so the problem becomes the cubic for a trace-free
    // matrix, then use the trigonometric root formula.
    double q = s.trace() / 3.0;
    RealMatrix b = s - q * RealMatrix::Identity(3, 3);
    double p2 = b.squaredNorm() / 6.0;
    double p = std::sqrt(p2);
    if (p < 1e-300) return {q, q, q};
    double det_b = b.determinant();
    double r = det_b / (2.0 * p * p * p);
    r = std::clamp(r, -1.0, 1.0);
    double phi = std::acos(r) / 3.0;
    double e1 = q + 2.0 * p * std::cos(phi);
    double e3 = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
    double e2 = 3.0 * q - e1 - e3;
    std::array<double, 3> out{e1, e2, e3};
    if (out[0] < out[1]) std::swap(out[0], out[1]);
    if (out[1] < out[2]) std::swap(out[1], out[2]);
    if (out[0] < out[1]) std::swap(out[0], out[1]);
    return out;
}

namespace {

void best_support_norm(const RealVector& x, int start, int chosen, int k, double kept_sq,
                       double& best_tail_sq) {
    const int n = static_cast<int>(x.size());
    if (chosen == k) {
        double total = x.squaredNorm();
        best_tail_sq = std::min(best_tail_sq, total - kept_sq);
        return;
    }
    if (n - start < k - chosen) return;
    best_support_norm(x, start + 1, chosen + 1, k, kept_sq + x(start) * x(start), best_tail_sq);
    best_support_norm(x, start + 1, chosen, k, kept_sq, best_tail_sq);
}

}  // namespace

double dist_to_sparse_exhaustive(const RealVector& x, int k) {
    const int n = static_cast<int>(x.size());
    if (k < 0 || k > n) throw std::invalid_argument("dist_to_sparse_exhaustive: bad k");
    if (k == n) return 0.0;
    double best_tail_sq = x.squaredNorm();
    if (k > 0) best_support_norm(x, 0, 0, k, 0.0, best_tail_sq);
    return std::sqrt(std::max(0.0, best_tail_sq));
}

double normal_equations_residual(const RealVector& v, const RealMatrix& b) {
    RealMatrix gram = b.transpose() * b;
    RealVector z = gram.ldlt().solve(b.transpose() * v);
    return (v - b * z).norm();
}

double log_binomial_tail(int n, double p, int k) {
    if (k <= 0) return 0.0;
    if (k > n) return -std::numeric_limits<double>::infinity();
    // Sum C(n, i) p^i (1-p)^(n-i) for i >= k in log space.
    double log_p = std::log(p);
    double log_1p = std::log1p(-p);
    double max_term = -std::numeric_limits<double>::infinity();
    std::vector<double> terms;
    for (int i = k; i <= n; ++i) {
        double lt = std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) +
                    i * log_p + (n - i) * log_1p;
        terms.push_back(lt);
        max_term = std::max(max_term, lt);
    }
    double sum = 0.0;
    for (double lt : terms) sum += std::exp(lt - max_term);
    return max_term + std::log(sum);
}

double ell1_coordinate_second_moment(int d) {
    // Simpson quadrature of d * x^2 (1-x)^(d-1) on [0, 1].
    const int intervals = 20000;
    auto f = [d](double x) { return d * x * x * std::pow(1.0 - x, d - 1); };
    double h = 1.0 / intervals;
    double sum = f(0.0) + f(1.0);
    for (int i = 1; i < intervals; ++i) sum += (i % 2 == 1 ? 4.0 : 2.0) * f(i * h);
    return sum * h / 3.0;
}

}  // namespace svtail::oracles
