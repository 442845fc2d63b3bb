#include "svtail/selftest.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "svtail/config.hpp"
#include "svtail/ensembles.hpp"
#include "svtail/geometry.hpp"
#include "svtail/linalg.hpp"
#include "svtail/montecarlo.hpp"
#include "svtail/oracles.hpp"
#include "svtail/records.hpp"
#include "svtail/rng.hpp"

namespace svtail::selftest {
namespace {

constexpr std::uint64_t kSuiteSeed = 0x5e1f7e57u;

std::string format(const char* fmt, ...) {
    char buf[512];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof(buf), fmt, args);
    va_end(args);
    return std::string(buf);
}

// 1. Hard sup-norm bound of the random rounding, on every single draw.
CriterionResult c01_rounding_hard_bound() {
    CriterionResult r{1, "rounding-hard-bound", false, "", 0.0};
    CounterRng rng(kSuiteSeed, 1);
    long long draws = 0;
    double worst_ratio = 0.0;
    for (int c = 0; c < 2000; ++c) {
        int n = 1 + static_cast<int>(rng.next_double() * 200.0);
        n = std::min(n, 200);
        double eps = rng.next_uniform(0.01, 0.5);
        double scale = rng.next_uniform(0.1, 10.0);
        RealVector y(n);
        for (int i = 0; i < n; ++i) y(i) = scale * rng.next_gaussian();
        double spacing = eps / std::sqrt(static_cast<double>(n));
        for (int d = 0; d < 50; ++d) {
            RoundingOutcome out = detail::random_round_with(y, eps, rng);
            double inf_norm = (out.eta - y).cwiseAbs().maxCoeff();
            worst_ratio = std::max(worst_ratio, inf_norm / spacing);
            ++draws;
        }
    }
    r.pass = draws == 100000 && worst_ratio <= 1.0 + 1e-12;
    r.detail = format("%lld draws, worst |eta-y|_inf / (eps/sqrt(n)) = %.6f", draws, worst_ratio);
    return r;
}

// 2. Second-moment bound of the rounding error through a fixed matrix.
CriterionResult c02_rounding_second_moment() {
    CriterionResult r{2, "rounding-second-moment", false, "", 0.0};
    CounterRng rng(kSuiteSeed, 2);
    int failures = 0;
    double worst_margin = -1e300;  // empirical mean minus bound, in bound units
    for (int c = 0; c < 50; ++c) {
        RealMatrix a = detail::sample_matrix_with(EnsembleSpec::gaussian(), 40, 20, rng);
        RealVector y(20);
        for (int i = 0; i < 20; ++i) y(i) = rng.next_gaussian();
        double eps = rng.next_uniform(0.05, 0.5);
        MomentReport report =
            verify_rounding_moment(a, y, eps, 10000, RandomSeed{kSuiteSeed + 200, static_cast<std::uint64_t>(c)});
        if (!report.ok()) ++failures;
        worst_margin = std::max(worst_margin, (report.empirical_mean - report.bound) / report.bound);
    }
    r.pass = failures == 0;
    r.detail = format("50 cases, failures = %d, worst (mean-bound)/bound = %.4f", failures, worst_margin);
    return r;
}

// 3. Rounding of a compressible vector lands in Sparse(m) with prob >= 0.70.
CriterionResult c03_sparsity_budget() {
    CriterionResult r{3, "sparsity-budget", false, "", 0.0};
    DecompositionParams params = DecompositionParams::square_regime(0.5, 0.4, 100);
    CounterRng rng(kSuiteSeed, 3);
    int failures = 0;
    double worst_p = 1.0;
    for (int c = 0; c < 50; ++c) {
        RealVector y = random_compressible_unit(100, params.delta, params.rho, rng);
        SparsityReport report =
            verify_sparsity_prob(y, params, RandomSeed{kSuiteSeed + 300, static_cast<std::uint64_t>(c)}, 10000);
        if (!report.ok()) ++failures;
        worst_p = std::min(worst_p, report.in_sparse.p_hat());
    }
    r.pass = failures == 0;
    r.detail = format("m = %d, failures = %d, min p_hat = %.4f (need >= 0.70)",
                      params.sparsity_budget(), failures, worst_p);
    return r;
}

// 4. dist_to_sparse against exhaustive support minimization.
CriterionResult c04_dist_to_sparse_oracle() {
    CriterionResult r{4, "dist-to-sparse-oracle", false, "", 0.0};
    CounterRng rng(kSuiteSeed, 4);
    double worst = 0.0;
    for (int c = 0; c < 1000; ++c) {
        int n = 1 + static_cast<int>(rng.next_double() * 10.0);
        n = std::min(n, 10);
        int k = 1 + static_cast<int>(rng.next_double() * n);
        k = std::min(k, n);
        RealVector x(n);
        for (int i = 0; i < n; ++i) x(i) = rng.next_uniform(-2.0, 2.0);
        double fast = dist_to_sparse(x, k);
        double slow = oracles::dist_to_sparse_exhaustive(x, k);
        worst = std::max(worst, std::abs(fast - slow));
    }
    r.pass = worst <= 1e-12;
    r.detail = format("1000 vectors, max |fast - exhaustive| = %.3e", worst);
    return r;
}

// 5. SVD against the closed-form eigenvalues of A^T A.
CriterionResult c05_svd_oracle() {
    CriterionResult r{5, "svd-oracle", false, "", 0.0};
    CounterRng rng(kSuiteSeed, 5);
    double worst = 0.0;
    for (int c = 0; c < 500; ++c) {
        RealMatrix a(3, 3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) a(i, j) = rng.next_uniform(-1.0, 1.0);
        RealVector sv = singular_values(a);
        auto lambda = oracles::symmetric_3x3_eigenvalues(a.transpose() * a);
        double scale = std::max(sv(0), 1e-300);
        for (int i = 0; i < 3; ++i) {
            double expected = std::sqrt(std::max(lambda[static_cast<std::size_t>(i)], 0.0));
            worst = std::max(worst, std::abs(sv(i) - expected) / scale);
        }
    }
    r.pass = worst <= 1e-8;
    r.detail = format("500 matrices, max relative deviation = %.3e", worst);
    return r;
}

// 6. Small-ball probability at the origin against the chi-square CDF.
CriterionResult c06_smallball_oracle() {
    CriterionResult r{6, "smallball-oracle", false, "", 0.0};
    RealVector y = RealVector::Zero(50);
    TailEstimate est = estimate_smallball(EnsembleSpec::gaussian(), 50, 0.5, y, 100000,
                                          RandomSeed{kSuiteSeed, 6}, 0);
    double target = oracles::chi_square_cdf(50.0, 12.5);
    double diff = std::abs(est.p_hat() - target);
    r.pass = diff <= 0.01;
    r.detail = format("p_hat = %.3e vs chi2 CDF %.3e, |diff| = %.3e", est.p_hat(), target, diff);
    return r;
}

// 7. Column-to-span distance of a square gaussian sample vs 2*Phi(eps)-1.
CriterionResult c07_distance_oracle() {
    CriterionResult r{7, "distance-oracle", false, "", 0.0};
    std::vector<double> eps = {0.1, 0.3};
    std::vector<TailEstimate> est =
        estimate_distance_tail(EnsembleSpec::gaussian(), 50, eps, 200000, RandomSeed{kSuiteSeed, 7}, 0);
    r.pass = true;
    std::string parts;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        double target = 2.0 * oracles::normal_cdf(eps[i]) - 1.0;
        bool inside = target >= est[i].ci_low() && target <= est[i].ci_high();
        r.pass = r.pass && inside;
        parts += format("%seps=%.1f: p_hat=%.5f target=%.5f %s", i ? "; " : "", eps[i],
                        est[i].p_hat(), target, inside ? "in CI" : "OUTSIDE CI");
    }
    r.detail = parts;
    return r;
}

// 8. Linear scaling of the square smallest-singular-value tail.
CriterionResult c08_linear_scaling() {
    CriterionResult r{8, "linear-smallball-scaling", false, "", 0.0};
    int n = 80;
    double root = std::sqrt(static_cast<double>(n));
    std::vector<double> thresholds = {0.1 / root, 0.4 / root};
    long long trials = 20000;
    std::vector<TailEstimate> est;
    for (int round = 0;; ++round) {
        est = estimate_sv_tail(EnsembleSpec::uniform_cube(), n, n, thresholds, trials,
                               RandomSeed{kSuiteSeed, 8}, 0);
        long long min_count = std::min(est[0].successes, est[1].successes);
        if (min_count >= 20 || round >= 3) break;
        trials *= 2;  // enlarge until both events are resolved
    }
    bool resolved = est[0].successes >= 20 && est[1].successes >= 20;
    double ratio = est[0].successes > 0
                       ? static_cast<double>(est[1].successes) / static_cast<double>(est[0].successes)
                       : 0.0;
    r.pass = resolved && ratio >= 2.0 && ratio <= 8.0;
    r.detail = format("trials = %lld, counts = (%lld, %lld), ratio = %.3f (want [2, 8])", trials,
                      est[0].successes, est[1].successes, ratio);
    return r;
}

// 9. Tall matrices never dip below 0.2 sqrt(N) at desk scale.
CriterionResult c09_tall_rarity() {
    CriterionResult r{9, "tall-case-rarity", false, "", 0.0};
    double threshold = 0.2 * std::sqrt(200.0);
    r.pass = true;
    std::string parts;
    const EnsembleSpec specs[] = {EnsembleSpec::gaussian(), EnsembleSpec::uniform_cube()};
    const char* names[] = {"gaussian", "uniform_cube"};
    for (int s = 0; s < 2; ++s) {
        std::vector<TailEstimate> est = estimate_sv_tail(
            specs[s], 200, 50, {threshold}, 5000, RandomSeed{kSuiteSeed, 9 + static_cast<std::uint64_t>(s)}, 0);
        std::optional<double> r3 = est[0].rule_of_three();
        bool ok = est[0].successes == 0 && r3 && *r3 <= 6e-4;
        r.pass = r.pass && ok;
        parts += format("%s%s: %lld events, rule-of-three %.2e", s ? "; " : "", names[s],
                        est[0].successes, r3 ? *r3 : -1.0);
    }
    r.detail = parts;
    return r;
}

// 10. Codimension and law of the projected block.
CriterionResult c10_projected_block() {
    CriterionResult r{10, "projected-block-law", false, "", 0.0};
    EnsembleSpec spec = EnsembleSpec::independent_columns(EnsembleSpec::gaussian());
    std::vector<int> j = {0, 1, 2, 3, 4};
    CounterRng rng(kSuiteSeed, 10);
    RealVector x = random_spread_unit(5, SpreadParams{0.1, 10.0, 5}, rng);
    std::vector<double> thresholds = {0.5, 1.0, 1.5};
    ProjectedTailResult res = estimate_projected_sv_tail(spec, 24, 20, j, thresholds, 100000,
                                                         RandomSeed{kSuiteSeed, 11}, 0, &x);
    bool codim_ok = res.codimension == 9 && res.codimension_failures == 0;
    double worst = 0.0;
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
        double level = thresholds[i] * std::sqrt(9.0);
        double target = oracles::chi_cdf(9.0, level);
        worst = std::max(worst, std::abs(res.fixed_x_tail[i].p_hat() - target));
    }
    r.pass = codim_ok && worst <= 0.01;
    r.detail = format("codim = %d (failures %lld), max |p_hat - chi9 CDF| = %.4f", res.codimension,
                      res.codimension_failures, worst);
    return r;
}

// 11. Pointwise exactness of the event cover.
CriterionResult c11_event_cover() {
    CriterionResult r{11, "event-cover-exactness", false, "", 0.0};
    EnsembleSpec spec = EnsembleSpec::independent_columns(EnsembleSpec::gaussian());
    EventCoverReport report = verify_event_cover(spec, 24, 20, 0.5, 2.0, 10000,
                                                 RandomSeed{kSuiteSeed, 12}, 0);
    r.pass = report.ok() && report.samples == 10000;
    r.detail = format("%lld samples, %lld violations, event fired %lld times", report.samples,
                      report.violations, report.event_count);
    return r;
}

// 12. Spread witness always exists for incompressible unit vectors.
CriterionResult c12_spread_witness() {
    CriterionResult r{12, "spread-witness", false, "", 0.0};
    CounterRng rng(kSuiteSeed, 13);
    int n = 50;
    double delta = 0.3;
    double rho = 0.2;
    double min_size = rho * rho * delta * n / 2.0;
    int produced = 0;
    int missing = 0;
    int tested = 0;
    while (tested < 1000) {
        RealVector x = random_unit_vector(n, rng);
        if (classify_compressible(x, delta, rho) != Compressibility::Incomp) continue;
        ++tested;
        std::optional<std::vector<int>> j = spread_witness(x, delta, rho);
        if (j && static_cast<double>(j->size()) >= min_size)
            ++produced;
        else
            ++missing;
    }
    r.pass = produced == 1000 && missing == 0;
    r.detail = format("1000 incompressible vectors, witness returned %d times (|J| >= %.2f)",
                      produced, min_size);
    return r;
}

// 13. Order-statistic floor: zero events |X*_90| <= r over 10^4 trials, as
// stated. The stated oracle claims probability < 1e-15; the exact binomial
// computation below disagrees for these parameters, and the observed counts
// are reported against it.
CriterionResult c13_order_stat_floor() {
    CriterionResult r{13, "order-statistic-floor", false, "", 0.0};
    int n = 100;
    double c1 = 0.1;
    double level = 0.05;
    // |X*_90| <= r  iff  at least 11 coordinates satisfy |X_i| <= r.
    int needed = static_cast<int>(n * c1) + 1;
    r.pass = true;
    std::string parts;
    const EnsembleSpec specs[] = {EnsembleSpec::gaussian(), EnsembleSpec::uniform_cube()};
    const char* names[] = {"gaussian", "uniform_cube"};
    const double coord_p[] = {2.0 * oracles::normal_cdf(level) - 1.0, level / std::sqrt(3.0)};
    for (int s = 0; s < 2; ++s) {
        TailEstimate est = estimate_order_stat(specs[s], n, c1, level, 10000,
                                               RandomSeed{kSuiteSeed, 14 + static_cast<std::uint64_t>(s)}, 0);
        double event_p = std::exp(oracles::log_binomial_tail(n, coord_p[s], needed));
        bool ok = est.successes == 0;
        r.pass = r.pass && ok;
        parts += format("%s%s: %lld events in 10^4 trials (exact binomial oracle P = %.3e)",
                        s ? "; " : "", names[s], est.successes, event_p);
    }
    r.detail = parts;
    return r;
}

// 14. Exhaustive net enumeration against the cardinality bound.
CriterionResult c14_net_bound() {
    CriterionResult r{14, "net-enumeration-bound", false, "", 0.0};
    int n = 6;
    double delta = 0.5;
    double eps = 0.5;
    double rho = (1.0 - delta) * eps / 5.0;
    std::uint64_t count = enumerate_sparse_net_count(n, delta, rho, eps);
    NetSizeBound bound = sparse_net_size_bound(n, delta, rho, eps, 10.0);
    r.pass = count >= 1 && static_cast<double>(count) <= bound.bound;
    r.detail = format("count = %llu vs bound %.3e (m = %d)",
                      static_cast<unsigned long long>(count), bound.bound, bound.m);
    return r;
}

// 15. Bit-for-bit reproducibility across thread counts and reruns.
CriterionResult c15_reproducibility() {
    CriterionResult r{15, "reproducibility", false, "", 0.0};
    const char* text =
        "[repro]\n"
        "experiment = sv_tail\n"
        "ensemble.kind = gaussian\n"
        "N = 12\n"
        "n = 6\n"
        "trials = 4000\n"
        "seed = 20240811\n"
        "thresholds = 0.5, 1.5\n"
        "normalization = absolute\n";
    std::vector<ExperimentConfig> cfgs = parse_config_text(text);
    ExperimentConfig cfg = cfgs.at(0);
    cfg.threads = 1;
    ExperimentRecord a = run_experiment(cfg);
    cfg.threads = 4;
    ExperimentRecord b = run_experiment(cfg);
    cfg.threads = 1;
    ExperimentRecord c = run_experiment(cfg);
    bool same = a.results.size() == b.results.size() && a.results.size() == c.results.size();
    for (std::size_t i = 0; same && i < a.results.size(); ++i) {
        const TailEstimate& ea = a.results[i].estimate;
        const TailEstimate& eb = b.results[i].estimate;
        const TailEstimate& ec = c.results[i].estimate;
        same = ea.successes == eb.successes && ea.successes == ec.successes &&
               ea.trials == eb.trials && ea.trials == ec.trials &&
               ea.discarded_degenerate == eb.discarded_degenerate &&
               ea.discarded_degenerate == ec.discarded_degenerate;
    }
    r.pass = same;
    r.detail = same ? format("threads 1 vs 4 vs 1: identical (successes = %lld, %lld)",
                             a.results[0].estimate.successes, a.results[1].estimate.successes)
                    : "thread counts produced different results";
    return r;
}

}  // namespace

std::vector<CriterionResult> run_all(std::ostream& out) {
    using Runner = CriterionResult (*)();
    const Runner runners[] = {
        c01_rounding_hard_bound, c02_rounding_second_moment, c03_sparsity_budget,
        c04_dist_to_sparse_oracle, c05_svd_oracle, c06_smallball_oracle,
        c07_distance_oracle, c08_linear_scaling, c09_tall_rarity,
        c10_projected_block, c11_event_cover, c12_spread_witness,
        c13_order_stat_floor, c14_net_bound, c15_reproducibility,
    };
    std::vector<CriterionResult> results;
    for (Runner runner : runners) {
        auto start = std::chrono::steady_clock::now();
        CriterionResult res = runner();
        res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        out << format("[%2d/15] %s  %-26s (%6.2fs)  %s\n", res.index, res.pass ? "PASS" : "FAIL",
                      res.name.c_str(), res.seconds, res.detail.c_str());
        out.flush();
        results.push_back(std::move(res));
    }
    return results;
}

bool run_acceptance(std::ostream& out) {
    std::vector<CriterionResult> results = run_all(out);
    int passed = 0;
    for (const CriterionResult& res : results)
        if (res.pass) ++passed;
    out << format("%d/%d criteria passed\n", passed, static_cast<int>(results.size()));
    return passed == static_cast<int>(results.size());
}

}  // namespace svtail::selftest
