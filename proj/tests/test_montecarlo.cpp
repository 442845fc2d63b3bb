#include <doctest.h>

#include <cmath>

#include "svtail/ensembles.hpp"
#include "svtail/geometry.hpp"
#include "svtail/linalg.hpp"
#include "svtail/montecarlo.hpp"
#include "svtail/oracles.hpp"

using namespace svtail;

TEST_CASE("Wilson interval brackets the point estimate") {
    TailEstimate e;
    e.trials = 1000;
    e.successes = 37;
    CHECK(e.ci_low() <= e.p_hat());
    CHECK(e.ci_high() >= e.p_hat());
    CHECK(e.ci_low() > 0.0);
    CHECK(e.ci_high() < 1.0);

    TailEstimate zero;
    zero.trials = 500;
    zero.successes = 0;
    CHECK(zero.ci_low() == 0.0);
    CHECK(zero.ci_high() > 0.0);
    REQUIRE(zero.rule_of_three().has_value());
    CHECK(*zero.rule_of_three() == doctest::Approx(3.0 / 500.0));

    TailEstimate full;
    full.trials = 500;
    full.successes = 500;
    CHECK(full.ci_high() == 1.0);
    CHECK(full.ci_low() < 1.0);
    CHECK_FALSE(full.rule_of_three().has_value());
}

TEST_CASE("merge is a sum with recomputed interval") {
    TailEstimate a, b;
    a.trials = 100;
    a.successes = 3;
    b.trials = 200;
    b.successes = 9;
    TailEstimate m = TailEstimate::merge(a, b);
    CHECK(m.trials == 300);
    CHECK(m.successes == 12);
    TailEstimate m2 = TailEstimate::merge(b, a);
    CHECK(m2.trials == m.trials);
    CHECK(m2.successes == m.successes);
}

TEST_CASE("threshold normalizations") {
    CHECK(resolve_threshold(Normalization::Absolute, 0.7, 100, 50) == doctest::Approx(0.7));
    CHECK(resolve_threshold(Normalization::SqrtN, 0.2, 100, 50) == doctest::Approx(2.0));
    CHECK(resolve_threshold(Normalization::InvSqrtN, 0.3, 100, 100) == doctest::Approx(0.03));
    CHECK(resolve_threshold(Normalization::Gap, 0.5, 99, 25) ==
          doctest::Approx(0.5 * (std::sqrt(100.0) - 5.0)));
    CHECK(normalization_from_name(normalization_name(Normalization::Gap)) == Normalization::Gap);
}

TEST_CASE("sv tail: certain and null events") {
    auto huge = estimate_sv_tail(EnsembleSpec::gaussian(), 2, 2, {100.0}, 500, RandomSeed{41, 0}, 1);
    CHECK(huge[0].p_hat() == doctest::Approx(1.0));
    auto null = estimate_sv_tail(EnsembleSpec::gaussian(), 2, 2, {0.0}, 500, RandomSeed{41, 0}, 1);
    CHECK(null[0].p_hat() == doctest::Approx(0.0));
}

TEST_CASE("sv tail: two independent runs agree within overlapping intervals") {
    double t = 0.1 / std::sqrt(2.0);
    auto a = estimate_sv_tail(EnsembleSpec::gaussian(), 2, 2, {t}, 200000, RandomSeed{42, 0}, 0);
    auto b = estimate_sv_tail(EnsembleSpec::gaussian(), 2, 2, {t}, 200000, RandomSeed{43, 0}, 0);
    CHECK(a[0].ci_low() <= b[0].ci_high());
    CHECK(b[0].ci_low() <= a[0].ci_high());
}

TEST_CASE("sv tail: nested thresholds give monotone estimates and thread-count invariance") {
    std::vector<double> ts = {0.05, 0.2, 0.5, 1.0};
    auto one = estimate_sv_tail(EnsembleSpec::uniform_cube(), 8, 8, ts, 4000, RandomSeed{44, 0}, 1);
    auto four = estimate_sv_tail(EnsembleSpec::uniform_cube(), 8, 8, ts, 4000, RandomSeed{44, 0}, 4);
    for (std::size_t i = 0; i < ts.size(); ++i) {
        CHECK(one[i].successes == four[i].successes);
        if (i > 0) CHECK(one[i].successes >= one[i - 1].successes);
    }
}

TEST_CASE("small ball: saturated and null cases") {
    RealVector y = RealVector::Zero(5);
    TailEstimate big = estimate_smallball(EnsembleSpec::gaussian(), 5, 10.0, y, 2000, RandomSeed{45, 0}, 1);
    CHECK(big.p_hat() == doctest::Approx(1.0));
    TailEstimate null = estimate_smallball(EnsembleSpec::gaussian(), 5, 0.0, y, 2000, RandomSeed{45, 0}, 1);
    CHECK(null.p_hat() == doctest::Approx(0.0));
}

TEST_CASE("norm upper tail is invisible at the default constant") {
    TailEstimate g = estimate_paouris(EnsembleSpec::gaussian(), 100, 1.0, 3.0, 100000, RandomSeed{46, 0}, 0);
    CHECK(g.successes == 0);
    TailEstimate u =
        estimate_paouris(EnsembleSpec::uniform_cube(), 100, 1.0, 3.0, 100000, RandomSeed{47, 0}, 0);
    CHECK(u.successes == 0);
    TailEstimate all = estimate_paouris(EnsembleSpec::gaussian(), 10, 0.0, 3.0, 500, RandomSeed{48, 0}, 1);
    CHECK(all.p_hat() == doctest::Approx(1.0));
}

TEST_CASE("compressible infimum surrogate never fires at desk scale") {
    double rho = (1.0 - 0.5) * 0.4 / 5.0;
    double t = 0.05 * std::sqrt(24.0);
    TailEstimate est = estimate_comp_inf_tail(EnsembleSpec::gaussian(), 24, 12, 0.5, rho, t, 300,
                                              RandomSeed{49, 0}, 0);
    CHECK(est.trials == 300);
    CHECK(est.successes == 0);
    CHECK_THROWS(estimate_comp_inf_tail(EnsembleSpec::gaussian(), 30, 15, 0.5, rho, t, 10,
                                        RandomSeed{49, 1}, 1));
}

TEST_CASE("the support surrogate lower-bounds the compressible infimum") {
    // L(A) <= ||Ax|| + rho^2 sigma_max slack for sampled compressible x
    int n = 6;
    double delta = 0.5;
    double rho = 0.05;
    CounterRng rng(50, 0);
    RealMatrix a = detail::sample_matrix_with(EnsembleSpec::gaussian(), 12, n, rng);
    RealVector sv = singular_values(a);
    double smax = sv(0);

    // recompute the surrogate directly: min over supports of size ceil(delta n)
    int k = static_cast<int>(std::ceil(delta * n));
    double min_smin = 1e300;
    REQUIRE(k == 3);  // iterate all C(6,3) supports below
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int l = j + 1; l < n; ++l) {
                RealMatrix sub(12, 3);
                sub << a.col(i), a.col(j), a.col(l);
                min_smin = std::min(min_smin, smallest_singular_value(sub));
            }
    double surrogate = min_smin - rho * smax;

    for (int c = 0; c < 200; ++c) {
        RealVector x = random_compressible_unit(n, delta, rho, rng);
        CHECK((a * x).norm() >= surrogate - rho * rho * smax - 1e-9);
    }
}

TEST_CASE("distance tail: null event and linear scaling") {
    auto null = estimate_distance_tail(EnsembleSpec::gaussian(), 10, {0.0}, 500, RandomSeed{51, 0}, 1);
    CHECK(null[0].p_hat() == doctest::Approx(0.0));

    auto est = estimate_distance_tail(EnsembleSpec::uniform_cube(), 50, {0.1, 0.2}, 50000,
                                      RandomSeed{52, 0}, 0);
    REQUIRE(est[0].successes > 0);
    double ratio = est[1].p_hat() / est[0].p_hat();
    CHECK(ratio >= 1.5);
    CHECK(ratio <= 2.7);
}

TEST_CASE("order statistic estimator matches the exact binomial oracle") {
    TailEstimate null = estimate_order_stat(EnsembleSpec::gaussian(), 20, 0.1, 0.0, 500,
                                            RandomSeed{53, 0}, 1);
    CHECK(null.p_hat() == doctest::Approx(0.0));

    // |X*_90| <= r iff at least 11 of 100 coordinates fall in [-r, r]
    double r = 0.05;
    double coord_p = 2.0 * oracles::normal_cdf(r) - 1.0;
    double oracle = std::exp(oracles::log_binomial_tail(100, coord_p, 11));
    TailEstimate est = estimate_order_stat(EnsembleSpec::gaussian(), 100, 0.1, r, 20000,
                                           RandomSeed{54, 0}, 0);
    CHECK(est.ci_low() <= oracle);
    CHECK(est.ci_high() >= oracle);
}

TEST_CASE("projected tail: null thresholds and the d = 1 gaussian law") {
    // d = N - n + 1 = 1 is the square case: W is the 1x1 component of A_1
    // orthogonal to the other columns, so |Wx| is |N(0,1)| for gaussian A
    EnsembleSpec spec = EnsembleSpec::independent_columns(EnsembleSpec::gaussian());
    RealVector x1(1);
    x1(0) = 1.0;
    ProjectedTailResult res = estimate_projected_sv_tail(spec, 20, 20, {0}, {0.0, 0.8}, 20000,
                                                         RandomSeed{55, 0}, 0, &x1);
    CHECK(res.codimension == 1);
    CHECK(res.fixed_x_tail[0].p_hat() == doctest::Approx(0.0));
    CHECK(res.sv_tail[0].p_hat() == doctest::Approx(0.0));
    double target = 2.0 * oracles::normal_cdf(0.8) - 1.0;
    CHECK(res.fixed_x_tail[1].ci_low() <= target);
    CHECK(res.fixed_x_tail[1].ci_high() >= target);
    // d = 1: sigma_min(W) = |Wx| for the only unit x
    CHECK(res.sv_tail[1].successes == res.fixed_x_tail[1].successes);
}

TEST_CASE("unit normals of square samples are incompressible") {
    int n = 12;
    int hits = 0;
    const int trials = 3000;
    long long discarded = 0;
    for (int s = 0; s < trials; ++s) {
        RealMatrix a = sample_matrix(EnsembleSpec::gaussian(), n, n, RandomSeed{56, static_cast<std::uint64_t>(s)});
        SubspaceBasis basis = orthonormal_basis(a.rightCols(n - 1));
        if (basis.rank() != n - 1) {
            ++discarded;
            continue;
        }
        RealVector g = a.col(0);
        RealVector normal = g - basis.q * (basis.q.transpose() * g);
        if (normal.norm() < 1e-12) {
            ++discarded;
            continue;
        }
        normal.normalize();
        if (classify_compressible(normal, 0.3, 0.1) == Compressibility::Incomp) ++hits;
    }
    CHECK(hits >= static_cast<int>(0.99 * (trials - discarded)));
}

TEST_CASE("event cover verifier on a small run") {
    EnsembleSpec spec = EnsembleSpec::independent_columns(EnsembleSpec::gaussian());
    EventCoverReport report = verify_event_cover(spec, 24, 20, 0.5, 2.0, 500, RandomSeed{57, 0}, 1);
    CHECK(report.samples == 500);
    CHECK(report.ok());
    CHECK_THROWS(verify_event_cover(spec, 24, 20, 0.5, 0.5, 10, RandomSeed{57, 1}, 1));
}

TEST_CASE("rounding moment verifier") {
    RealMatrix a = sample_matrix(EnsembleSpec::gaussian(), 10, 5, RandomSeed{58, 0});
    RealVector y = sample_vector(EnsembleSpec::gaussian(), 5, RandomSeed{58, 1});
    MomentReport report = verify_rounding_moment(a, y, 0.3, 5000, RandomSeed{58, 2});
    CHECK(report.trials == 5000);
    CHECK(report.ok());
    CHECK(report.bound == doctest::Approx((0.3 * 0.3 / 5.0) * hs_norm(a) * hs_norm(a)));
}

TEST_CASE("sparsity verifier on a compressible vector") {
    DecompositionParams params = DecompositionParams::square_regime(0.5, 0.4, 60);
    CounterRng rng(59, 0);
    RealVector y = random_compressible_unit(60, params.delta, params.rho, rng);
    SparsityReport report = verify_sparsity_prob(y, params, RandomSeed{59, 1}, 4000);
    CHECK(report.m == params.sparsity_budget());
    CHECK(report.ok());
}

TEST_CASE("helper samplers satisfy their own contracts") {
    CounterRng rng(60, 0);
    RealVector u = random_unit_vector(30, rng);
    CHECK(u.norm() == doctest::Approx(1.0).epsilon(1e-12));

    RealVector c = random_compressible_unit(40, 0.3, 0.15, rng);
    CHECK(c.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(classify_compressible(c, 0.3, 0.15) == Compressibility::Comp);

    SpreadParams params{0.1, 10.0, 7};
    RealVector s = random_spread_unit(7, params, rng);
    CHECK(s.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(is_spread(s, params));
}
