#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "svtail/ensembles.hpp"
#include "svtail/oracles.hpp"

using namespace svtail;

TEST_CASE("uniform_cube coordinates stay inside [-sqrt(3), sqrt(3)]") {
    double a = std::sqrt(3.0);
    for (std::uint64_t s = 0; s < 500; ++s) {
        RealVector x = sample_vector(EnsembleSpec::uniform_cube(), 3, RandomSeed{11, s});
        for (int i = 0; i < 3; ++i) {
            REQUIRE(x(i) >= -a);
            REQUIRE(x(i) <= a);
        }
    }
}

TEST_CASE("laplace n=1 has unit variance and vanishing odd moments") {
    double sum = 0.0, sum2 = 0.0, sum3 = 0.0;
    const int trials = 200000;
    for (int s = 0; s < trials; ++s) {
        double x = sample_vector(EnsembleSpec::laplace(), 1, RandomSeed{12, static_cast<std::uint64_t>(s)})(0);
        sum += x;
        sum2 += x * x;
        sum3 += x * x * x;
    }
    CHECK(std::abs(sum / trials) < 0.02);
    CHECK(std::abs(sum2 / trials - 1.0) < 0.03);
    // Var(X^3) = E X^6 = 90/8 for unit-variance Laplace; 4 sigma ~ 0.03
    CHECK(std::abs(sum3 / trials) < 0.04);
}

TEST_CASE("ell1_ball n=5 is supported on sqrt(21) B_1 and isotropic") {
    double r = std::sqrt(21.0);
    double sum2 = 0.0;
    const int trials = 100000;
    for (int s = 0; s < trials; ++s) {
        RealVector x = sample_vector(EnsembleSpec::ell1_ball(), 5, RandomSeed{13, static_cast<std::uint64_t>(s)});
        REQUIRE(x.lpNorm<1>() <= r * (1.0 + 1e-12));
        sum2 += x(0) * x(0);
    }
    // coordinate second moment of uniform-on-B_1^d is 2/((d+1)(d+2));
    // the sqrt((d+1)(d+2)/2) radius rescales it to exactly 1
    double oracle = oracles::ell1_coordinate_second_moment(5) * 21.0;
    CHECK(oracle == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::abs(sum2 / trials - oracle) < 0.02);
}

TEST_CASE("sampling is deterministic in the seed") {
    RealMatrix a = sample_matrix(EnsembleSpec::gaussian(), 2, 2, RandomSeed{99, 5});
    RealMatrix b = sample_matrix(EnsembleSpec::gaussian(), 2, 2, RandomSeed{99, 5});
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
    RealMatrix c = sample_matrix(EnsembleSpec::gaussian(), 2, 2, RandomSeed{99, 6});
    CHECK((a - c).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("independent columns of ell1_ball stay in their own ball") {
    EnsembleSpec spec = EnsembleSpec::independent_columns(EnsembleSpec::ell1_ball());
    double r = std::sqrt(15.0);  // d = 4
    for (std::uint64_t s = 0; s < 200; ++s) {
        RealMatrix a = sample_matrix(spec, 4, 3, RandomSeed{14, s});
        for (int j = 0; j < 3; ++j) REQUIRE(a.col(j).lpNorm<1>() <= r * (1.0 + 1e-12));
    }
}

TEST_CASE("independent columns have vanishing cross-column covariance") {
    EnsembleSpec spec = EnsembleSpec::independent_columns(EnsembleSpec::gaussian());
    const int trials = 50000;
    double cross = 0.0;
    for (int s = 0; s < trials; ++s) {
        RealMatrix a = sample_matrix(spec, 3, 2, RandomSeed{15, static_cast<std::uint64_t>(s)});
        cross += a(0, 0) * a(0, 1);
    }
    CHECK(std::abs(cross / trials) < 4.0 / std::sqrt(static_cast<double>(trials)));
}

TEST_CASE("concatenated specs have the documented shape") {
    EnsembleSpec c = make_concatenated(EnsembleSpec::gaussian(), 4, 2);
    CHECK(c.copies() == 2);
    RealMatrix a = sample_matrix(c, 4, 4, RandomSeed{16, 0});
    CHECK(a.rows() == 4);
    CHECK(a.cols() == 4);

    EnsembleSpec c2 = make_concatenated(EnsembleSpec::laplace(), 5, 2);
    CHECK(c2.copies() == 2);
    RealMatrix b = sample_matrix(c2, 5, 4, RandomSeed{16, 1});
    CHECK(b.rows() == 5);
    CHECK(b.cols() == 4);

    CHECK_THROWS_AS(make_concatenated(EnsembleSpec::gaussian(), 3, 2), std::invalid_argument);
}

TEST_CASE("vector sampling rejects matrix-only kinds and n = 0") {
    EnsembleSpec spec = EnsembleSpec::independent_columns(EnsembleSpec::gaussian());
    CHECK_THROWS(sample_vector(spec, 3, RandomSeed{1, 0}));
    CHECK_THROWS(sample_vector(EnsembleSpec::gaussian(), 0, RandomSeed{1, 0}));
}

TEST_CASE("isotropy report: every vector kind is close to identity covariance") {
    IsotropyReport g = isotropy_report(EnsembleSpec::gaussian(), 10, 200000, RandomSeed{17, 0});
    CHECK(g.max_cov_deviation < 0.05);
    CHECK(g.max_mean_abs < 0.05);
    IsotropyReport u = isotropy_report(EnsembleSpec::uniform_cube(), 5, 200000, RandomSeed{18, 0});
    CHECK(u.max_cov_deviation < 0.05);
    IsotropyReport l = isotropy_report(EnsembleSpec::ell1_ball(), 5, 200000, RandomSeed{19, 0});
    CHECK(l.max_cov_deviation < 0.05);
}

TEST_CASE("concatenated samples keep the base law in the leading block") {
    // first two columns of a 4-row concatenated uniform_cube sample stay bounded
    EnsembleSpec c = make_concatenated(EnsembleSpec::uniform_cube(), 4, 2);
    double a = std::sqrt(3.0);
    for (std::uint64_t s = 0; s < 200; ++s) {
        RealMatrix m = sample_matrix(c, 4, 4, RandomSeed{20, s});
        CHECK(m.leftCols(2).cwiseAbs().maxCoeff() <= a);
    }
}

TEST_CASE("ensemble kind names round-trip") {
    for (EnsembleKind k : {EnsembleKind::Gaussian, EnsembleKind::UniformCube, EnsembleKind::Laplace,
                           EnsembleKind::Ell1Ball, EnsembleKind::IndependentColumns,
                           EnsembleKind::Concatenated}) {
        CHECK(ensemble_kind_from_name(ensemble_kind_name(k)) == k);
    }
    CHECK_THROWS(ensemble_kind_from_name("not-a-kind"));
}
