#include <doctest.h>

#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "svtail/config.hpp"
#include "svtail/records.hpp"

using namespace svtail;

namespace {

const char* kMinimal =
    "# smallest config that runs\n"
    "[baseline]\n"
    "experiment = sv_tail\n"
    "ensemble.kind = gaussian\n"
    "N = 20\n"
    "n = 20\n"
    "trials = 100\n"
    "seed = 1\n"
    "thresholds = 0.5\n";

}  // namespace

TEST_CASE("minimal config parses with defaults filled in") {
    auto cfgs = parse_config_text(kMinimal);
    REQUIRE(cfgs.size() == 1);
    const ExperimentConfig& cfg = cfgs[0];
    CHECK(cfg.name == "baseline");
    CHECK(cfg.kind == ExperimentKind::SvTail);
    CHECK(cfg.ensemble.kind() == EnsembleKind::Gaussian);
    CHECK(cfg.big_n == 20);
    CHECK(cfg.n == 20);
    CHECK(cfg.trials == 100);
    CHECK(cfg.seed == 1);
    CHECK(cfg.threads == 0);
    REQUIRE(cfg.thresholds.size() == 1);
    CHECK(cfg.thresholds[0] == doctest::Approx(0.5));
    CHECK(cfg.normalization == Normalization::Absolute);
}

TEST_CASE("emit/parse round trip preserves every field") {
    std::string text =
        "[proj]\n"
        "experiment = projected_sv_tail\n"
        "ensemble.kind = independent_columns\n"
        "ensemble.column.kind = ell1_ball\n"
        "N = 24\n"
        "n = 20\n"
        "trials = 2500\n"
        "seed = 77\n"
        "threads = 2\n"
        "thresholds = 0.25, 0.5, 1\n"
        "normalization = absolute\n";
    auto cfgs = parse_config_text(text);
    REQUIRE(cfgs.size() == 1);
    auto round = parse_config_text(emit_config(cfgs[0]));
    REQUIRE(round.size() == 1);
    CHECK(config_key_values(cfgs[0]) == config_key_values(round[0]));
    CHECK(round[0].ensemble.kind() == EnsembleKind::IndependentColumns);
    CHECK(round[0].ensemble.inner().kind() == EnsembleKind::Ell1Ball);
}

TEST_CASE("concatenated ensembles serialize through base_cols") {
    std::string text =
        "[tall]\n"
        "experiment = sv_tail\n"
        "ensemble.kind = concatenated\n"
        "ensemble.base_cols = 5\n"
        "ensemble.base.kind = uniform_cube\n"
        "N = 20\n"
        "n = 20\n"
        "trials = 10\n"
        "seed = 3\n"
        "thresholds = 1.0\n";
    auto cfgs = parse_config_text(text);
    CHECK(cfgs[0].ensemble.kind() == EnsembleKind::Concatenated);
    CHECK(cfgs[0].ensemble.copies() == 4);
    auto round = parse_config_text(emit_config(cfgs[0]));
    CHECK(config_key_values(cfgs[0]) == config_key_values(round[0]));
}

TEST_CASE("config schema violations are rejected with block context") {
    std::string zero_trials(kMinimal);
    zero_trials.replace(zero_trials.find("trials = 100"), 12, "trials = 0  ");
    CHECK_THROWS_AS(parse_config_text(zero_trials), std::invalid_argument);

    std::string unknown_key(kMinimal);
    unknown_key += "mystery = 1\n";
    CHECK_THROWS_WITH_AS(parse_config_text(unknown_key),
                         doctest::Contains("unknown key 'mystery'"), std::invalid_argument);

    std::string unknown_kind(kMinimal);
    unknown_kind.replace(unknown_kind.find("sv_tail"), 7, "sv_fail");
    CHECK_THROWS_WITH_AS(parse_config_text(unknown_kind),
                         doctest::Contains("unknown experiment kind"), std::invalid_argument);

    CHECK_THROWS(parse_config_text("x = 1\n"));                 // key outside section
    CHECK_THROWS(parse_config_text("[a]\nexperiment\n"));       // no '='
    CHECK_THROWS(parse_config_text("# only comments\n"));       // no blocks

    std::string duplicate(kMinimal);
    duplicate += "seed = 2\n";
    CHECK_THROWS_WITH_AS(parse_config_text(duplicate), doctest::Contains("duplicate key"),
                         std::invalid_argument);

    std::string shrunk_n(kMinimal);
    shrunk_n.replace(shrunk_n.find("N = 20"), 6, "N = 10");
    CHECK_THROWS_WITH_AS(parse_config_text(shrunk_n), doctest::Contains("N >= n"),
                         std::invalid_argument);

    std::string bad_thresholds(kMinimal);
    bad_thresholds.replace(bad_thresholds.find("thresholds = 0.5"), 16, "thresholds = 2, 1");
    CHECK_THROWS_WITH_AS(parse_config_text(bad_thresholds),
                         doctest::Contains("strictly increasing"), std::invalid_argument);
}

TEST_CASE("comp_inf_tail takes exactly one threshold") {
    std::string text =
        "[c]\n"
        "experiment = comp_inf_tail\n"
        "N = 12\n"
        "n = 6\n"
        "trials = 5\n"
        "seed = 9\n"
        "thresholds = 0.1, 0.2\n"
        "delta = 0.5\n"
        "rho = 0.04\n";
    CHECK_THROWS_WITH_AS(parse_config_text(text), doctest::Contains("exactly one threshold"),
                         std::invalid_argument);
}

TEST_CASE("minimal experiment runs and serializes to JSONL") {
    ExperimentConfig cfg = parse_config_text(kMinimal)[0];
    ExperimentRecord record = run_experiment(cfg);
    CHECK(record.experiment == "baseline");
    CHECK(record.kind == "sv_tail");
    REQUIRE(record.results.size() == 1);
    CHECK(record.results[0].estimate.trials == 100);

    std::string line = record_to_jsonl(record);
    ExperimentRecord parsed = record_from_jsonl(line);
    CHECK(parsed.experiment == record.experiment);
    CHECK(parsed.big_n == record.big_n);
    CHECK(parsed.results[0].estimate.successes == record.results[0].estimate.successes);
    CHECK(parsed.results[0].estimate.trials == record.results[0].estimate.trials);
    CHECK(parsed.config_echo == record.config_echo);

    // same config twice: the stochastic fields are byte-identical
    ExperimentRecord again = run_experiment(cfg);
    CHECK(again.results[0].estimate.successes == record.results[0].estimate.successes);
    CHECK(again.results[0].estimate.trials == record.results[0].estimate.trials);
}

TEST_CASE("malformed JSONL is rejected, with line numbers at the batch level") {
    CHECK_THROWS_AS(record_from_jsonl("{not json"), std::invalid_argument);
    CHECK_THROWS_AS(record_from_jsonl("{\"experiment\": \"x\"}"), std::invalid_argument);

    std::istringstream batch("\n{broken\n");
    std::ostringstream out;
    try {
        summarize_records(batch, out);
        FAIL("expected a parse error");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("summarize produces a sorted CSV table") {
    std::string text =
        "[b]\n"
        "experiment = sv_tail\n"
        "N = 4\nn = 4\ntrials = 50\nseed = 5\nthresholds = 0.1, 0.2\n"
        "[a]\n"
        "experiment = sv_tail\n"
        "N = 4\nn = 4\ntrials = 50\nseed = 5\nthresholds = 0.3\n";
    std::ostringstream records;
    for (const ExperimentConfig& cfg : parse_config_text(text)) {
        records << record_to_jsonl(run_experiment(cfg)) << "\n";
    }

    std::istringstream in(records.str());
    std::ostringstream csv;
    int rows = summarize_records(in, csv);
    CHECK(rows == 3);
    std::istringstream lines(csv.str());
    std::string line;
    std::getline(lines, line);
    CHECK(line == "experiment,N,n,threshold,normalization,p_hat,ci_low,ci_high,trials,discards");
    std::getline(lines, line);
    CHECK(line.substr(0, 2) == "a,");  // experiment-major order
    std::getline(lines, line);
    CHECK(line.rfind("b,", 0) == 0);
    CHECK(line.find("0.1") != std::string::npos);  // then ascending thresholds
    std::getline(lines, line);
    CHECK(line.rfind("b,", 0) == 0);
    CHECK(line.find("0.2") != std::string::npos);

    std::istringstream empty("");
    std::ostringstream header_only;
    CHECK(summarize_records(empty, header_only) == 0);
    CHECK(header_only.str() ==
          "experiment,N,n,threshold,normalization,p_hat,ci_low,ci_high,trials,discards\n");
}

TEST_CASE("tail curve filters one experiment with monotone p_hat") {
    std::string text =
        "[curve]\n"
        "experiment = sv_tail\n"
        "ensemble.kind = uniform_cube\n"
        "N = 6\nn = 6\ntrials = 3000\nseed = 8\nthresholds = 0.05, 0.2, 0.6, 1.2\n";
    ExperimentRecord record = run_experiment(parse_config_text(text)[0]);
    std::string jsonl = record_to_jsonl(record) + "\n";

    std::istringstream in(jsonl);
    std::ostringstream out, diag;
    int rows = tail_curve(in, "curve", out, diag);
    CHECK(rows == 4);
    CHECK(diag.str().empty());

    std::istringstream lines(out.str());
    std::string line;
    std::getline(lines, line);
    CHECK(line == "threshold,p_hat,ci_low,ci_high");
    double prev_t = -1.0, prev_p = -1.0;
    while (std::getline(lines, line)) {
        double t, p;
        REQUIRE(std::sscanf(line.c_str(), "%lf,%lf", &t, &p) == 2);
        CHECK(t > prev_t);
        CHECK(p >= prev_p);
        prev_t = t;
        prev_p = p;
    }

    std::istringstream in2(jsonl);
    std::ostringstream out2, diag2;
    CHECK(tail_curve(in2, "no-such-name", out2, diag2) == 0);
    CHECK(diag2.str().find("warning") != std::string::npos);
}

TEST_CASE("verifier experiments surface a pass verdict in records") {
    std::string text =
        "[mom]\n"
        "experiment = rounding_moment\n"
        "N = 10\nn = 5\ntrials = 2000\nseed = 4\nepsilon = 0.3\n";
    ExperimentRecord record = run_experiment(parse_config_text(text)[0]);
    REQUIRE(record.pass.has_value());
    CHECK(*record.pass);
    ExperimentRecord parsed = record_from_jsonl(record_to_jsonl(record));
    REQUIRE(parsed.pass.has_value());
    CHECK(*parsed.pass == *record.pass);
}
