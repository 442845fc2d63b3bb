#include "svtail/records.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace svtail {

namespace {

std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

std::string json_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::string record_to_jsonl(const ExperimentRecord& record) {
    std::string out = "{";
    out += "\"experiment\":\"" + json_escape(record.experiment) + "\"";
    out += ",\"kind\":\"" + json_escape(record.kind) + "\"";
    out += ",\"N\":" + std::to_string(record.big_n);
    out += ",\"n\":" + std::to_string(record.n);
    out += ",\"config\":{";
    for (std::size_t i = 0; i < record.config_echo.size(); ++i) {
        if (i) out += ",";
        out += "\"" + json_escape(record.config_echo[i].first) + "\":\"" +
               json_escape(record.config_echo[i].second) + "\"";
    }
    out += "},\"results\":[";
    for (std::size_t i = 0; i < record.results.size(); ++i) {
        const ThresholdResult& r = record.results[i];
        if (i) out += ",";
        out += "{\"threshold\":" + json_double(r.threshold);
        out += ",\"normalization\":\"" + json_escape(r.normalization) + "\"";
        out += ",\"trials\":" + std::to_string(r.estimate.trials);
        out += ",\"successes\":" + std::to_string(r.estimate.successes);
        out += ",\"p_hat\":" + json_double(r.estimate.p_hat());
        out += ",\"ci_low\":" + json_double(r.estimate.ci_low());
        out += ",\"ci_high\":" + json_double(r.estimate.ci_high());
        auto rot = r.estimate.rule_of_three();
        out += ",\"rule_of_three\":" + (rot ? json_double(*rot) : std::string("null"));
        out += ",\"discarded\":" + std::to_string(r.estimate.discarded_degenerate);
        out += "}";
    }
    out += "],\"extra\":{";
    for (std::size_t i = 0; i < record.extra.size(); ++i) {
        if (i) out += ",";
        out += "\"" + json_escape(record.extra[i].first) + "\":" + json_double(record.extra[i].second);
    }
    out += "},\"pass\":";
    out += record.pass ? (*record.pass ? "true" : "false") : "null";
    out += ",\"wall_seconds\":" + json_double(record.wall_seconds);
    out += ",\"version\":\"" + json_escape(record.version) + "\"}";
    return out;
}

ExperimentRecord record_from_jsonl(const std::string& line) {
    nlohmann::ordered_json j;
    try {
        j = nlohmann::ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("malformed JSONL record: ") + e.what());
    }
    ExperimentRecord record;
    try {
        record.experiment = j.at("experiment").get<std::string>();
        record.kind = j.at("kind").get<std::string>();
        record.big_n = j.at("N").get<int>();
        record.n = j.at("n").get<int>();
        for (auto& [key, value] : j.at("config").items()) {
            record.config_echo.emplace_back(key, value.get<std::string>());
        }
        for (auto& item : j.at("results")) {
            ThresholdResult r;
            r.threshold = item.at("threshold").get<double>();
            r.normalization = item.at("normalization").get<std::string>();
            r.estimate.trials = item.at("trials").get<long long>();
            r.estimate.successes = item.at("successes").get<long long>();
            r.estimate.discarded_degenerate = item.at("discarded").get<long long>();
            record.results.push_back(std::move(r));
        }
        for (auto& [key, value] : j.at("extra").items()) {
            record.extra.emplace_back(key, value.get<double>());
        }
        if (!j.at("pass").is_null()) record.pass = j.at("pass").get<bool>();
        record.wall_seconds = j.at("wall_seconds").get<double>();
        record.version = j.at("version").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("malformed JSONL record: ") + e.what());
    }
    return record;
}

namespace {

struct SummaryRow {
    std::string experiment;
    int big_n;
    int n;
    double threshold;
    std::string normalization;
    double p_hat, ci_low, ci_high;
    long long trials, discards;
};

std::vector<SummaryRow> collect_rows(std::istream& records) {
    std::vector<SummaryRow> rows;
    std::string line;
    int line_no = 0;
    while (std::getline(records, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        ExperimentRecord record;
        try {
            record = record_from_jsonl(line);
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("line " + std::to_string(line_no) + ": " + e.what());
        }
        for (const ThresholdResult& r : record.results) {
            rows.push_back({record.experiment, record.big_n, record.n, r.threshold,
                            r.normalization, r.estimate.p_hat(), r.estimate.ci_low(),
                            r.estimate.ci_high(), r.estimate.trials,
                            r.estimate.discarded_degenerate});
        }
    }
    std::stable_sort(rows.begin(), rows.end(), [](const SummaryRow& a, const SummaryRow& b) {
        if (a.experiment != b.experiment) return a.experiment < b.experiment;
        if (a.big_n != b.big_n) return a.big_n < b.big_n;
        if (a.n != b.n) return a.n < b.n;
        return a.threshold < b.threshold;
    });
    return rows;
}

}  // namespace

int summarize_records(std::istream& records, std::ostream& out) {
    std::vector<SummaryRow> rows = collect_rows(records);
    out << "experiment,N,n,threshold,normalization,p_hat,ci_low,ci_high,trials,discards\n";
    for (const SummaryRow& r : rows) {
        out << r.experiment << ',' << r.big_n << ',' << r.n << ',' << json_double(r.threshold)
            << ',' << r.normalization << ',' << json_double(r.p_hat) << ','
            << json_double(r.ci_low) << ',' << json_double(r.ci_high) << ',' << r.trials << ','
            << r.discards << '\n';
    }
    return static_cast<int>(rows.size());
}

int tail_curve(std::istream& records, const std::string& experiment, std::ostream& out,
               std::ostream& diag) {
    std::vector<SummaryRow> rows = collect_rows(records);
    out << "threshold,p_hat,ci_low,ci_high\n";
    int count = 0;
    for (const SummaryRow& r : rows) {
        if (r.experiment != experiment) continue;
        out << json_double(r.threshold) << ',' << json_double(r.p_hat) << ','
            << json_double(r.ci_low) << ',' << json_double(r.ci_high) << '\n';
        ++count;
    }
    if (count == 0) diag << "warning: no records for experiment '" << experiment << "'\n";
    return count;
}

ExperimentRecord run_experiment(const ExperimentConfig& cfg) {
    ExperimentRecord record;
    record.experiment = cfg.name;
    record.kind = experiment_kind_name(cfg.kind);
    record.big_n = cfg.big_n;
    record.n = cfg.n;
    record.config_echo = config_key_values(cfg);

    auto start = std::chrono::steady_clock::now();
    RandomSeed seed{cfg.seed, 0};

    auto push_results = [&](const std::vector<TailEstimate>& estimates,
                            const std::vector<double>& configured) {
        for (std::size_t i = 0; i < estimates.size(); ++i) {
            record.results.push_back(
                {configured[i], normalization_name(cfg.normalization), estimates[i]});
        }
    };

    switch (cfg.kind) {
        case ExperimentKind::SvTail: {
            auto ests = estimate_sv_tail(cfg.ensemble, cfg.big_n, cfg.n, cfg.absolute_thresholds(),
                                         cfg.trials, seed, cfg.threads);
            push_results(ests, cfg.thresholds);
            break;
        }
        case ExperimentKind::SmallBall: {
            RealVector y = RealVector::Zero(cfg.n);
            TailEstimate est =
                estimate_smallball(cfg.ensemble, cfg.n, cfg.epsilon, y, cfg.trials, seed, cfg.threads);
            record.results.push_back({cfg.epsilon, "absolute", est});
            break;
        }
        case ExperimentKind::Paouris: {
            TailEstimate est = estimate_paouris(cfg.ensemble, cfg.n, cfg.t, cfg.paouris_c,
                                                cfg.trials, seed, cfg.threads);
            record.results.push_back({cfg.t, "absolute", est});
            break;
        }
        case ExperimentKind::CompInfTail: {
            TailEstimate est = estimate_comp_inf_tail(cfg.ensemble, cfg.big_n, cfg.n, cfg.delta,
                                                      cfg.rho, cfg.absolute_thresholds()[0],
                                                      cfg.trials, seed, cfg.threads);
            record.results.push_back({cfg.thresholds[0], normalization_name(cfg.normalization), est});
            break;
        }
        case ExperimentKind::DistanceTail: {
            auto ests = estimate_distance_tail(cfg.ensemble, cfg.n, cfg.absolute_thresholds(),
                                               cfg.trials, seed, cfg.threads);
            push_results(ests, cfg.thresholds);
            break;
        }
        case ExperimentKind::OrderStat: {
            TailEstimate est = estimate_order_stat(cfg.ensemble, cfg.n, cfg.c1, cfg.r, cfg.trials,
                                                   seed, cfg.threads);
            record.results.push_back({cfg.r, "absolute", est});
            break;
        }
        case ExperimentKind::ProjectedSvTail: {
            int d = cfg.big_n - cfg.n + 1;
            std::vector<int> j(d);
            for (int i = 0; i < d; ++i) j[i] = i;
            ProjectedTailResult result =
                estimate_projected_sv_tail(cfg.ensemble, cfg.big_n, cfg.n, j,
                                           cfg.absolute_thresholds(), cfg.trials, seed, cfg.threads);
            push_results(result.sv_tail, cfg.thresholds);
            record.extra.emplace_back("codimension", result.codimension);
            record.extra.emplace_back("codimension_failures",
                                      static_cast<double>(result.codimension_failures));
            for (std::size_t i = 0; i < result.fixed_x_tail.size(); ++i) {
                record.extra.emplace_back("fixed_x_p_hat_" + std::to_string(i),
                                          result.fixed_x_tail[i].p_hat());
            }
            break;
        }
        case ExperimentKind::EventCover: {
            EventCoverReport report = verify_event_cover(cfg.ensemble, cfg.big_n, cfg.n,
                                                         cfg.epsilon, cfg.cover_c1, cfg.trials,
                                                         seed, cfg.threads);
            record.extra.emplace_back("samples", static_cast<double>(report.samples));
            record.extra.emplace_back("violations", static_cast<double>(report.violations));
            record.extra.emplace_back("event_count", static_cast<double>(report.event_count));
            record.extra.emplace_back("discarded", static_cast<double>(report.discarded_degenerate));
            record.pass = report.ok();
            break;
        }
        case ExperimentKind::RoundingMoment: {
            CounterRng rng(RandomSeed{cfg.seed, 0});
            RealMatrix a = detail::sample_matrix_with(cfg.ensemble, cfg.big_n, cfg.n, rng);
            RealVector y = random_unit_vector(cfg.n, rng);
            MomentReport report =
                verify_rounding_moment(a, y, cfg.epsilon, cfg.trials, RandomSeed{cfg.seed, 1});
            record.extra.emplace_back("empirical_mean", report.empirical_mean);
            record.extra.emplace_back("bound", report.bound);
            record.extra.emplace_back("std_error", report.std_error);
            record.pass = report.ok();
            break;
        }
        case ExperimentKind::SparsityProb: {
            CounterRng rng(RandomSeed{cfg.seed, 0});
            RealVector y = random_compressible_unit(cfg.n, cfg.delta, cfg.rho, rng);
            DecompositionParams params{cfg.delta, cfg.rho, cfg.epsilon, cfg.n};
            SparsityReport report = verify_sparsity_prob(y, params, RandomSeed{cfg.seed, 1}, cfg.trials);
            record.extra.emplace_back("p_hat", report.in_sparse.p_hat());
            record.extra.emplace_back("m", static_cast<double>(report.m));
            record.pass = report.ok();
            break;
        }
        case ExperimentKind::Isotropy: {
            IsotropyReport report = isotropy_report(cfg.ensemble, cfg.n, cfg.trials, seed);
            record.extra.emplace_back("max_cov_deviation", report.max_cov_deviation);
            record.extra.emplace_back("max_mean_abs", report.max_mean_abs);
            break;
        }
    }

    record.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return record;
}

}  // namespace svtail
