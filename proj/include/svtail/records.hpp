#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "svtail/config.hpp"
#include "svtail/montecarlo.hpp"

namespace svtail {

inline constexpr const char* kToolVersion = "svtail 0.1.0";

struct ThresholdResult {
    double threshold = 0.0;  // as configured (pre-normalization)
    std::string normalization = "absolute";
    TailEstimate estimate;
};

// One executed experiment block. Self-describing: re-running the echoed
// config reproduces (successes, trials) exactly.
struct ExperimentRecord {
    std::string experiment;  // block name from the config
    std::string kind;
    int big_n = 0;
    int n = 0;
    std::vector<std::pair<std::string, std::string>> config_echo;
    std::vector<ThresholdResult> results;              // tail experiments
    std::vector<std::pair<std::string, double>> extra; // verifier outputs
    std::optional<bool> pass;                          // verifier verdict
    double wall_seconds = 0.0;
    std::string version = kToolVersion;
};

// Executes one config block.
ExperimentRecord run_experiment(const ExperimentConfig& cfg);

// One JSON object per line; doubles carry 17 significant digits; field order
// fixed (experiment, kind, N, n, config, results, extra, pass, wall_seconds,
// version).
std::string record_to_jsonl(const ExperimentRecord& record);

// Parses one JSONL line; throws std::invalid_argument on malformed input.
ExperimentRecord record_from_jsonl(const std::string& line);

// CSV table over all per-threshold results, sorted by
// (experiment, N, n, threshold). Returns the row count.
int summarize_records(std::istream& records, std::ostream& out);

// Two-column-plus-CI curve for one experiment name; unknown names produce an
// empty table and a warning on `diag`.
int tail_curve(std::istream& records, const std::string& experiment, std::ostream& out,
               std::ostream& diag);

}  // namespace svtail
