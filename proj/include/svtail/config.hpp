#pragma once

#include <map>
#include <string>
#include <vector>

#include "svtail/ensembles.hpp"
#include "svtail/montecarlo.hpp"

namespace svtail {

enum class ExperimentKind {
    SvTail,
    SmallBall,
    Paouris,
    CompInfTail,
    DistanceTail,
    OrderStat,
    ProjectedSvTail,
    EventCover,
    RoundingMoment,
    SparsityProb,
    Isotropy,
};

const char* experiment_kind_name(ExperimentKind kind);
ExperimentKind experiment_kind_from_name(const std::string& name);

// One experiment block of a config file, fully resolved.
struct ExperimentConfig {
    std::string name;
    ExperimentKind kind = ExperimentKind::SvTail;
    EnsembleSpec ensemble = EnsembleSpec::gaussian();
    int big_n = 0;
    int n = 0;
    long long trials = 0;
    std::uint64_t seed = 0;
    int threads = 0;  // 0 = hardware concurrency
    std::vector<double> thresholds;
    Normalization normalization = Normalization::Absolute;
    double delta = 0.0;
    double rho = 0.0;
    double epsilon = 0.0;
    double c1 = 0.0;          // order-statistic fraction
    double r = 0.0;           // order-statistic level
    double t = 0.0;           // Paouris deviation parameter
    double paouris_c = 3.0;
    double cover_c1 = 2.0;    // HS-band constant of the event cover

    // Resolved absolute thresholds for the tail experiments.
    std::vector<double> absolute_thresholds() const;
};

// Parses a config file: '#' comments, one '[name]' section per experiment
// block, 'key = value' lines, ensembles under dotted 'ensemble.*' keys.
std::vector<ExperimentConfig> parse_config_file(const std::string& path);
std::vector<ExperimentConfig> parse_config_text(const std::string& text);

// Serialization back to config text; parse(emit(cfg)) == cfg.
std::string emit_config(const ExperimentConfig& cfg);

// Ordered key=value echo of one block (what emit_config writes, minus the
// section header).
std::vector<std::pair<std::string, std::string>> config_key_values(const ExperimentConfig& cfg);

// Ensemble (de)serialization through dotted key-value fragments under
// `prefix` ("ensemble"). `big_n` supplies the row count a concatenated spec
// is built for.
EnsembleSpec ensemble_from_key_values(const std::map<std::string, std::string>& kv,
                                      const std::string& prefix, int big_n);
void ensemble_to_key_values(const EnsembleSpec& spec, const std::string& prefix,
                            std::vector<std::pair<std::string, std::string>>& out);

}  // namespace svtail
