#include "svtail/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace svtail {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

[[noreturn]] void fail(const std::string& block, const std::string& message) {
    throw std::invalid_argument("config block [" + block + "]: " + message);
}

// Key-value view over one block, tracking which keys were consumed.
class KvReader {
public:
    KvReader(std::string block, std::map<std::string, std::string> kv)
        : block_(std::move(block)), kv_(std::move(kv)) {}

    bool has(const std::string& key) const { return kv_.count(key) > 0; }

    std::string get(const std::string& key) {
        auto it = kv_.find(key);
        if (it == kv_.end()) fail(block_, "missing required key '" + key + "'");
        used_.insert(key);
        return it->second;
    }

    std::string get_or(const std::string& key, const std::string& fallback) {
        if (!has(key)) return fallback;
        return get(key);
    }

    long long get_int(const std::string& key) {
        std::string raw = get(key);
        try {
            std::size_t pos = 0;
            long long v = std::stoll(raw, &pos);
            if (pos != raw.size()) throw std::invalid_argument(raw);
            return v;
        } catch (const std::exception&) {
            fail(block_, "key '" + key + "' is not an integer: '" + raw + "'");
        }
    }

    long long get_int_or(const std::string& key, long long fallback) {
        return has(key) ? get_int(key) : fallback;
    }

    double get_double(const std::string& key) {
        std::string raw = get(key);
        try {
            std::size_t pos = 0;
            double v = std::stod(raw, &pos);
            if (pos != raw.size()) throw std::invalid_argument(raw);
            return v;
        } catch (const std::exception&) {
            fail(block_, "key '" + key + "' is not a number: '" + raw + "'");
        }
    }

    double get_double_or(const std::string& key, double fallback) {
        return has(key) ? get_double(key) : fallback;
    }

    std::vector<double> get_double_list(const std::string& key) {
        std::string raw = get(key);
        std::vector<double> out;
        std::stringstream ss(raw);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) fail(block_, "key '" + key + "' has an empty list element");
            try {
                std::size_t pos = 0;
                out.push_back(std::stod(item, &pos));
                if (pos != item.size()) throw std::invalid_argument(item);
            } catch (const std::exception&) {
                fail(block_, "key '" + key + "' has a non-numeric element: '" + item + "'");
            }
        }
        if (out.empty()) fail(block_, "key '" + key + "' must be a non-empty list");
        return out;
    }

    const std::map<std::string, std::string>& raw() const { return kv_; }

    void check_all_consumed() const {
        for (const auto& [key, value] : kv_) {
            if (!used_.count(key)) fail(block_, "unknown key '" + key + "'");
        }
    }

private:
    std::string block_;
    std::map<std::string, std::string> kv_;
    std::set<std::string> used_;
};

EnsembleSpec ensemble_from_reader(KvReader& kv, const std::string& prefix, int big_n,
                                  const std::string& block) {
    std::string kind_name = kv.get_or(prefix + ".kind", "gaussian");
    EnsembleKind kind = ensemble_kind_from_name(kind_name);
    switch (kind) {
        case EnsembleKind::Gaussian: return EnsembleSpec::gaussian();
        case EnsembleKind::UniformCube: return EnsembleSpec::uniform_cube();
        case EnsembleKind::Laplace: return EnsembleSpec::laplace();
        case EnsembleKind::Ell1Ball: return EnsembleSpec::ell1_ball();
        case EnsembleKind::IndependentColumns:
            return EnsembleSpec::independent_columns(
                ensemble_from_reader(kv, prefix + ".column", big_n, block));
        case EnsembleKind::Concatenated: {
            int base_cols = static_cast<int>(kv.get_int(prefix + ".base_cols"));
            EnsembleSpec base = ensemble_from_reader(kv, prefix + ".base", big_n, block);
            return make_concatenated(base, big_n, base_cols);
        }
    }
    fail(block, "unreachable ensemble kind");
}

ExperimentConfig build_config(const std::string& name, std::map<std::string, std::string> raw) {
    KvReader kv(name, std::move(raw));
    ExperimentConfig cfg;
    cfg.name = name;
    cfg.kind = experiment_kind_from_name(kv.get("experiment"));
    cfg.n = static_cast<int>(kv.get_int("n"));
    if (cfg.n < 1) fail(name, "n must be positive");
    cfg.trials = kv.get_int("trials");
    if (cfg.trials < 1) fail(name, "trials must be positive");
    cfg.seed = static_cast<std::uint64_t>(kv.get_int("seed"));
    cfg.threads = static_cast<int>(kv.get_int_or("threads", 0));

    const bool matrix_experiment =
        cfg.kind == ExperimentKind::SvTail || cfg.kind == ExperimentKind::CompInfTail ||
        cfg.kind == ExperimentKind::ProjectedSvTail || cfg.kind == ExperimentKind::EventCover ||
        cfg.kind == ExperimentKind::RoundingMoment;
    if (matrix_experiment) {
        cfg.big_n = static_cast<int>(kv.get_int("N"));
        if (cfg.big_n < cfg.n) fail(name, "requires N >= n");
    } else {
        cfg.big_n = static_cast<int>(kv.get_int_or("N", cfg.n));
        if (cfg.big_n != cfg.n) fail(name, "this experiment kind requires N = n (or omit N)");
    }

    cfg.ensemble = ensemble_from_reader(kv, "ensemble", cfg.big_n, name);

    switch (cfg.kind) {
        case ExperimentKind::SvTail:
        case ExperimentKind::DistanceTail:
        case ExperimentKind::ProjectedSvTail:
            cfg.thresholds = kv.get_double_list("thresholds");
            cfg.normalization = normalization_from_name(kv.get_or("normalization", "absolute"));
            break;
        case ExperimentKind::CompInfTail:
            cfg.thresholds = kv.get_double_list("thresholds");
            if (cfg.thresholds.size() != 1) fail(name, "comp_inf_tail takes exactly one threshold");
            cfg.normalization = normalization_from_name(kv.get_or("normalization", "absolute"));
            cfg.delta = kv.get_double("delta");
            cfg.rho = kv.get_double("rho");
            break;
        case ExperimentKind::SmallBall:
            cfg.epsilon = kv.get_double("epsilon");
            break;
        case ExperimentKind::Paouris:
            cfg.t = kv.get_double("t");
            cfg.paouris_c = kv.get_double_or("paouris_c", 3.0);
            break;
        case ExperimentKind::OrderStat:
            cfg.c1 = kv.get_double("c1");
            cfg.r = kv.get_double("r");
            break;
        case ExperimentKind::EventCover:
            cfg.epsilon = kv.get_double("epsilon");
            cfg.cover_c1 = kv.get_double_or("cover_c1", 2.0);
            break;
        case ExperimentKind::RoundingMoment:
            cfg.epsilon = kv.get_double("epsilon");
            break;
        case ExperimentKind::SparsityProb:
            cfg.delta = kv.get_double("delta");
            cfg.rho = kv.get_double("rho");
            cfg.epsilon = kv.get_double("epsilon");
            break;
        case ExperimentKind::Isotropy:
            break;
    }

    for (std::size_t i = 1; i < cfg.thresholds.size(); ++i) {
        if (!(cfg.thresholds[i] > cfg.thresholds[i - 1])) {
            fail(name, "thresholds must be strictly increasing");
        }
    }
    kv.check_all_consumed();
    return cfg;
}

}  // namespace

const char* experiment_kind_name(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::SvTail: return "sv_tail";
        case ExperimentKind::SmallBall: return "smallball";
        case ExperimentKind::Paouris: return "paouris";
        case ExperimentKind::CompInfTail: return "comp_inf_tail";
        case ExperimentKind::DistanceTail: return "distance_tail";
        case ExperimentKind::OrderStat: return "order_stat";
        case ExperimentKind::ProjectedSvTail: return "projected_sv_tail";
        case ExperimentKind::EventCover: return "event_cover";
        case ExperimentKind::RoundingMoment: return "rounding_moment";
        case ExperimentKind::SparsityProb: return "sparsity_prob";
        case ExperimentKind::Isotropy: return "isotropy";
    }
    throw std::logic_error("unreachable experiment kind");
}

ExperimentKind experiment_kind_from_name(const std::string& name) {
    static const std::map<std::string, ExperimentKind> table = {
        {"sv_tail", ExperimentKind::SvTail},
        {"smallball", ExperimentKind::SmallBall},
        {"paouris", ExperimentKind::Paouris},
        {"comp_inf_tail", ExperimentKind::CompInfTail},
        {"distance_tail", ExperimentKind::DistanceTail},
        {"order_stat", ExperimentKind::OrderStat},
        {"projected_sv_tail", ExperimentKind::ProjectedSvTail},
        {"event_cover", ExperimentKind::EventCover},
        {"rounding_moment", ExperimentKind::RoundingMoment},
        {"sparsity_prob", ExperimentKind::SparsityProb},
        {"isotropy", ExperimentKind::Isotropy},
    };
    auto it = table.find(name);
    if (it == table.end()) throw std::invalid_argument("unknown experiment kind: " + name);
    return it->second;
}

std::vector<double> ExperimentConfig::absolute_thresholds() const {
    std::vector<double> out;
    out.reserve(thresholds.size());
    for (double t : thresholds) out.push_back(resolve_threshold(normalization, t, big_n, n));
    return out;
}

std::vector<ExperimentConfig> parse_config_text(const std::string& text) {
    std::vector<ExperimentConfig> out;
    std::string section;
    std::map<std::string, std::string> kv;
    bool in_section = false;

    auto flush = [&]() {
        if (in_section) out.push_back(build_config(section, std::move(kv)));
        kv.clear();
    };

    std::stringstream ss(text);
    std::string line;
    int line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw std::invalid_argument("config line " + std::to_string(line_no) +
                                            ": malformed section header");
            }
            flush();
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) {
                throw std::invalid_argument("config line " + std::to_string(line_no) +
                                            ": empty section name");
            }
            in_section = true;
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": expected 'key = value'");
        }
        if (!in_section) {
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": key outside of any [section]");
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": empty key");
        }
        if (kv.count(key)) {
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": duplicate key '" + key + "'");
        }
        kv[key] = value;
    }
    flush();
    if (out.empty()) throw std::invalid_argument("config contains no experiment blocks");
    return out;
}

std::vector<ExperimentConfig> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

void ensemble_to_key_values(const EnsembleSpec& spec, const std::string& prefix,
                            std::vector<std::pair<std::string, std::string>>& out) {
    out.emplace_back(prefix + ".kind", ensemble_kind_name(spec.kind()));
    if (spec.kind() == EnsembleKind::IndependentColumns) {
        ensemble_to_key_values(spec.inner(), prefix + ".column", out);
    } else if (spec.kind() == EnsembleKind::Concatenated) {
        out.emplace_back(prefix + ".base_cols", std::to_string(spec.base_cols()));
        ensemble_to_key_values(spec.inner(), prefix + ".base", out);
    }
}

EnsembleSpec ensemble_from_key_values(const std::map<std::string, std::string>& kv,
                                      const std::string& prefix, int big_n) {
    KvReader reader("<fragment>", kv);
    return ensemble_from_reader(reader, prefix, big_n, "<fragment>");
}

std::vector<std::pair<std::string, std::string>> config_key_values(const ExperimentConfig& cfg) {
    std::vector<std::pair<std::string, std::string>> out;
    out.emplace_back("experiment", experiment_kind_name(cfg.kind));
    ensemble_to_key_values(cfg.ensemble, "ensemble", out);
    out.emplace_back("N", std::to_string(cfg.big_n));
    out.emplace_back("n", std::to_string(cfg.n));
    out.emplace_back("trials", std::to_string(cfg.trials));
    out.emplace_back("seed", std::to_string(cfg.seed));
    out.emplace_back("threads", std::to_string(cfg.threads));
    if (!cfg.thresholds.empty()) {
        std::string list;
        for (std::size_t i = 0; i < cfg.thresholds.size(); ++i) {
            if (i) list += ", ";
            list += format_double(cfg.thresholds[i]);
        }
        out.emplace_back("thresholds", list);
        out.emplace_back("normalization", normalization_name(cfg.normalization));
    }
    switch (cfg.kind) {
        case ExperimentKind::CompInfTail:
            out.emplace_back("delta", format_double(cfg.delta));
            out.emplace_back("rho", format_double(cfg.rho));
            break;
        case ExperimentKind::SmallBall:
        case ExperimentKind::RoundingMoment:
            out.emplace_back("epsilon", format_double(cfg.epsilon));
            break;
        case ExperimentKind::Paouris:
            out.emplace_back("t", format_double(cfg.t));
            out.emplace_back("paouris_c", format_double(cfg.paouris_c));
            break;
        case ExperimentKind::OrderStat:
            out.emplace_back("c1", format_double(cfg.c1));
            out.emplace_back("r", format_double(cfg.r));
            break;
        case ExperimentKind::EventCover:
            out.emplace_back("epsilon", format_double(cfg.epsilon));
            out.emplace_back("cover_c1", format_double(cfg.cover_c1));
            break;
        case ExperimentKind::SparsityProb:
            out.emplace_back("delta", format_double(cfg.delta));
            out.emplace_back("rho", format_double(cfg.rho));
            out.emplace_back("epsilon", format_double(cfg.epsilon));
            break;
        default:
            break;
    }
    return out;
}

std::string emit_config(const ExperimentConfig& cfg) {
    std::string out = "[" + cfg.name + "]\n";
    for (const auto& [key, value] : config_key_values(cfg)) {
        out += key + " = " + value + "\n";
    }
    return out;
}

}  // namespace svtail
