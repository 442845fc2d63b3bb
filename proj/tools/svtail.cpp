// Batch runner for singular-value tail experiments.
//
//   svtail run --config experiments.cfg --out results.jsonl [--seed S] [--threads T]
//   svtail summarize --in results.jsonl [--out table.csv] [--format csv|jsonl]
//   svtail tail-curve --in results.jsonl --experiment NAME [--out curve.csv]
//   svtail self-test

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "svtail/config.hpp"
#include "svtail/records.hpp"
#include "svtail/selftest.hpp"

namespace {

// Exit codes: 1 usage/config, 2 I/O, 3 runtime failure during experiments.
constexpr int kConfigError = 1;
constexpr int kIoError = 2;
constexpr int kRunError = 3;

std::ostream& open_out(const std::string& path, std::ofstream& file) {
    if (path.empty() || path == "-") return std::cout;
    file.open(path, std::ios::app);
    if (!file) throw std::runtime_error("cannot open output path '" + path + "'");
    return file;
}

int cmd_run(const std::string& config_path, const std::string& out_path,
            std::optional<std::uint64_t> seed, std::optional<int> threads) {
    std::vector<svtail::ExperimentConfig> configs;
    try {
        configs = svtail::parse_config_file(config_path);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    }
    std::ofstream file;
    std::ostream* out;
    try {
        out = &open_out(out_path, file);
    } catch (const std::exception& e) {
        std::cerr << "output error: " << e.what() << "\n";
        return kIoError;
    }
    for (svtail::ExperimentConfig& cfg : configs) {
        if (seed) cfg.seed = *seed;
        if (threads) cfg.threads = *threads;
        try {
            svtail::ExperimentRecord record = svtail::run_experiment(cfg);
            *out << svtail::record_to_jsonl(record) << "\n";
            out->flush();
            std::cerr << "ran '" << cfg.name << "' (" << record.kind << ", "
                      << record.wall_seconds << " s)\n";
        } catch (const std::exception& e) {
            std::cerr << "experiment '" << cfg.name << "' failed: " << e.what() << "\n";
            return kRunError;
        }
    }
    return 0;
}

int cmd_summarize(const std::string& in_path, const std::string& out_path,
                  const std::string& format) {
    std::ifstream in(in_path);
    if (!in) {
        std::cerr << "input error: cannot open '" << in_path << "'\n";
        return kIoError;
    }
    std::ofstream file;
    try {
        std::ostream& out = open_out(out_path, file);
        if (format == "csv") {
            svtail::summarize_records(in, out);
        } else {
            // jsonl pass-through of records that parse, normalizing formatting
            std::string line;
            while (std::getline(in, line)) {
                if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
                out << svtail::record_to_jsonl(svtail::record_from_jsonl(line)) << "\n";
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "summarize error: " << e.what() << "\n";
        return kIoError;
    }
    return 0;
}

int cmd_tail_curve(const std::string& in_path, const std::string& out_path,
                   const std::string& experiment) {
    std::ifstream in(in_path);
    if (!in) {
        std::cerr << "input error: cannot open '" << in_path << "'\n";
        return kIoError;
    }
    std::ofstream file;
    try {
        std::ostream& out = open_out(out_path, file);
        svtail::tail_curve(in, experiment, out, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "tail-curve error: " << e.what() << "\n";
        return kIoError;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo experiments on smallest singular values of random matrices"};
    app.require_subcommand(1);

    std::string config_path, in_path, experiment;
    std::string out_path;
    std::string format = "csv";
    std::uint64_t seed_value = 0;
    int threads_value = 0;

    CLI::App* run = app.add_subcommand("run", "execute every experiment block of a config file");
    run->add_option("--config", config_path, "experiment config file")->required();
    CLI::Option* run_out = run->add_option("--out", out_path, "output JSONL path (default stdout)");
    CLI::Option* seed_opt = run->add_option("--seed", seed_value, "master seed override");
    CLI::Option* threads_opt = run->add_option("--threads", threads_value, "worker thread override");
    run_out->expected(1);

    CLI::App* summarize = app.add_subcommand("summarize", "flatten result records into a table");
    summarize->add_option("--in", in_path, "JSONL records path")->required();
    summarize->add_option("--out", out_path, "output path (default stdout)");
    summarize->add_option("--format", format, "csv or jsonl")
        ->check(CLI::IsMember({"csv", "jsonl"}))
        ->capture_default_str();

    CLI::App* curve = app.add_subcommand("tail-curve", "threshold vs p_hat for one experiment");
    curve->add_option("--in", in_path, "JSONL records path")->required();
    curve->add_option("--experiment", experiment, "experiment name")->required();
    curve->add_option("--out", out_path, "output path (default stdout)");

    CLI::App* selftest = app.add_subcommand("self-test", "run the full acceptance checklist");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) {
        std::optional<std::uint64_t> seed;
        std::optional<int> threads;
        if (*seed_opt) seed = seed_value;
        if (*threads_opt) threads = threads_value;
        return cmd_run(config_path, out_path, seed, threads);
    }
    if (summarize->parsed()) return cmd_summarize(in_path, out_path, format);
    if (curve->parsed()) return cmd_tail_curve(in_path, out_path, experiment);
    if (selftest->parsed()) return svtail::selftest::run_acceptance(std::cout) ? 0 : 1;
    return kConfigError;
}
