// Command-line front end of the experiment runner.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "areasim/experiment.hpp"

namespace {

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size() || item.front() == '-')
            throw areasim::cli::ConfigError("--seeds", "'" + item + "' is not a non-negative integer");
        seeds.push_back(v);
    }
    if (seeds.empty()) throw areasim::cli::ConfigError("--seeds", "expected a comma-separated list of integers");
    return seeds;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Runs spiking-network partitioning experiments and writes CSV/JSON artifacts."};
    std::string config_path, experiment, out_dir, seeds;
    bool quiet = false;
    app.add_option("--config", config_path, "JSON experiment config")->check(CLI::ExistingFile);
    app.add_option("--experiment", experiment,
                   "Override: weak_scaling, cv_area_sweep, cv_rate_sweep, d_sweep, theory_check, access_check, "
                   "single_run");
    app.add_option("--out", out_dir, "Output directory (overrides output_dir)");
    app.add_option("--seeds", seeds, "Comma-separated seeds (overrides seeds)");
    app.add_flag("--quiet", quiet, "Suppress progress output");
    CLI11_PARSE(app, argc, argv);

    try {
        nlohmann::json doc = nlohmann::json::object();
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            try {
                doc = nlohmann::json::parse(in);
            } catch (const nlohmann::json::parse_error& e) {
                throw areasim::cli::ConfigError("--config", config_path + " is not valid JSON: " + e.what());
            }
            if (!doc.is_object()) throw areasim::cli::ConfigError("<root>", "expected an object");
        }
        if (!experiment.empty()) {
            // Keep an explicit grid only when the experiment is unchanged.
            if (doc.value("experiment", std::string{}) != experiment) doc.erase("grid");
            doc["experiment"] = experiment;
        }
        if (!out_dir.empty()) doc["output_dir"] = out_dir;
        if (!seeds.empty()) doc["seeds"] = parse_seeds(seeds);

        const auto cfg = areasim::cli::parse_config(doc);
        const auto summary = areasim::cli::run_experiment(cfg, quiet ? nullptr : &std::cerr);
        if (!quiet)
            std::cerr << "wrote " << summary["points"].size() << " point(s) to " << cfg.output_dir.string() << '\n';
        return 0;
    } catch (const areasim::cli::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
