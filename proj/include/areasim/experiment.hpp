#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "areasim/analysis.hpp"
#include "areasim/engine.hpp"
#include "areasim/model.hpp"

namespace areasim::cli {

enum class ExperimentKind {
    weak_scaling,
    cv_area_sweep,
    cv_rate_sweep,
    d_sweep,
    theory_check,
    access_check,
    single_run,
};

std::string to_string(ExperimentKind k);
ExperimentKind experiment_from_string(const std::string& s);  // throws ConfigError

/// Invalid configuration. `key` is the dotted path of the offending entry.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& message);
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

/// Affine per-call plus per-byte exchange cost. Only used for reporting.
struct ExchangeCostModel {
    double alpha_per_call = 500.0;
    double beta_per_byte = 0.5;
};

struct TheoryConfig {
    analysis::CycleTimeModel model{1.0, 0.1, 128, 10000, 10, 0.0};
    std::uint32_t replicates = 20;
    double tail_mass = 0.035;
    std::int64_t tail_cycles = 100000;
    std::uint64_t max_replicates = 1000000;
};

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::single_run;
    std::filesystem::path output_dir = "areasim_out";
    std::vector<std::uint64_t> seeds{12, 654, 91856};

    BenchmarkParams network;  // rng_seed is replaced by each entry of `seeds`
    HeterogeneityParams heterogeneity;

    std::uint32_t threads_per_rank = 2;
    std::vector<Scheme> schemes{Scheme::conventional, Scheme::structure_aware};

    EngineOptions engine;
    CostParams cost;
    ExchangeCostModel exchange_cost;

    /// Sweep values: M, cv, D or M, depending on the experiment.
    std::vector<double> grid;

    TheoryConfig theory;

    bool write_metrics = true;
    bool write_heatmaps = false;
};

/// Desk-scale defaults for an experiment, including its default grid.
ExperimentConfig default_config(ExperimentKind kind);

/// Parses a config document over the defaults of its experiment. Unknown
/// keys and ill-typed values raise ConfigError naming the key.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical form with every field spelled out; hashed for the manifest.
nlohmann::json to_json(const ExperimentConfig& cfg);

/// Throws ConfigError for semantically invalid combinations.
void validate(const ExperimentConfig& cfg);

/// One grid point of a sweep.
struct PointSpec {
    std::string label;
    double value = 0.0;
    BenchmarkParams network;
    HeterogeneityParams heterogeneity;
};

std::vector<PointSpec> sweep_points(const ExperimentConfig& cfg);

/// Scalar outcome of one (scheme, seed) simulation run.
struct RunSummary {
    std::string run_id;
    Scheme scheme = Scheme::conventional;
    std::uint64_t seed = 0;
    std::uint32_t n_ranks = 0;
    std::int64_t n_cycles = 0;
    std::int64_t period = 1;
    double update = 0.0;
    double deliver = 0.0;
    double collocate = 0.0;
    double sync_proxy = 0.0;
    double exchange_estimate = 0.0;
    double proxy_rtf = 0.0;
    std::uint64_t n_global_exchanges = 0;
    std::uint64_t n_local_exchanges = 0;
    std::uint64_t bytes = 0;
    std::uint64_t resize_rounds = 0;
    std::uint64_t n_spikes = 0;
    double f_irr_intra = 0.0;
    double f_irr_inter = 0.0;
    double f_irr_combined = 0.0;
    double frozen_fraction = 0.0;
};

struct PointResult {
    PointSpec point;
    std::vector<RunSummary> runs;  // scheme-major, seeds in config order
};

/// Derives the scalar summary of a completed run.
RunSummary summarize_run(const RunResult& result, const PartitionPlan& plan, const NetworkSpec& net,
                         const ExperimentConfig& cfg, std::string run_id, std::uint64_t seed);

/// Runs every (scheme, seed) combination of one sweep point. Per-run CSVs
/// are written below `artifact_dir` when it is given.
PointResult run_point(const ExperimentConfig& cfg, const PointSpec& point,
                      const std::optional<std::filesystem::path>& artifact_dir = std::nullopt);

/// Mean and sample standard deviation over seeds, per scheme.
nlohmann::json aggregate(const PointResult& point);

nlohmann::json theory_point(const ExperimentConfig& cfg, const PointSpec& point);
nlohmann::json access_point(const ExperimentConfig& cfg, const PointSpec& point);

/// Runs the configured experiment and writes its artifacts. Completed points
/// recorded in an existing manifest with the same config hash are reused.
/// Returns the summary document.
nlohmann::json run_experiment(const ExperimentConfig& cfg, std::ostream* log = nullptr);

// Artifact writers -----------------------------------------------------------

void write_metrics_csv(std::ostream& out, const RunResult& result, const ProxyMatrix& proxy,
                       const std::string& run_id, bool header);
void write_exchanges_csv(std::ostream& out, const RunResult& result, const std::string& run_id,
                         bool header);
/// Dense matrix with a `global_exchange` marker row below the header.
void write_heatmap_csv(std::ostream& out, const ProxyMatrix& proxy, std::int64_t period_cycles);
void write_heatmap_long_csv(std::ostream& out, const ProxyMatrix& proxy);

/// Shortest round-trip decimal form of a double.
std::string format_number(double v);

/// Stable 64-bit FNV-1a digest, hex encoded.
std::string fnv1a_hex(const std::string& text);

} // namespace areasim::cli
