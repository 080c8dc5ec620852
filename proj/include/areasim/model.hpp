#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "areasim/common.hpp"

namespace areasim {

/// Discrete time axis of a simulation. All delays and periods are integer
/// steps; `d_min_inter_steps` is a multiple of `d_min_steps` and the run
/// length is a multiple of `d_min_inter_steps`, so a run always ends on a
/// global-exchange boundary.
struct TimeGrid {
    std::int64_t h_steps_per_ms = 10;
    std::int64_t d_min_steps = 1;
    std::int64_t d_min_inter_steps = 10;
    std::int64_t t_model_steps = 1000;

    /// Ratio between the inter-area and the overall minimum delay.
    std::int64_t lumping_factor() const { return d_min_inter_steps / d_min_steps; }
    /// Number of simulation cycles, each spanning d_min_steps.
    std::int64_t n_cycles() const { return t_model_steps / d_min_steps; }
    double t_model_ms() const {
        return static_cast<double>(t_model_steps) / static_cast<double>(h_steps_per_ms);
    }

    /// Throws ValidationError naming the violated invariant.
    void validate() const;

    bool operator==(const TimeGrid&) const = default;
};

struct AreaSpec {
    std::uint32_t area_id = 0;
    std::uint32_t n_neurons = 1;
    double rate_hz = 0.0;

    bool operator==(const AreaSpec&) const = default;
};

/// Ignore-and-fire neuron: fires at every step t with
/// (t + fire_phase_steps) % fire_interval_steps == 0, regardless of input.
/// An interval of kSilent means the neuron never fires.
struct NeuronSpec {
    static constexpr std::int64_t kSilent = 0;

    std::int64_t fire_interval_steps = kSilent;
    std::int64_t fire_phase_steps = 0;
    bool frozen = false;
    std::uint32_t area = 0;

    bool fires_at(Step t) const {
        return !frozen && fire_interval_steps != kSilent &&
               (t + fire_phase_steps) % fire_interval_steps == 0;
    }

    bool operator==(const NeuronSpec&) const = default;
};

struct SynapseSpec {
    NeuronId source = 0;
    NeuronId target = 0;
    std::int64_t delay_steps = 1;
    RangeClass range = RangeClass::intra;

    bool operator==(const SynapseSpec&) const = default;
};

struct NetworkSpec {
    TimeGrid grid;
    std::vector<AreaSpec> areas;
    std::vector<NeuronSpec> neurons;  // indexed by global id, contiguous per area
    std::vector<SynapseSpec> synapses;
    std::uint32_t k_intra = 0;
    std::uint32_t k_inter = 0;
    std::map<std::string, double> metadata;

    std::size_t n_neurons() const { return neurons.size(); }
    std::size_t n_areas() const { return areas.size(); }
    /// First global id of each area, plus a trailing total.
    std::vector<NeuronId> area_offsets() const;

    /// Full scan of every structural invariant. Throws ValidationError.
    void validate() const;

    bool operator==(const NetworkSpec&) const = default;
};

struct DelayDistribution {
    double mean_ms = 1.0;
    double sd_ms = 0.0;
};

struct BenchmarkParams {
    std::uint32_t n_areas = 4;
    std::uint32_t neurons_per_area = 100;
    std::uint32_t k_intra = 10;
    std::uint32_t k_inter = 10;
    TimeGrid grid;
    DelayDistribution intra_delay{1.25, 0.625};
    DelayDistribution inter_delay{5.0, 2.5};
    double rate_hz = 2.5;
    std::uint64_t rng_seed = 12;
};

struct HeterogeneityParams {
    double cv_area_size = 0.0;
    double cv_rate = 0.0;
};

/// round(1000 * h / rate); kSilent for rate 0. Throws if the interval
/// would round to zero.
std::int64_t fire_interval_for_rate(double rate_hz, std::int64_t h_steps_per_ms);

/// Delay in steps: Gaussian sample in ms rounded to the nearest step and
/// clamped below at `cutoff_steps`.
std::int64_t delay_to_steps(double delay_ms, std::int64_t h_steps_per_ms,
                            std::int64_t cutoff_steps);

/// Homogeneous multi-area benchmark network: equal area sizes and rates,
/// exactly k_intra intra-area and k_inter inter-area outgoing synapses per
/// neuron.
NetworkSpec generate_benchmark(const BenchmarkParams& params);

/// Benchmark network whose area sizes and rates are drawn from normal
/// distributions with the given coefficients of variation. Realized
/// statistics are stored in `metadata`.
NetworkSpec generate_heterogeneous(const BenchmarkParams& params,
                                   const HeterogeneityParams& hetero);

void to_json(nlohmann::json& j, const TimeGrid& g);
void from_json(const nlohmann::json& j, TimeGrid& g);
void to_json(nlohmann::json& j, const NetworkSpec& net);
void from_json(const nlohmann::json& j, NetworkSpec& net);

} // namespace areasim
