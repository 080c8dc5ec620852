#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <tuple>
#include <vector>

#include "areasim/engine.hpp"
#include "areasim/model.hpp"
#include "areasim/partition.hpp"

namespace areasim::testing {

inline BenchmarkParams toy_params(std::uint32_t n_areas, std::uint32_t per_area, std::uint32_t k_intra,
                                  std::uint32_t k_inter, std::int64_t lumping, std::int64_t n_cycles,
                                  double rate_hz, std::uint64_t seed) {
    BenchmarkParams p;
    p.n_areas = n_areas;
    p.neurons_per_area = per_area;
    p.k_intra = k_intra;
    p.k_inter = k_inter;
    p.grid.h_steps_per_ms = 10;
    p.grid.d_min_steps = 1;
    p.grid.d_min_inter_steps = lumping;
    p.grid.t_model_steps = n_cycles;
    p.rate_hz = rate_hz;
    p.rng_seed = seed;
    return p;
}

/// Every neuron fires exactly once, during the first cycle.
inline void fire_once_at_start(NetworkSpec& net) {
    for (std::size_t g = 0; g < net.neurons.size(); ++g) {
        auto& n = net.neurons[g];
        n.fire_interval_steps = net.grid.t_model_steps;
        const auto t0 = static_cast<std::int64_t>(g) % net.grid.d_min_steps;
        n.fire_phase_steps = (net.grid.t_model_steps - t0) % net.grid.t_model_steps;
    }
}

/// Emission steps of every neuron, enumerated from the neuron specs alone.
inline std::vector<std::pair<NeuronId, Step>> all_emissions(const NetworkSpec& net) {
    std::vector<std::pair<NeuronId, Step>> out;
    for (NeuronId g = 0; g < net.neurons.size(); ++g)
        for (Step t = 0; t < net.grid.t_model_steps; ++t)
            if (net.neurons[g].fires_at(t)) out.emplace_back(g, t);
    return out;
}

/// Brute-force delivery multiset: every (synapse, emission) pair arriving
/// before the end of the run.
inline std::vector<DeliveryRecord> expected_deliveries(const NetworkSpec& net) {
    std::multimap<NeuronId, Step> emissions;
    for (const auto& [g, t] : all_emissions(net)) emissions.emplace(g, t);
    std::vector<DeliveryRecord> out;
    for (const auto& s : net.synapses) {
        auto [lo, hi] = emissions.equal_range(s.source);
        for (auto it = lo; it != hi; ++it)
            if (it->second + s.delay_steps < net.grid.t_model_steps)
                out.push_back({s.source, s.target, it->second + s.delay_steps, it->second});
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace areasim::testing
