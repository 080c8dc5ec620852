#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "areasim/common.hpp"
#include "areasim/model.hpp"

namespace areasim {

struct Placement {
    std::uint32_t rank = 0;
    std::uint32_t thread = 0;
    std::uint32_t slot = 0;  // position in the (rank, thread) neuron list

    bool operator==(const Placement&) const = default;
};

/// Neuron to (rank, thread) assignment for one distribution scheme.
///
/// Ids [0, n_real_neurons) are the network's neurons. Under the
/// structure-aware scheme ranks hosting smaller areas are padded with ghost
/// slots so every rank hosts the same number of slots; ghost ids start at
/// n_real_neurons, are listed in `frozen_ids`, and never carry synapses.
struct PartitionPlan {
    Scheme scheme = Scheme::conventional;
    std::uint32_t n_ranks = 1;
    std::uint32_t threads_per_rank = 1;
    std::uint32_t n_real_neurons = 0;
    std::vector<Placement> assignment;  // indexed by id, real then ghost
    std::vector<NeuronId> frozen_ids;   // sorted
    std::int64_t lumping_factor = 1;
    std::int64_t global_exchange_period_cycles = 1;
    double frozen_fraction = 0.0;

    std::uint32_t n_threads_total() const { return n_ranks * threads_per_rank; }
    std::size_t n_slots() const { return assignment.size(); }
    bool is_ghost(NeuronId id) const { return id >= n_real_neurons; }

    /// Ids hosted on (rank, thread), in slot order.
    std::vector<std::vector<std::vector<NeuronId>>> hosted() const;
};

/// Round-robin over the flattened (rank, thread) sequence in id order.
PartitionPlan plan_round_robin(const NetworkSpec& net, std::uint32_t n_ranks,
                               std::uint32_t threads_per_rank);

/// One area per rank, round-robin over threads within the rank, padded with
/// frozen ghost slots up to the largest area.
PartitionPlan plan_structure_aware(const NetworkSpec& net, std::uint32_t threads_per_rank);

PartitionPlan make_plan(const NetworkSpec& net, Scheme scheme, std::uint32_t n_ranks,
                        std::uint32_t threads_per_rank);

void to_json(nlohmann::json& j, const PartitionPlan& plan);
void from_json(const nlohmann::json& j, PartitionPlan& plan);

} // namespace areasim
