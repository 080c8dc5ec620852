#include "areasim/partition.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

namespace areasim {

std::vector<std::vector<std::vector<NeuronId>>> PartitionPlan::hosted() const {
    std::vector<std::vector<std::vector<NeuronId>>> out(
        n_ranks, std::vector<std::vector<NeuronId>>(threads_per_rank));
    for (NeuronId id = 0; id < assignment.size(); ++id) {
        const auto& p = assignment[id];
        auto& list = out[p.rank][p.thread];
        if (list.size() <= p.slot) list.resize(p.slot + 1);
        list[p.slot] = id;
    }
    return out;
}

PartitionPlan plan_round_robin(const NetworkSpec& net, std::uint32_t n_ranks,
                               std::uint32_t threads_per_rank) {
    if (n_ranks == 0 || threads_per_rank == 0)
        throw ValidationError("n_ranks and threads_per_rank must be positive");
    PartitionPlan plan;
    plan.scheme = Scheme::conventional;
    plan.n_ranks = n_ranks;
    plan.threads_per_rank = threads_per_rank;
    plan.n_real_neurons = static_cast<std::uint32_t>(net.n_neurons());
    plan.lumping_factor = net.grid.lumping_factor();
    plan.global_exchange_period_cycles = 1;

    const std::uint32_t total = plan.n_threads_total();
    plan.assignment.resize(net.n_neurons());
    for (NeuronId gid = 0; gid < net.n_neurons(); ++gid) {
        const std::uint32_t flat = gid % total;
        plan.assignment[gid] = {flat / threads_per_rank, flat % threads_per_rank, gid / total};
    }
    return plan;
}

PartitionPlan plan_structure_aware(const NetworkSpec& net, std::uint32_t threads_per_rank) {
    if (threads_per_rank == 0) throw ValidationError("threads_per_rank must be positive");
    if (net.areas.empty()) throw ValidationError("structure-aware plan needs at least one area");
    PartitionPlan plan;
    plan.scheme = Scheme::structure_aware;
    plan.n_ranks = static_cast<std::uint32_t>(net.n_areas());
    plan.threads_per_rank = threads_per_rank;
    plan.n_real_neurons = static_cast<std::uint32_t>(net.n_neurons());
    plan.lumping_factor = net.grid.lumping_factor();
    plan.global_exchange_period_cycles = plan.lumping_factor;

    std::uint32_t max_size = 0;
    for (const auto& a : net.areas) max_size = std::max(max_size, a.n_neurons);

    const auto offsets = net.area_offsets();
    plan.assignment.resize(net.n_neurons());
    NeuronId next_ghost = plan.n_real_neurons;
    for (std::uint32_t rank = 0; rank < plan.n_ranks; ++rank) {
        for (std::uint32_t local = 0; local < max_size; ++local) {
            const Placement where{rank, local % threads_per_rank, local / threads_per_rank};
            if (local < net.areas[rank].n_neurons) {
                plan.assignment[offsets[rank] + local] = where;
            } else {
                plan.assignment.push_back(where);
                plan.frozen_ids.push_back(next_ghost++);
            }
        }
    }
    plan.frozen_fraction =
        static_cast<double>(plan.frozen_ids.size()) / static_cast<double>(plan.assignment.size());
    return plan;
}

PartitionPlan make_plan(const NetworkSpec& net, Scheme scheme, std::uint32_t n_ranks,
                        std::uint32_t threads_per_rank) {
    if (scheme == Scheme::conventional) return plan_round_robin(net, n_ranks, threads_per_rank);
    if (n_ranks != net.n_areas())
        throw ValidationError("structure-aware scheme requires one rank per area (" +
                              std::to_string(net.n_areas()) + "), got " + std::to_string(n_ranks));
    return plan_structure_aware(net, threads_per_rank);
}

void to_json(nlohmann::json& j, const PartitionPlan& plan) {
    nlohmann::json assignment = nlohmann::json::array();
    for (const auto& p : plan.assignment)
        assignment.push_back(nlohmann::json::array({p.rank, p.thread, p.slot}));
    j = nlohmann::json{{"scheme", to_string(plan.scheme)},
                       {"n_ranks", plan.n_ranks},
                       {"threads_per_rank", plan.threads_per_rank},
                       {"n_real_neurons", plan.n_real_neurons},
                       {"lumping_factor", plan.lumping_factor},
                       {"global_exchange_period_cycles", plan.global_exchange_period_cycles},
                       {"frozen_fraction", plan.frozen_fraction},
                       {"frozen_ids", plan.frozen_ids},
                       {"assignment", std::move(assignment)}};
}

void from_json(const nlohmann::json& j, PartitionPlan& plan) {
    plan = PartitionPlan{};
    plan.scheme = scheme_from_string(j.at("scheme").get<std::string>());
    j.at("n_ranks").get_to(plan.n_ranks);
    j.at("threads_per_rank").get_to(plan.threads_per_rank);
    j.at("n_real_neurons").get_to(plan.n_real_neurons);
    j.at("lumping_factor").get_to(plan.lumping_factor);
    j.at("global_exchange_period_cycles").get_to(plan.global_exchange_period_cycles);
    j.at("frozen_fraction").get_to(plan.frozen_fraction);
    j.at("frozen_ids").get_to(plan.frozen_ids);
    for (const auto& p : j.at("assignment"))
        plan.assignment.push_back(
            {p.at(0).get<std::uint32_t>(), p.at(1).get<std::uint32_t>(), p.at(2).get<std::uint32_t>()});
}

} // namespace areasim
