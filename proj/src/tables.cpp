#include "areasim/tables.hpp"

#include <algorithm>
#include <numeric>
#include <utility>

namespace areasim {

std::span<const ConnectionEntry> PathwayTables::lookup(NeuronId source) const {
    const auto [lo, hi] = std::equal_range(sources.begin(), sources.end(), source);
    const auto first = static_cast<std::size_t>(lo - sources.begin());
    return {connections.data() + first, static_cast<std::size_t>(hi - lo)};
}

std::span<const std::uint32_t> PathwayTables::destinations(std::uint32_t slot) const {
    if (slot + 1 >= target_offsets.size()) return {};
    return {target_ranks.data() + target_offsets[slot],
            target_offsets[slot + 1] - target_offsets[slot]};
}

namespace {

bool is_frozen(const NetworkSpec& net, const PartitionPlan& plan, NeuronId id) {
    return plan.is_ghost(id) || net.neurons[id].frozen;
}

// Sorts connections and sources jointly by source id, keeping insertion
// order within a source.
void finalize(PathwayTables& t) {
    std::vector<std::size_t> order(t.sources.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return t.sources[a] < t.sources[b]; });
    std::vector<ConnectionEntry> conns;
    std::vector<NeuronId> srcs;
    conns.reserve(order.size());
    srcs.reserve(order.size());
    for (auto i : order) {
        conns.push_back(t.connections[i]);
        srcs.push_back(t.sources[i]);
    }
    t.connections = std::move(conns);
    t.sources = std::move(srcs);
}

} // namespace

NetworkTables build_tables(const NetworkSpec& net, const PartitionPlan& plan,
                           std::uint32_t announcement_bytes) {
    if (plan.n_real_neurons != net.n_neurons())
        throw ValidationError("partition plan was built for a different network");

    NetworkTables out;
    out.scheme = plan.scheme;
    out.ranks.resize(plan.n_ranks);
    const auto hosted = plan.hosted();
    for (std::uint32_t r = 0; r < plan.n_ranks; ++r) {
        out.ranks[r].rank = r;
        out.ranks[r].threads.resize(plan.threads_per_rank);
        for (std::uint32_t t = 0; t < plan.threads_per_rank; ++t)
            out.ranks[r].threads[t].hosted = hosted[r][t];
    }

    // Postsynaptic side: every synapse lives with its target.
    for (std::size_t i = 0; i < net.synapses.size(); ++i) {
        const auto& s = net.synapses[i];
        if (is_frozen(net, plan, s.source) || is_frozen(net, plan, s.target))
            throw ValidationError("synapse " + std::to_string(i) + " touches a frozen neuron");
        const auto& where = plan.assignment[s.target];
        auto& tables =
            out.ranks[where.rank].threads[where.thread].pathway[index_of(pathway_for(plan.scheme, s.range))];
        tables.connections.push_back({s.target, s.delay_steps});
        tables.sources.push_back(s.source);
    }
    for (auto& rank : out.ranks)
        for (auto& thread : rank.threads)
            for (auto& p : thread.pathway) finalize(p);

    // Connectivity exchange: each rank announces (source -> this rank) once
    // per pathway to the rank hosting the source.
    const std::size_t n_pathways = plan.scheme == Scheme::structure_aware ? 2 : 1;
    for (std::size_t c = 0; c < n_pathways; ++c) {
        // send[from][to] holds the announced source ids.
        std::vector<std::vector<std::vector<NeuronId>>> send(
            plan.n_ranks, std::vector<std::vector<NeuronId>>(plan.n_ranks));
        for (std::uint32_t r = 0; r < plan.n_ranks; ++r) {
            std::vector<NeuronId> sources;
            for (const auto& thread : out.ranks[r].threads)
                sources.insert(sources.end(), thread.pathway[c].sources.begin(),
                               thread.pathway[c].sources.end());
            std::sort(sources.begin(), sources.end());
            sources.erase(std::unique(sources.begin(), sources.end()), sources.end());
            for (NeuronId src : sources) send[r][plan.assignment[src].rank].push_back(src);
        }
        ++out.construction.n_alltoall_steps;

        // Receive side: (thread, slot, announcing rank) triples per owner rank.
        for (std::uint32_t owner = 0; owner < plan.n_ranks; ++owner) {
            std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> per_thread(
                plan.threads_per_rank);
            for (std::uint32_t from = 0; from < plan.n_ranks; ++from) {
                for (NeuronId src : send[from][owner]) {
                    const auto& p = plan.assignment[src];
                    per_thread[p.thread].emplace_back(p.slot, from);
                    ++out.construction.n_announcements;
                    out.construction.bytes += announcement_bytes;
                }
            }
            for (std::uint32_t t = 0; t < plan.threads_per_rank; ++t) {
                auto& pairs = per_thread[t];
                std::sort(pairs.begin(), pairs.end());
                auto& tables = out.ranks[owner].threads[t].pathway[c];
                const auto n_hosted = out.ranks[owner].threads[t].hosted.size();
                tables.target_offsets.assign(n_hosted + 1, 0);
                tables.target_ranks.reserve(pairs.size());
                for (const auto& [slot, rank] : pairs) {
                    ++tables.target_offsets[slot + 1];
                    tables.target_ranks.push_back(rank);
                }
                std::partial_sum(tables.target_offsets.begin(), tables.target_offsets.end(),
                                 tables.target_offsets.begin());
            }
        }
    }
    // The unused long pathway of the conventional scheme still gets empty
    // target tables so slot lookups stay uniform.
    for (std::size_t c = n_pathways; c < kNumRangeClasses; ++c)
        for (auto& rank : out.ranks)
            for (auto& thread : rank.threads)
                thread.pathway[c].target_offsets.assign(thread.hosted.size() + 1, 0);
    return out;
}

RankLookup lookup_targets(const RankTables& rank, NeuronId source, RangeClass pathway) {
    RankLookup result;
    result.per_thread.reserve(rank.threads.size());
    for (const auto& thread : rank.threads) {
        auto run = thread.pathway[index_of(pathway)].lookup(source);
        if (!run.empty()) {
            ++result.irregular_accesses;
            result.deliveries += run.size();
        }
        result.per_thread.push_back(run);
    }
    return result;
}

} // namespace areasim
