#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "areasim/common.hpp"
#include "areasim/model.hpp"
#include "areasim/partition.hpp"

namespace areasim {

/// Postsynaptic connection stored on the rank/thread hosting the target.
struct ConnectionEntry {
    NeuronId target = 0;
    std::int64_t delay_steps = 0;

    bool operator==(const ConnectionEntry&) const = default;
};

/// Tables of one (thread, pathway) pair.
///
/// `connections` and `sources` are parallel arrays sorted by source id, so
/// all local targets of a source form one contiguous run. The target table
/// is the presynaptic side: for every neuron hosted on this thread (by slot)
/// the ranks holding at least one of its targets on this pathway, each rank
/// listed once.
struct PathwayTables {
    std::vector<ConnectionEntry> connections;
    std::vector<NeuronId> sources;
    std::vector<std::uint32_t> target_offsets;  // size n_hosted + 1
    std::vector<std::uint32_t> target_ranks;

    /// Contiguous run of connections whose source is `source` (binary search).
    std::span<const ConnectionEntry> lookup(NeuronId source) const;
    std::span<const std::uint32_t> destinations(std::uint32_t slot) const;
};

struct ThreadTables {
    std::vector<NeuronId> hosted;  // slot -> id (may include ghost ids)
    std::array<PathwayTables, kNumRangeClasses> pathway;
};

struct RankTables {
    std::uint32_t rank = 0;
    std::vector<ThreadTables> threads;
};

/// Cost of the simulated connectivity exchange that fills the target tables.
struct ConstructionStats {
    std::uint64_t n_alltoall_steps = 0;
    std::uint64_t n_announcements = 0;
    std::uint64_t bytes = 0;
};

struct NetworkTables {
    Scheme scheme = Scheme::conventional;
    std::vector<RankTables> ranks;
    ConstructionStats construction;
};

/// Pathway a synapse travels on: its own range class under the
/// structure-aware scheme, always the short (intra) pathway otherwise.
constexpr RangeClass pathway_for(Scheme scheme, RangeClass synapse_range) {
    return scheme == Scheme::structure_aware ? synapse_range : RangeClass::intra;
}

/// Places every synapse on the thread hosting its target, sorts the tables
/// and derives the target tables through a simulated all-to-all of
/// (source -> hosting rank) announcements. Throws ValidationError if a
/// synapse touches a frozen neuron.
NetworkTables build_tables(const NetworkSpec& net, const PartitionPlan& plan,
                           std::uint32_t announcement_bytes = 8);

/// Result of resolving one incoming spike on one rank and pathway.
struct RankLookup {
    std::vector<std::span<const ConnectionEntry>> per_thread;
    std::uint64_t irregular_accesses = 0;  // threads with a non-empty run
    std::uint64_t deliveries = 0;          // total entries touched
};

RankLookup lookup_targets(const RankTables& rank, NeuronId source, RangeClass pathway);

} // namespace areasim
