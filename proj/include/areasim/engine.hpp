#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "areasim/common.hpp"
#include "areasim/model.hpp"
#include "areasim/partition.hpp"
#include "areasim/tables.hpp"

namespace areasim {

struct EngineOptions {
    bool record_deliveries = false;
    std::size_t initial_capacity = 64;  // entries per destination rank
    std::uint32_t entry_bytes = 5;      // 4-byte id + 1-byte offset
    std::uint32_t workers = 1;          // threads executing virtual ranks
};

/// Per (rank, cycle) counters. Arrays are indexed by pathway.
struct CycleCounters {
    std::uint64_t n_updates = 0;
    std::uint64_t n_spikes_emitted = 0;
    /// Spikes applied to targets at their arrival step.
    std::array<std::uint64_t, kNumRangeClasses> n_deliveries{};
    /// Connection entries read while resolving incoming spikes.
    std::array<std::uint64_t, kNumRangeClasses> n_synapse_touches{};
    /// First-synapse accesses: non-empty (spike, thread) lookups.
    std::array<std::uint64_t, kNumRangeClasses> n_irregular{};
    /// Entries written into send buffers.
    std::array<std::uint64_t, kNumRangeClasses> n_collocated{};

    bool operator==(const CycleCounters&) const = default;
};

/// One exchange event. Local swaps carry no bytes.
struct ExchangeEvent {
    std::int64_t cycle = 0;
    RangeClass pathway = RangeClass::intra;
    bool global = true;
    std::uint64_t entries_sent = 0;
    std::uint64_t entries_received = 0;
    std::uint64_t bytes = 0;
    std::uint32_t resize_rounds = 0;

    bool operator==(const ExchangeEvent&) const = default;
};

struct DeliveryRecord {
    NeuronId source = 0;
    NeuronId target = 0;
    Step arrival_step = 0;
    Step emission_step = 0;

    auto operator<=>(const DeliveryRecord&) const = default;
};

struct RunTotals {
    std::uint64_t n_global_exchanges = 0;
    std::uint64_t n_local_exchanges = 0;
    std::uint64_t n_resize_rounds = 0;
    std::uint64_t entries_sent = 0;  // over global exchanges
    std::uint64_t entries_received = 0;
    std::uint64_t bytes = 0;
    std::uint64_t n_spikes_emitted = 0;
    std::array<std::uint64_t, kNumRangeClasses> n_deliveries{};
    std::array<std::uint64_t, kNumRangeClasses> n_synapse_touches{};
    std::array<std::uint64_t, kNumRangeClasses> n_irregular{};
    std::size_t final_capacity_short = 0;
    std::size_t final_capacity_long = 0;

    bool operator==(const RunTotals&) const = default;
};

struct RunResult {
    Scheme scheme = Scheme::conventional;
    std::uint32_t n_ranks = 0;
    std::int64_t n_cycles = 0;
    std::int64_t global_exchange_period_cycles = 1;
    std::vector<std::vector<CycleCounters>> counters;  // [rank][cycle]
    std::vector<ExchangeEvent> exchanges;
    std::vector<DeliveryRecord> deliveries;  // sorted; empty unless recorded
    RunTotals totals;
};

/// Executes all simulation cycles over the plan's virtual ranks.
///
/// Each cycle delivers the spikes received at the previous exchange, updates
/// hosted neurons for d_min steps and collocates new spikes. The short
/// pathway is exchanged after every cycle: globally under the conventional
/// scheme, by a local swap under the structure-aware one. The long pathway
/// accumulates for `global_exchange_period_cycles` and is then exchanged
/// globally. Output is identical for any number of workers.
RunResult run(const NetworkSpec& net, const PartitionPlan& plan, const NetworkTables& tables,
              const EngineOptions& options = {});

RunResult run(const NetworkSpec& net, const PartitionPlan& plan, const EngineOptions& options = {});

struct CostParams {
    double c_update = 1.0;
    double c_hit = 1.0;
    double c_miss = 10.0;
    double c_collocate = 2.0;
};

using ProxyMatrix = std::vector<std::vector<double>>;  // [rank][cycle]

/// Counter-weighted stand-in for a measured cycle time.
double cycle_time_proxy(const CycleCounters& c, const CostParams& cost);

ProxyMatrix synthetic_cycle_time(const RunResult& run, const CostParams& cost);

struct PhaseProxy {
    double update = 0.0;
    double deliver = 0.0;
    double collocate = 0.0;
};

/// Rank-averaged cumulative phase proxies.
PhaseProxy phase_proxy(const RunResult& run, const CostParams& cost);

/// Rank-averaged total waiting at the global rendezvous points: for every
/// window of `period_cycles` cycles, the mean over ranks of (slowest lumped
/// window time - own lumped window time).
double synchronization_proxy(const ProxyMatrix& proxy, std::int64_t period_cycles);

} // namespace areasim
