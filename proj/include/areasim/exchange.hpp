#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "areasim/common.hpp"

namespace areasim {

/// Wire entry: source id plus emission offset inside the communication
/// window the exchange covers.
struct SpikeEntry {
    NeuronId source = 0;
    std::uint16_t offset = 0;

    bool operator==(const SpikeEntry&) const = default;
};

struct ExchangeOutcome {
    std::uint64_t entries_sent = 0;      // logical entries posted by all ranks
    std::uint64_t entries_received = 0;  // entries landing in receive regions
    std::uint64_t bytes = 0;             // payload over all rounds
    std::uint32_t rounds = 0;
    std::uint32_t resize_rounds = 0;
    std::size_t capacity = 0;  // per-destination capacity after the exchange
};

/// Send and receive buffers of one communication pathway for all virtual
/// ranks.
///
/// Collocation posts entries per (sender, destination). A global exchange
/// packs them into fixed-capacity regions, one per destination, and copies
/// region (i -> j) into j's receive region for i. If any region overflows,
/// every rank grows its capacity by doubling until the largest region fits
/// and a secondary round resends everything. Capacity is one value shared by
/// all ranks and never shrinks.
class ExchangeBuffers {
public:
    ExchangeBuffers(std::uint32_t n_ranks, std::size_t initial_capacity, std::uint32_t entry_bytes);

    void post(std::uint32_t from, std::uint32_t to, SpikeEntry entry);
    std::size_t posted(std::uint32_t from, std::uint32_t to) const { return staged_[from][to].size(); }

    ExchangeOutcome exchange_global();

    /// Process-local swap of every rank's send and receive buffer. Entries
    /// posted to another rank are a logic error on this path.
    ExchangeOutcome exchange_local();

    std::span<const SpikeEntry> received(std::uint32_t at, std::uint32_t from) const {
        return recv_[at][from];
    }
    void clear_received(std::uint32_t at);

    std::size_t capacity() const { return capacity_; }
    std::uint32_t n_ranks() const { return n_ranks_; }
    std::uint32_t entry_bytes() const { return entry_bytes_; }

private:
    bool pack_and_transfer(ExchangeOutcome& out);

    std::uint32_t n_ranks_;
    std::size_t capacity_;
    std::uint32_t entry_bytes_;
    std::vector<std::vector<std::vector<SpikeEntry>>> staged_;  // [from][to]
    std::vector<std::vector<SpikeEntry>> send_;                 // [from], n_ranks * capacity
    std::vector<std::vector<std::uint32_t>> send_count_;        // [from][to]
    std::vector<std::vector<std::vector<SpikeEntry>>> recv_;    // [at][from]
};

} // namespace areasim
