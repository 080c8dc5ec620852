#include "areasim/exchange.hpp"

#include <algorithm>

namespace areasim {

ExchangeBuffers::ExchangeBuffers(std::uint32_t n_ranks, std::size_t initial_capacity,
                                 std::uint32_t entry_bytes)
    : n_ranks_(n_ranks),
      capacity_(initial_capacity),
      entry_bytes_(entry_bytes),
      staged_(n_ranks, std::vector<std::vector<SpikeEntry>>(n_ranks)),
      send_(n_ranks, std::vector<SpikeEntry>(n_ranks * initial_capacity)),
      send_count_(n_ranks, std::vector<std::uint32_t>(n_ranks, 0)),
      recv_(n_ranks, std::vector<std::vector<SpikeEntry>>(n_ranks)) {
    if (n_ranks == 0) throw ValidationError("exchange needs at least one rank");
    if (initial_capacity == 0) throw ValidationError("buffer capacity must be positive");
}

void ExchangeBuffers::post(std::uint32_t from, std::uint32_t to, SpikeEntry entry) {
    staged_[from][to].push_back(entry);
}

// One all-to-all round. Returns false if some region did not fit.
bool ExchangeBuffers::pack_and_transfer(ExchangeOutcome& out) {
    bool complete = true;
    for (std::uint32_t from = 0; from < n_ranks_; ++from) {
        for (std::uint32_t to = 0; to < n_ranks_; ++to) {
            const auto& staged = staged_[from][to];
            const auto n = std::min(staged.size(), capacity_);
            std::copy_n(staged.begin(), n, send_[from].begin() + static_cast<std::ptrdiff_t>(to * capacity_));
            send_count_[from][to] = static_cast<std::uint32_t>(n);
            complete = complete && n == staged.size();
        }
    }
    for (std::uint32_t from = 0; from < n_ranks_; ++from) {
        for (std::uint32_t to = 0; to < n_ranks_; ++to) {
            const auto first = send_[from].begin() + static_cast<std::ptrdiff_t>(to * capacity_);
            recv_[to][from].assign(first, first + send_count_[from][to]);
            out.bytes += static_cast<std::uint64_t>(send_count_[from][to]) * entry_bytes_;
        }
    }
    ++out.rounds;
    return complete;
}

ExchangeOutcome ExchangeBuffers::exchange_global() {
    ExchangeOutcome out;
    std::size_t largest = 0;
    for (const auto& row : staged_)
        for (const auto& region : row) {
            out.entries_sent += region.size();
            largest = std::max(largest, region.size());
        }

    if (!pack_and_transfer(out)) {
        while (capacity_ < largest) capacity_ *= 2;
        for (auto& buf : send_) buf.resize(n_ranks_ * capacity_);
        ++out.resize_rounds;
        if (!pack_and_transfer(out)) throw std::logic_error("secondary exchange round overflowed");
    }

    for (auto& row : staged_)
        for (auto& region : row) region.clear();
    for (const auto& row : recv_)
        for (const auto& region : row) out.entries_received += region.size();
    out.capacity = capacity_;
    return out;
}

ExchangeOutcome ExchangeBuffers::exchange_local() {
    ExchangeOutcome out;
    for (std::uint32_t r = 0; r < n_ranks_; ++r) {
        for (std::uint32_t to = 0; to < n_ranks_; ++to)
            if (to != r && !staged_[r][to].empty())
                throw std::logic_error("local exchange: rank " + std::to_string(r) +
                                       " posted entries for rank " + std::to_string(to));
        out.entries_sent += staged_[r][r].size();
        recv_[r][r].swap(staged_[r][r]);
        staged_[r][r].clear();
        out.entries_received += recv_[r][r].size();
    }
    out.rounds = 1;
    out.capacity = capacity_;
    return out;
}

void ExchangeBuffers::clear_received(std::uint32_t at) {
    for (auto& region : recv_[at]) region.clear();
}

} // namespace areasim
