#include "areasim/engine.hpp"

#include <algorithm>
#include <atomic>
#include <barrier>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "areasim/exchange.hpp"

namespace areasim {

namespace {

struct PendingEvent {
    NeuronId source;
    NeuronId target;
    Step emission;
    RangeClass pathway;
};

struct RegisterEntry {
    NeuronId id;
    std::uint32_t thread;
    std::uint32_t slot;
    Step emission;
};

struct RankState {
    std::vector<std::vector<std::vector<PendingEvent>>> ring;  // [thread][step % length]
    std::array<std::vector<RegisterEntry>, kNumRangeClasses> spike_register;
    std::vector<DeliveryRecord> records;
};

class Simulation {
public:
    Simulation(const NetworkSpec& net, const PartitionPlan& plan, const NetworkTables& tables,
               const EngineOptions& options)
        : net_(net),
          plan_(plan),
          tables_(tables),
          options_(options),
          d_min_(net.grid.d_min_steps),
          period_(plan.global_exchange_period_cycles),
          n_cycles_(net.grid.n_cycles()),
          t_end_(net.grid.t_model_steps),
          buffers_{ExchangeBuffers(plan.n_ranks, options.initial_capacity, options.entry_bytes),
                   ExchangeBuffers(plan.n_ranks, options.initial_capacity, options.entry_bytes)} {
        net.grid.validate();
        if (tables.ranks.size() != plan.n_ranks || tables.scheme != plan.scheme)
            throw ValidationError("tables were built for a different plan");
        if (plan.n_real_neurons != net.n_neurons())
            throw ValidationError("partition plan was built for a different network");
        if (n_cycles_ % period_ != 0)
            throw ValidationError("cycle count is not a multiple of the global exchange period");
        if (period_ * d_min_ > std::numeric_limits<std::uint16_t>::max())
            throw ValidationError("communication window too long for the 16-bit emission offset");

        std::int64_t max_delay = net.grid.d_min_inter_steps;
        for (const auto& s : net.synapses) max_delay = std::max(max_delay, s.delay_steps);
        ring_length_ = max_delay + period_ * d_min_ + 1;

        ranks_.resize(plan.n_ranks);
        for (auto& rs : ranks_)
            rs.ring.assign(plan.threads_per_rank,
                           std::vector<std::vector<PendingEvent>>(static_cast<std::size_t>(ring_length_)));

        result_.scheme = plan.scheme;
        result_.n_ranks = plan.n_ranks;
        result_.n_cycles = n_cycles_;
        result_.global_exchange_period_cycles = period_;
        result_.counters.assign(plan.n_ranks, std::vector<CycleCounters>(static_cast<std::size_t>(n_cycles_)));
    }

    RunResult execute() {
        const auto workers = std::clamp<std::uint32_t>(options_.workers, 1, plan_.n_ranks);
        if (workers == 1)
            run_serial();
        else
            run_parallel(workers);
        return finish();
    }

private:
    bool long_boundary(std::int64_t cycle) const { return (cycle + 1) % period_ == 0; }

    void step_rank(std::uint32_t rank, std::int64_t cycle) {
        deliver(rank, cycle);
        update(rank, cycle);
        collocate(rank, cycle);
    }

    void run_serial() {
        for (std::int64_t c = 0; c < n_cycles_; ++c) {
            for (std::uint32_t r = 0; r < plan_.n_ranks; ++r) step_rank(r, c);
            exchange(c);
        }
    }

    // Worker w runs ranks w, w + W, ...; the barrier completion performs the
    // exchange, so every cross-rank hand-over happens at the rendezvous.
    void run_parallel(std::uint32_t workers) {
        // `failed` may flip at any time; `stop` only changes inside the
        // completion step, so all workers leave at the same rendezvous.
        std::atomic<bool> failed{false};
        bool stop = false;
        std::exception_ptr error;
        std::mutex error_mutex;
        auto record_error = [&](std::exception_ptr e) {
            std::lock_guard lock(error_mutex);
            if (!error) error = e;
            failed = true;
        };
        std::int64_t exchange_cycle = 0;
        auto on_rendezvous = [&]() noexcept {
            if (!failed) {
                try {
                    exchange(exchange_cycle);
                } catch (...) {
                    record_error(std::current_exception());
                }
            }
            stop = failed;
            ++exchange_cycle;
        };
        std::barrier sync(static_cast<std::ptrdiff_t>(workers), on_rendezvous);

        auto body = [&](std::uint32_t w) {
            for (std::int64_t c = 0; c < n_cycles_ && !stop; ++c) {
                if (!failed) {
                    try {
                        for (std::uint32_t r = w; r < plan_.n_ranks; r += workers) step_rank(r, c);
                    } catch (...) {
                        record_error(std::current_exception());
                    }
                }
                sync.arrive_and_wait();
            }
        };
        {
            std::vector<std::jthread> pool;
            for (std::uint32_t w = 0; w < workers; ++w) pool.emplace_back(body, w);
        }
        if (error) std::rethrow_exception(error);
    }

    void deliver(std::uint32_t rank, std::int64_t cycle) {
        auto& counters = result_.counters[rank][static_cast<std::size_t>(cycle)];
        auto& state = ranks_[rank];
        const auto& rank_tables = tables_.ranks[rank];
        const Step cycle_start = cycle * d_min_;
        for (std::size_t p = 0; p < kNumRangeClasses; ++p) {
            auto& buffers = buffers_[p];
            const Step window_start = window_start_[p];
            for (std::uint32_t from = 0; from < plan_.n_ranks; ++from) {
                for (const SpikeEntry& entry : buffers.received(rank, from)) {
                    const Step emission = window_start + entry.offset;
                    for (std::uint32_t t = 0; t < rank_tables.threads.size(); ++t) {
                        const auto run = rank_tables.threads[t].pathway[p].lookup(entry.source);
                        if (run.empty()) continue;
                        ++counters.n_irregular[p];
                        counters.n_synapse_touches[p] += run.size();
                        for (const auto& conn : run) {
                            const Step arrival = emission + conn.delay_steps;
                            if (arrival < cycle_start || arrival - cycle_start >= ring_length_) {
                                std::ostringstream os;
                                os << "causality violation: spike of neuron " << entry.source
                                   << " emitted at step " << emission << " reaches neuron "
                                   << conn.target << " at step " << arrival
                                   << " but is only delivered in cycle " << cycle
                                   << " (starting at step " << cycle_start << ")";
                                throw CausalityError(os.str());
                            }
                            if (arrival >= t_end_) continue;
                            state.ring[t][static_cast<std::size_t>(arrival % ring_length_)].push_back(
                                {entry.source, conn.target, emission, static_cast<RangeClass>(p)});
                        }
                    }
                }
            }
            buffers.clear_received(rank);
        }
    }

    void update(std::uint32_t rank, std::int64_t cycle) {
        auto& counters = result_.counters[rank][static_cast<std::size_t>(cycle)];
        auto& state = ranks_[rank];
        const auto& rank_tables = tables_.ranks[rank];
        const bool structure_aware = plan_.scheme == Scheme::structure_aware;
        for (Step t = cycle * d_min_; t < (cycle + 1) * d_min_; ++t) {
            for (std::uint32_t th = 0; th < rank_tables.threads.size(); ++th) {
                auto& due = state.ring[th][static_cast<std::size_t>(t % ring_length_)];
                for (const auto& ev : due) {
                    ++counters.n_deliveries[index_of(ev.pathway)];
                    if (options_.record_deliveries)
                        state.records.push_back({ev.source, ev.target, t, ev.emission});
                }
                due.clear();

                const auto& thread = rank_tables.threads[th];
                for (std::uint32_t slot = 0; slot < thread.hosted.size(); ++slot) {
                    const NeuronId id = thread.hosted[slot];
                    if (plan_.is_ghost(id)) continue;
                    const auto& neuron = net_.neurons[id];
                    if (neuron.frozen) continue;
                    ++counters.n_updates;
                    if (!neuron.fires_at(t)) continue;
                    ++counters.n_spikes_emitted;
                    for (std::size_t p = 0; p < (structure_aware ? 2u : 1u); ++p)
                        if (!thread.pathway[p].destinations(slot).empty())
                            state.spike_register[p].push_back({id, th, slot, t});
                }
            }
        }
    }

    void collocate(std::uint32_t rank, std::int64_t cycle) {
        auto& counters = result_.counters[rank][static_cast<std::size_t>(cycle)];
        auto& state = ranks_[rank];
        const auto& rank_tables = tables_.ranks[rank];
        for (std::size_t p = 0; p < kNumRangeClasses; ++p) {
            const bool is_long = p == index_of(RangeClass::inter);
            if (is_long && !long_boundary(cycle)) continue;
            const Step window_start = is_long ? (cycle + 1 - period_) * d_min_ : cycle * d_min_;
            for (const auto& entry : state.spike_register[p]) {
                const SpikeEntry wire{entry.id, static_cast<std::uint16_t>(entry.emission - window_start)};
                for (std::uint32_t dest : rank_tables.threads[entry.thread].pathway[p].destinations(entry.slot)) {
                    buffers_[p].post(rank, dest, wire);
                    ++counters.n_collocated[p];
                }
            }
            state.spike_register[p].clear();
        }
    }

    void log_exchange(std::int64_t cycle, RangeClass pathway, bool global, const ExchangeOutcome& o) {
        auto& totals = result_.totals;
        if (global) {
            ++totals.n_global_exchanges;
            totals.n_resize_rounds += o.resize_rounds;
            totals.entries_sent += o.entries_sent;
            totals.entries_received += o.entries_received;
            totals.bytes += o.bytes;
        } else {
            ++totals.n_local_exchanges;
        }
        result_.exchanges.push_back(
            {cycle, pathway, global, o.entries_sent, o.entries_received, o.bytes, o.resize_rounds});
    }

    void exchange(std::int64_t cycle) {
        const auto short_p = index_of(RangeClass::intra);
        const auto long_p = index_of(RangeClass::inter);
        window_start_[short_p] = cycle * d_min_;
        if (plan_.scheme == Scheme::conventional) {
            log_exchange(cycle, RangeClass::intra, true, buffers_[short_p].exchange_global());
            return;
        }
        log_exchange(cycle, RangeClass::intra, false, buffers_[short_p].exchange_local());
        if (long_boundary(cycle)) {
            window_start_[long_p] = (cycle + 1 - period_) * d_min_;
            log_exchange(cycle, RangeClass::inter, true, buffers_[long_p].exchange_global());
        }
    }

    RunResult finish() {
        auto& totals = result_.totals;
        for (const auto& per_rank : result_.counters)
            for (const auto& c : per_rank) {
                totals.n_spikes_emitted += c.n_spikes_emitted;
                for (std::size_t p = 0; p < kNumRangeClasses; ++p) {
                    totals.n_deliveries[p] += c.n_deliveries[p];
                    totals.n_synapse_touches[p] += c.n_synapse_touches[p];
                    totals.n_irregular[p] += c.n_irregular[p];
                }
            }
        totals.final_capacity_short = buffers_[0].capacity();
        totals.final_capacity_long = buffers_[1].capacity();
        if (options_.record_deliveries) {
            std::size_t n = 0;
            for (const auto& rs : ranks_) n += rs.records.size();
            result_.deliveries.reserve(n);
            for (auto& rs : ranks_)
                result_.deliveries.insert(result_.deliveries.end(), rs.records.begin(), rs.records.end());
            std::sort(result_.deliveries.begin(), result_.deliveries.end());
        }
        return std::move(result_);
    }

    const NetworkSpec& net_;
    const PartitionPlan& plan_;
    const NetworkTables& tables_;
    EngineOptions options_;
    Step d_min_;
    std::int64_t period_;
    std::int64_t n_cycles_;
    Step t_end_;
    Step ring_length_ = 1;
    std::array<ExchangeBuffers, kNumRangeClasses> buffers_;
    std::array<Step, kNumRangeClasses> window_start_{};
    std::vector<RankState> ranks_;
    RunResult result_;
};

} // namespace

RunResult run(const NetworkSpec& net, const PartitionPlan& plan, const NetworkTables& tables,
              const EngineOptions& options) {
    return Simulation(net, plan, tables, options).execute();
}

RunResult run(const NetworkSpec& net, const PartitionPlan& plan, const EngineOptions& options) {
    const auto tables = build_tables(net, plan);
    return run(net, plan, tables, options);
}

double cycle_time_proxy(const CycleCounters& c, const CostParams& cost) {
    double t = cost.c_update * static_cast<double>(c.n_updates);
    for (std::size_t p = 0; p < kNumRangeClasses; ++p) {
        const auto irregular = static_cast<double>(c.n_irregular[p]);
        t += cost.c_miss * irregular +
             cost.c_hit * (static_cast<double>(c.n_synapse_touches[p]) - irregular) +
             cost.c_collocate * static_cast<double>(c.n_collocated[p]);
    }
    return t;
}

ProxyMatrix synthetic_cycle_time(const RunResult& run, const CostParams& cost) {
    if (cost.c_update < 0 || cost.c_hit < 0 || cost.c_miss < 0 || cost.c_collocate < 0)
        throw ValidationError("cost parameters must be non-negative");
    ProxyMatrix m(run.counters.size());
    for (std::size_t r = 0; r < run.counters.size(); ++r) {
        m[r].reserve(run.counters[r].size());
        for (const auto& c : run.counters[r]) m[r].push_back(cycle_time_proxy(c, cost));
    }
    return m;
}

PhaseProxy phase_proxy(const RunResult& run, const CostParams& cost) {
    PhaseProxy out;
    if (run.counters.empty()) return out;
    for (const auto& per_rank : run.counters)
        for (const auto& c : per_rank) {
            out.update += cost.c_update * static_cast<double>(c.n_updates);
            for (std::size_t p = 0; p < kNumRangeClasses; ++p) {
                const auto irregular = static_cast<double>(c.n_irregular[p]);
                out.deliver += cost.c_miss * irregular +
                               cost.c_hit * (static_cast<double>(c.n_synapse_touches[p]) - irregular);
                out.collocate += cost.c_collocate * static_cast<double>(c.n_collocated[p]);
            }
        }
    const auto m = static_cast<double>(run.counters.size());
    out.update /= m;
    out.deliver /= m;
    out.collocate /= m;
    return out;
}

double synchronization_proxy(const ProxyMatrix& proxy, std::int64_t period_cycles) {
    if (proxy.empty()) return 0.0;
    if (period_cycles <= 0) throw ValidationError("period must be positive");
    const auto n_cycles = static_cast<std::int64_t>(proxy.front().size());
    const auto m = static_cast<double>(proxy.size());
    double total = 0.0;
    std::vector<double> lumped(proxy.size());
    for (std::int64_t start = 0; start < n_cycles; start += period_cycles) {
        const auto stop = std::min(n_cycles, start + period_cycles);
        for (std::size_t r = 0; r < proxy.size(); ++r) {
            lumped[r] = 0.0;
            for (auto c = start; c < stop; ++c) lumped[r] += proxy[r][static_cast<std::size_t>(c)];
        }
        const double slowest = *std::max_element(lumped.begin(), lumped.end());
        double wait = 0.0;
        for (double own : lumped) wait += slowest - own;
        total += wait / m;
    }
    return total;
}

} // namespace areasim
