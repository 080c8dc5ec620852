#include <algorithm>
#include <cmath>
#include <functional>
#include <thread>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "areasim/analysis.hpp"

namespace areasim::analysis {

namespace {

enum StreamPurpose : std::uint32_t { kWalltimeStream = 11, kMaxStream = 12, kTailStream = 13 };

constexpr std::uint64_t kChunk = 10000;

// Runs fn(i) for i in [0, n) on up to `workers` threads. Each index owns its
// output slot, so the reduction order is fixed by the caller.
void for_each_index(std::uint64_t n, std::uint32_t workers,
                    const std::function<void(std::uint64_t)>& fn) {
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<std::uint32_t>(std::min<std::uint64_t>(workers, std::max<std::uint64_t>(n, 1)));
    if (workers <= 1) {
        for (std::uint64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::jthread> pool;
    for (std::uint32_t w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            for (std::uint64_t i = w; i < n; i += workers) fn(i);
        });
}

// Running sum and sum of squares; merged in index order.
struct Moments {
    double n = 0.0;
    double sum = 0.0;
    double sum_sq = 0.0;

    void add(double x) {
        n += 1.0;
        sum += x;
        sum_sq += x * x;
    }
    void merge(const Moments& o) {
        n += o.n;
        sum += o.sum;
        sum_sq += o.sum_sq;
    }
    double mean() const { return n > 0 ? sum / n : 0.0; }
    double variance() const {
        if (n < 2) return 0.0;
        return std::max(0.0, (sum_sq - sum * sum / n) / (n - 1.0));
    }
    double cv() const { return mean() != 0.0 ? std::sqrt(variance()) / mean() : 0.0; }
    Estimate estimate() const { return {mean(), n > 1 ? std::sqrt(variance() / n) : 0.0}; }
};

Estimate estimate_of(const std::vector<double>& xs) {
    Moments m;
    for (double x : xs) m.add(x);
    return m.estimate();
}

struct ReplicateOutcome {
    double wall_conv = 0.0;
    double wall_struc = 0.0;
    double sync_conv = 0.0;
    double sync_struc = 0.0;
    double cv_conv = 0.0;
    double cv_struc = 0.0;
};

ReplicateOutcome simulate_replicate(const CycleTimeModel& m, std::mt19937_64& rng) {
    std::normal_distribution<double> unit(0.0, 1.0);
    const std::size_t M = m.n_ranks;
    const double innovation = std::sqrt(1.0 - m.rho * m.rho) * m.sigma;

    std::vector<double> t(M), lumped(M, 0.0);
    for (std::size_t r = 0; r < M; ++r) t[r] = m.mu + m.sigma * unit(rng);

    ReplicateOutcome out;
    Moments cycle_moments, lumped_moments;
    for (std::int64_t s = 0; s < m.n_cycles; ++s) {
        if (s > 0)
            for (std::size_t r = 0; r < M; ++r)
                t[r] = m.mu + m.rho * (t[r] - m.mu) + innovation * unit(rng);

        double mx = t[0], sum = 0.0;
        for (std::size_t r = 0; r < M; ++r) {
            mx = std::max(mx, t[r]);
            sum += t[r];
            lumped[r] += t[r];
            cycle_moments.add(t[r]);
        }
        out.wall_conv += mx;
        out.sync_conv += mx - sum / static_cast<double>(M);

        if ((s + 1) % m.lumping_factor == 0) {
            double lmx = lumped[0], lsum = 0.0;
            for (std::size_t r = 0; r < M; ++r) {
                lmx = std::max(lmx, lumped[r]);
                lsum += lumped[r];
                lumped_moments.add(lumped[r]);
                lumped[r] = 0.0;
            }
            out.wall_struc += lmx;
            out.sync_struc += lmx - lsum / static_cast<double>(M);
        }
    }
    out.cv_conv = cycle_moments.cv();
    out.cv_struc = lumped_moments.cv();
    return out;
}

} // namespace

void CycleTimeModel::validate() const {
    if (!(mu > 0.0)) throw ValidationError("mu must be positive");
    if (!(sigma >= 0.0)) throw ValidationError("sigma must be non-negative");
    if (n_ranks == 0) throw ValidationError("n_ranks must be positive");
    if (n_cycles <= 0 || lumping_factor <= 0) throw ValidationError("S and D must be positive");
    if (n_cycles % lumping_factor != 0) throw ValidationError("S must be a multiple of D");
    if (!(rho >= 0.0 && rho < 1.0)) throw ValidationError("rho must lie in [0, 1)");
}

double normal_quantile(double p) {
    if (p == 0.5) return 0.0;
    return boost::math::quantile(boost::math::normal_distribution<double>(0.0, 1.0), p);
}

double xi_max(std::uint32_t n_ranks) {
    if (n_ranks == 0) throw ValidationError("xi_max needs at least one rank");
    constexpr double alpha = 0.375;
    const double m = n_ranks;
    return normal_quantile((m - alpha) / (m - 2.0 * alpha + 1.0));
}

ExpectedWalltimes expected_walltimes(const CycleTimeModel& model) {
    model.validate();
    if (model.rho != 0.0)
        throw ValidationError(
            "closed-form walltimes assume independent cycle times (rho = 0); "
            "use montecarlo_walltimes for correlated cycle times");
    const double S = static_cast<double>(model.n_cycles);
    const double root_d = std::sqrt(static_cast<double>(model.lumping_factor));
    const double xi = xi_max(model.n_ranks);

    ExpectedWalltimes e;
    e.sync_conventional = S * xi * model.sigma;
    e.sync_structure_aware = S * xi * model.sigma / root_d;
    e.wall_conventional = S * model.mu + e.sync_conventional;
    e.wall_structure_aware = S * model.mu + e.sync_structure_aware;
    e.sync_ratio = 1.0 / root_d;
    return e;
}

MonteCarloWalltimes montecarlo_walltimes(const CycleTimeModel& model, std::uint32_t replicates,
                                         std::uint64_t seed, std::uint32_t workers) {
    model.validate();
    if (replicates == 0) throw ValidationError("replicates must be >= 1");

    std::vector<ReplicateOutcome> outcomes(replicates);
    for_each_index(replicates, workers, [&](std::uint64_t i) {
        auto rng = entity_stream(seed, kWalltimeStream, i);
        outcomes[i] = simulate_replicate(model, rng);
    });

    auto collect = [&](auto field) {
        std::vector<double> xs;
        for (const auto& o : outcomes) xs.push_back(field(o));
        return estimate_of(xs);
    };
    MonteCarloWalltimes out;
    out.replicates = replicates;
    out.wall_conventional = collect([](const auto& o) { return o.wall_conv; });
    out.wall_structure_aware = collect([](const auto& o) { return o.wall_struc; });
    out.sync_conventional = collect([](const auto& o) { return o.sync_conv; });
    out.sync_structure_aware = collect([](const auto& o) { return o.sync_struc; });
    out.cv_conventional = collect([](const auto& o) { return o.cv_conv; });
    out.cv_structure_aware = collect([](const auto& o) { return o.cv_struc; });
    out.sync_ratio = collect([](const auto& o) { return o.sync_conv > 0 ? o.sync_struc / o.sync_conv : 0.0; });
    out.cv_ratio = collect([](const auto& o) { return o.cv_conv > 0 ? o.cv_struc / o.cv_conv : 0.0; });
    return out;
}

Estimate expected_max_montecarlo(std::uint32_t n_ranks, std::uint64_t replicates,
                                 std::uint64_t seed, std::uint32_t workers) {
    if (n_ranks == 0 || replicates == 0) throw ValidationError("n_ranks and replicates must be >= 1");
    const std::uint64_t n_chunks = (replicates + kChunk - 1) / kChunk;
    std::vector<Moments> parts(n_chunks);
    for_each_index(n_chunks, workers, [&](std::uint64_t c) {
        auto rng = entity_stream(seed, kMaxStream, c);
        std::normal_distribution<double> unit(0.0, 1.0);
        const auto count = std::min(kChunk, replicates - c * kChunk);
        for (std::uint64_t i = 0; i < count; ++i) {
            double mx = unit(rng);
            for (std::uint32_t r = 1; r < n_ranks; ++r) mx = std::max(mx, unit(rng));
            parts[c].add(mx);
        }
    });
    Moments total;
    for (const auto& p : parts) total.merge(p);
    return total.estimate();
}

double max_quantile_probability(double tail_mass, std::uint32_t n_ranks) {
    if (!(tail_mass >= 0.0 && tail_mass <= 1.0)) throw ValidationError("tail mass must lie in [0, 1]");
    if (tail_mass == 1.0) return 1.0;
    return -std::expm1(static_cast<double>(n_ranks) * std::log1p(-tail_mass));
}

Estimate max_in_tail_montecarlo(double tail_mass, std::uint32_t n_ranks, std::uint64_t n_cycles,
                                std::uint64_t seed, std::uint32_t workers) {
    if (!(tail_mass > 0.0 && tail_mass < 1.0)) throw ValidationError("tail mass must lie in (0, 1)");
    if (n_ranks == 0 || n_cycles == 0) throw ValidationError("n_ranks and n_cycles must be >= 1");
    const double threshold = normal_quantile(1.0 - tail_mass);
    const std::uint64_t n_chunks = (n_cycles + kChunk - 1) / kChunk;
    std::vector<Moments> parts(n_chunks);
    for_each_index(n_chunks, workers, [&](std::uint64_t c) {
        auto rng = entity_stream(seed, kTailStream, c);
        std::normal_distribution<double> unit(0.0, 1.0);
        const auto count = std::min(kChunk, n_cycles - c * kChunk);
        for (std::uint64_t i = 0; i < count; ++i) {
            double mx = unit(rng);
            for (std::uint32_t r = 1; r < n_ranks; ++r) mx = std::max(mx, unit(rng));
            parts[c].add(mx >= threshold ? 1.0 : 0.0);
        }
    });
    Moments total;
    for (const auto& p : parts) total.merge(p);
    return total.estimate();
}

} // namespace areasim::analysis
