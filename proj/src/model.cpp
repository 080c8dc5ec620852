#include "areasim/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace areasim {

namespace {

enum StreamPurpose : std::uint32_t { kNeuronStream = 1, kAreaStream = 2 };

[[noreturn]] void fail(const std::string& what) { throw ValidationError(what); }

double sample_normal(std::mt19937_64& rng, double mean, double sd) {
    if (sd <= 0.0) return mean;
    return std::normal_distribution<double>(mean, sd)(rng);
}

struct SampleStats {
    double mean = 0.0;
    double cv = 0.0;
};

SampleStats stats_of(const std::vector<double>& xs) {
    SampleStats s;
    if (xs.empty()) return s;
    s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    if (xs.size() < 2 || s.mean == 0.0) return s;
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.cv = std::sqrt(ss / static_cast<double>(xs.size() - 1)) / s.mean;
    return s;
}

void check_params(const BenchmarkParams& p) {
    p.grid.validate();
    if (p.n_areas == 0) fail("n_areas must be positive");
    if (p.neurons_per_area == 0) fail("neurons_per_area must be positive");
    if (p.k_intra >= p.neurons_per_area)
        fail("k_intra must be smaller than neurons_per_area (no self-connections)");
    if (p.k_inter > 0 && p.n_areas < 2) fail("k_inter > 0 requires at least two areas");
    if (p.rate_hz < 0.0 || !std::isfinite(p.rate_hz)) fail("rate_hz must be finite and >= 0");
    if (p.intra_delay.sd_ms < 0.0 || p.inter_delay.sd_ms < 0.0)
        fail("delay standard deviations must be >= 0");
}

// Draws neurons and synapses for a fixed list of areas. Each neuron owns an
// RNG stream keyed by its global id, so the result does not depend on the
// iteration order.
NetworkSpec populate(const BenchmarkParams& p, std::vector<AreaSpec> areas) {
    NetworkSpec net;
    net.grid = p.grid;
    net.k_intra = p.k_intra;
    net.k_inter = p.k_inter;
    net.areas = std::move(areas);

    const auto offsets = net.area_offsets();
    const NeuronId n_total = offsets.back();
    net.neurons.resize(n_total);
    net.synapses.reserve(static_cast<std::size_t>(n_total) * (p.k_intra + p.k_inter));

    const auto h = p.grid.h_steps_per_ms;
    for (std::uint32_t a = 0; a < net.areas.size(); ++a) {
        const auto& area = net.areas[a];
        const NeuronId first = offsets[a];
        const NeuronId n_area = area.n_neurons;
        const NeuronId n_other = n_total - n_area;
        if (p.k_intra >= n_area)
            fail("area " + std::to_string(a) + " has fewer than k_intra + 1 neurons");
        if (p.k_inter > 0 && n_other == 0) fail("k_inter > 0 but no neurons outside area");

        const std::int64_t interval = fire_interval_for_rate(area.rate_hz, h);
        for (NeuronId local = 0; local < n_area; ++local) {
            const NeuronId gid = first + local;
            auto rng = entity_stream(p.rng_seed, kNeuronStream, gid);

            auto& neuron = net.neurons[gid];
            neuron.area = a;
            neuron.fire_interval_steps = interval;
            neuron.fire_phase_steps =
                interval == NeuronSpec::kSilent
                    ? 0
                    : std::uniform_int_distribution<std::int64_t>(0, interval - 1)(rng);

            for (std::uint32_t k = 0; k < p.k_intra; ++k) {
                NeuronId r = std::uniform_int_distribution<NeuronId>(0, n_area - 2)(rng);
                if (r >= local) ++r;
                const double d = sample_normal(rng, p.intra_delay.mean_ms, p.intra_delay.sd_ms);
                net.synapses.push_back({gid, first + r, delay_to_steps(d, h, p.grid.d_min_steps),
                                        RangeClass::intra});
            }
            for (std::uint32_t k = 0; k < p.k_inter; ++k) {
                NeuronId r = std::uniform_int_distribution<NeuronId>(0, n_other - 1)(rng);
                if (r >= first) r += n_area;
                const double d = sample_normal(rng, p.inter_delay.mean_ms, p.inter_delay.sd_ms);
                net.synapses.push_back({gid, r, delay_to_steps(d, h, p.grid.d_min_inter_steps),
                                        RangeClass::inter});
            }
        }
    }

    std::vector<double> sizes, rates;
    for (const auto& a : net.areas) {
        sizes.push_back(a.n_neurons);
        rates.push_back(a.rate_hz);
    }
    const auto size_stats = stats_of(sizes);
    const auto rate_stats = stats_of(rates);
    net.metadata["realized_mean_area_size"] = size_stats.mean;
    net.metadata["realized_cv_area_size"] = size_stats.cv;
    net.metadata["realized_mean_rate_hz"] = rate_stats.mean;
    net.metadata["realized_cv_rate"] = rate_stats.cv;
    net.metadata["rng_seed"] = static_cast<double>(p.rng_seed);
    return net;
}

} // namespace

void TimeGrid::validate() const {
    if (h_steps_per_ms <= 0) fail("grid.h_steps_per_ms must be positive");
    if (d_min_steps <= 0) fail("grid.d_min_steps must be positive");
    if (d_min_inter_steps <= 0) fail("grid.d_min_inter_steps must be positive");
    if (t_model_steps <= 0) fail("grid.t_model_steps must be positive");
    if (d_min_inter_steps % d_min_steps != 0)
        fail("grid.d_min_inter_steps must be a multiple of grid.d_min_steps");
    if (t_model_steps % d_min_inter_steps != 0)
        fail("grid.t_model_steps must be a multiple of grid.d_min_inter_steps");
}

std::vector<NeuronId> NetworkSpec::area_offsets() const {
    std::vector<NeuronId> offsets(areas.size() + 1, 0);
    for (std::size_t a = 0; a < areas.size(); ++a)
        offsets[a + 1] = offsets[a] + areas[a].n_neurons;
    return offsets;
}

void NetworkSpec::validate() const {
    grid.validate();
    const auto offsets = area_offsets();
    if (offsets.back() != neurons.size())
        fail("area sizes do not add up to the neuron count");
    for (std::size_t a = 0; a < areas.size(); ++a) {
        if (areas[a].n_neurons == 0) fail("area " + std::to_string(a) + " is empty");
        for (NeuronId g = offsets[a]; g < offsets[a + 1]; ++g)
            if (neurons[g].area != a)
                fail("neuron " + std::to_string(g) + " is not in the contiguous block of its area");
    }
    for (std::size_t g = 0; g < neurons.size(); ++g) {
        const auto& n = neurons[g];
        if (n.fire_interval_steps < 0 ||
            (n.fire_interval_steps > 0 &&
             (n.fire_phase_steps < 0 || n.fire_phase_steps >= n.fire_interval_steps)))
            fail("neuron " + std::to_string(g) + " has an invalid interval/phase");
    }
    for (std::size_t i = 0; i < synapses.size(); ++i) {
        const auto& s = synapses[i];
        auto where = [&] { return "synapse " + std::to_string(i) + ": "; };
        if (s.source >= neurons.size() || s.target >= neurons.size())
            fail(where() + "neuron id out of range");
        if (s.source == s.target) fail(where() + "self-connection");
        const bool same_area = neurons[s.source].area == neurons[s.target].area;
        if (same_area != (s.range == RangeClass::intra))
            fail(where() + "range class disagrees with area membership");
        if (s.delay_steps < grid.d_min_steps) fail(where() + "delay below d_min");
        if (s.range == RangeClass::inter && s.delay_steps < grid.d_min_inter_steps)
            fail(where() + "inter-area delay below d_min_inter");
    }
}

std::int64_t fire_interval_for_rate(double rate_hz, std::int64_t h_steps_per_ms) {
    if (rate_hz < 0.0 || !std::isfinite(rate_hz)) fail("rate must be finite and >= 0");
    if (rate_hz == 0.0) return NeuronSpec::kSilent;
    const double exact = 1000.0 * static_cast<double>(h_steps_per_ms) / rate_hz;
    const auto interval = static_cast<std::int64_t>(std::llround(exact));
    if (interval <= 0) {
        std::ostringstream os;
        os << "rate " << rate_hz << " Hz is not representable at " << h_steps_per_ms
           << " steps/ms (fire interval rounds to 0)";
        fail(os.str());
    }
    return interval;
}

std::int64_t delay_to_steps(double delay_ms, std::int64_t h_steps_per_ms,
                            std::int64_t cutoff_steps) {
    const auto steps =
        static_cast<std::int64_t>(std::llround(delay_ms * static_cast<double>(h_steps_per_ms)));
    return std::max(steps, cutoff_steps);
}

NetworkSpec generate_benchmark(const BenchmarkParams& params) {
    check_params(params);
    fire_interval_for_rate(params.rate_hz, params.grid.h_steps_per_ms);
    std::vector<AreaSpec> areas(params.n_areas);
    for (std::uint32_t a = 0; a < params.n_areas; ++a)
        areas[a] = {a, params.neurons_per_area, params.rate_hz};
    auto net = populate(params, std::move(areas));
    net.metadata["cv_area_size"] = 0.0;
    net.metadata["cv_rate"] = 0.0;
    return net;
}

NetworkSpec generate_heterogeneous(const BenchmarkParams& params,
                                   const HeterogeneityParams& hetero) {
    check_params(params);
    if (!(hetero.cv_area_size >= 0.0) || !(hetero.cv_rate >= 0.0))
        fail("coefficients of variation must be >= 0");

    const double mean_size = params.neurons_per_area;
    const double min_size = std::max<double>(params.k_intra + 1, 1);
    std::vector<AreaSpec> areas(params.n_areas);
    for (std::uint32_t a = 0; a < params.n_areas; ++a) {
        // One standard-normal draw per area and quantity: the same seed gives
        // the same deviations at every cv, only scaled.
        auto rng = entity_stream(params.rng_seed, kAreaStream, a);
        std::normal_distribution<double> unit(0.0, 1.0);
        const double z_size = unit(rng);
        const double z_rate = unit(rng);
        const double size = std::round(mean_size * (1.0 + hetero.cv_area_size * z_size));
        const double rate = params.rate_hz * (1.0 + hetero.cv_rate * z_rate);
        areas[a] = {a, static_cast<std::uint32_t>(std::max(size, min_size)), std::max(rate, 0.0)};
    }
    auto net = populate(params, std::move(areas));
    net.metadata["cv_area_size"] = hetero.cv_area_size;
    net.metadata["cv_rate"] = hetero.cv_rate;
    return net;
}

} // namespace areasim
