#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

#include "areasim/experiment.hpp"

namespace areasim::cli {

using nlohmann::json;
namespace fs = std::filesystem;

// Formatting ------------------------------------------------------------------

std::string format_number(double v) {
    if (v == 0.0) return "0";  // folds -0
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

// CSV writers -------------------------------------------------------------------

void write_metrics_csv(std::ostream& out, const RunResult& result, const ProxyMatrix& proxy,
                       const std::string& run_id, bool header) {
    if (header)
        out << "run_id,scheme,rank,cycle,n_updates,n_deliveries_intra,n_deliveries_inter,"
               "n_irregular_intra,n_irregular_inter,n_collocated,proxy_time\n";
    const auto scheme = to_string(result.scheme);
    for (std::size_t r = 0; r < result.counters.size(); ++r)
        for (std::size_t c = 0; c < result.counters[r].size(); ++c) {
            const auto& k = result.counters[r][c];
            out << run_id << ',' << scheme << ',' << r << ',' << c << ',' << k.n_updates << ','
                << k.n_deliveries[0] << ',' << k.n_deliveries[1] << ',' << k.n_irregular[0] << ','
                << k.n_irregular[1] << ',' << (k.n_collocated[0] + k.n_collocated[1]) << ','
                << format_number(proxy[r][c]) << '\n';
        }
}

void write_exchanges_csv(std::ostream& out, const RunResult& result, const std::string& run_id, bool header) {
    if (header) out << "run_id,scheme,cycle,class,bytes,resize_rounds\n";
    const auto scheme = to_string(result.scheme);
    for (const auto& e : result.exchanges) {
        if (!e.global) continue;
        out << run_id << ',' << scheme << ',' << e.cycle << ',' << to_string(e.pathway) << ',' << e.bytes << ','
            << e.resize_rounds << '\n';
    }
}

void write_heatmap_csv(std::ostream& out, const ProxyMatrix& proxy, std::int64_t period_cycles) {
    const std::size_t n_cycles = proxy.empty() ? 0 : proxy.front().size();
    out << "rank";
    for (std::size_t c = 0; c < n_cycles; ++c) out << ',' << c;
    out << "\nglobal_exchange";
    for (std::size_t c = 0; c < n_cycles; ++c)
        out << ',' << ((static_cast<std::int64_t>(c) + 1) % period_cycles == 0 ? 1 : 0);
    out << '\n';
    for (std::size_t r = 0; r < proxy.size(); ++r) {
        out << r;
        for (double v : proxy[r]) out << ',' << format_number(v);
        out << '\n';
    }
}

void write_heatmap_long_csv(std::ostream& out, const ProxyMatrix& proxy) {
    out << "rank,cycle,value\n";
    for (std::size_t r = 0; r < proxy.size(); ++r)
        for (std::size_t c = 0; c < proxy[r].size(); ++c) out << r << ',' << c << ',' << format_number(proxy[r][c]) << '\n';
}

// Sweep points ------------------------------------------------------------------

std::vector<PointSpec> sweep_points(const ExperimentConfig& cfg) {
    std::vector<PointSpec> points;
    auto base = [&](std::string label, double value) {
        PointSpec p{std::move(label), value, cfg.network, cfg.heterogeneity};
        return p;
    };
    for (double v : cfg.grid) {
        const auto text = format_number(v);
        switch (cfg.experiment) {
        case ExperimentKind::weak_scaling:
        case ExperimentKind::access_check: {
            auto p = base("M_" + text, v);
            p.network.n_areas = static_cast<std::uint32_t>(v);
            points.push_back(p);
            break;
        }
        case ExperimentKind::cv_area_sweep: {
            auto p = base("cv_area_" + text, v);
            p.heterogeneity.cv_area_size = v;
            points.push_back(p);
            break;
        }
        case ExperimentKind::cv_rate_sweep: {
            auto p = base("cv_rate_" + text, v);
            p.heterogeneity.cv_rate = v;
            points.push_back(p);
            break;
        }
        case ExperimentKind::d_sweep:
        case ExperimentKind::theory_check: {
            auto p = base("D_" + text, v);
            p.network.grid.d_min_inter_steps = static_cast<std::int64_t>(v) * p.network.grid.d_min_steps;
            points.push_back(p);
            break;
        }
        case ExperimentKind::single_run: break;
        }
    }
    if (cfg.experiment == ExperimentKind::single_run) points.push_back(base("single", 0.0));
    if (cfg.experiment == ExperimentKind::theory_check)
        points.push_back(base("order_statistics", static_cast<double>(cfg.theory.model.n_ranks)));
    return points;
}

// Simulation points -------------------------------------------------------------

namespace {

double ratio(std::uint64_t num, std::uint64_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

NetworkSpec instantiate(const PointSpec& point, std::uint64_t seed) {
    auto params = point.network;
    params.rng_seed = seed;
    return generate_heterogeneous(params, point.heterogeneity);
}

std::string run_id_for(const PointSpec& point, Scheme scheme, std::uint64_t seed) {
    return point.label + ":" + std::string(to_string(scheme)) + ":" + std::to_string(seed);
}

json run_to_json(const RunSummary& s) {
    return {
        {"run_id", s.run_id},
        {"scheme", to_string(s.scheme)},
        {"seed", s.seed},
        {"n_ranks", s.n_ranks},
        {"n_cycles", s.n_cycles},
        {"global_exchange_period_cycles", s.period},
        {"update", s.update},
        {"deliver", s.deliver},
        {"collocate", s.collocate},
        {"sync_proxy", s.sync_proxy},
        {"exchange_estimate", s.exchange_estimate},
        {"proxy_rtf", s.proxy_rtf},
        {"n_global_exchanges", s.n_global_exchanges},
        {"n_local_exchanges", s.n_local_exchanges},
        {"bytes", s.bytes},
        {"resize_rounds", s.resize_rounds},
        {"n_spikes", s.n_spikes},
        {"f_irr_intra", s.f_irr_intra},
        {"f_irr_inter", s.f_irr_inter},
        {"f_irr_combined", s.f_irr_combined},
        {"frozen_fraction", s.frozen_fraction},
    };
}

constexpr const char* kAggregated[] = {
    "update",     "deliver",     "collocate",      "sync_proxy",       "exchange_estimate",
    "proxy_rtf",  "n_global_exchanges", "n_local_exchanges", "bytes",  "resize_rounds",
    "n_spikes",   "f_irr_intra", "f_irr_inter",    "f_irr_combined",   "frozen_fraction",
};

json mean_sd(const std::vector<double>& xs) {
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    const double sd = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
    return {{"mean", mean}, {"sd", sd}};
}

json point_header(const PointSpec& p) {
    return {{"label", p.label},
            {"value", p.value},
            {"n_areas", p.network.n_areas},
            {"d_min_inter_steps", p.network.grid.d_min_inter_steps},
            {"cv_area_size", p.heterogeneity.cv_area_size},
            {"cv_rate", p.heterogeneity.cv_rate}};
}

double relative_error(double analytic, double oracle) {
    if (analytic == 0.0) return oracle == 0.0 ? 0.0 : std::abs(oracle);
    return std::abs(oracle - analytic) / std::abs(analytic);
}

json comparison(const std::string& quantity, double analytic, double oracle, double oracle_error) {
    return {{"quantity", quantity},
            {"analytic", analytic},
            {"oracle", oracle},
            {"oracle_std_error", oracle_error},
            {"relative_error", relative_error(analytic, oracle)}};
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

void write_json(const fs::path& path, const json& doc) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << doc.dump(2) << '\n';
}

std::ofstream open_csv(const fs::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

} // namespace

RunSummary summarize_run(const RunResult& result, const PartitionPlan& plan, const NetworkSpec& net,
                         const ExperimentConfig& cfg, std::string run_id, std::uint64_t seed) {
    RunSummary s;
    s.run_id = std::move(run_id);
    s.scheme = result.scheme;
    s.seed = seed;
    s.n_ranks = result.n_ranks;
    s.n_cycles = result.n_cycles;
    s.period = result.global_exchange_period_cycles;

    const auto phases = phase_proxy(result, cfg.cost);
    s.update = phases.update;
    s.deliver = phases.deliver;
    s.collocate = phases.collocate;
    s.sync_proxy = synchronization_proxy(synthetic_cycle_time(result, cfg.cost), s.period);
    for (const auto& e : result.exchanges)
        if (e.global)
            s.exchange_estimate += cfg.exchange_cost.alpha_per_call * (1.0 + e.resize_rounds) +
                                   cfg.exchange_cost.beta_per_byte * static_cast<double>(e.bytes);
    s.proxy_rtf = (s.update + s.deliver + s.collocate + s.sync_proxy) / net.grid.t_model_ms();

    const auto& t = result.totals;
    s.n_global_exchanges = t.n_global_exchanges;
    s.n_local_exchanges = t.n_local_exchanges;
    s.bytes = t.bytes;
    s.resize_rounds = t.n_resize_rounds;
    s.n_spikes = t.n_spikes_emitted;
    s.f_irr_intra = ratio(t.n_irregular[0], t.n_synapse_touches[0]);
    s.f_irr_inter = ratio(t.n_irregular[1], t.n_synapse_touches[1]);
    s.f_irr_combined = ratio(t.n_irregular[0] + t.n_irregular[1], t.n_synapse_touches[0] + t.n_synapse_touches[1]);
    s.frozen_fraction = plan.frozen_fraction;
    return s;
}

PointResult run_point(const ExperimentConfig& cfg, const PointSpec& point,
                      const std::optional<fs::path>& artifact_dir) {
    PointResult out{point, {}};
    std::ofstream metrics, exchanges;
    if (artifact_dir) {
        fs::create_directories(*artifact_dir);
        if (cfg.write_metrics) metrics = open_csv(*artifact_dir / "metrics.csv");
        exchanges = open_csv(*artifact_dir / "exchanges.csv");
    }

    std::vector<std::vector<RunSummary>> by_scheme(cfg.schemes.size());
    bool first = true;
    for (auto seed : cfg.seeds) {
        const auto net = instantiate(point, seed);
        for (std::size_t i = 0; i < cfg.schemes.size(); ++i) {
            const auto scheme = cfg.schemes[i];
            const auto plan = make_plan(net, scheme, point.network.n_areas, cfg.threads_per_rank);
            const auto result = run(net, plan, cfg.engine);
            const auto id = run_id_for(point, scheme, seed);
            by_scheme[i].push_back(summarize_run(result, plan, net, cfg, id, seed));
            if (!artifact_dir) continue;

            const auto proxy = synthetic_cycle_time(result, cfg.cost);
            if (cfg.write_metrics) write_metrics_csv(metrics, result, proxy, id, first);
            write_exchanges_csv(exchanges, result, id, first);
            first = false;
            if (cfg.write_heatmaps) {
                const auto stem = std::string(to_string(scheme)) + "_s" + std::to_string(seed);
                auto dense = open_csv(*artifact_dir / ("heatmap_" + stem + ".csv"));
                write_heatmap_csv(dense, proxy, result.global_exchange_period_cycles);
                auto long_form = open_csv(*artifact_dir / ("heatmap_" + stem + "_long.csv"));
                write_heatmap_long_csv(long_form, proxy);
            }
        }
    }
    for (auto& runs : by_scheme)
        for (auto& r : runs) out.runs.push_back(std::move(r));
    return out;
}

json aggregate(const PointResult& point) {
    json doc = point_header(point.point);
    json schemes = json::object();
    json runs = json::array();
    for (const auto& r : point.runs) runs.push_back(run_to_json(r));
    std::vector<std::string> order;
    for (const auto& r : point.runs) {
        const std::string name(to_string(r.scheme));
        if (std::find(order.begin(), order.end(), name) == order.end()) order.push_back(name);
    }
    for (const auto& name : order) {
        json stats = json::object();
        for (const char* key : kAggregated) {
            std::vector<double> xs;
            for (const auto& run : runs)
                if (run["scheme"] == name) xs.push_back(run[key].get<double>());
            stats[key] = mean_sd(xs);
        }
        schemes[name] = stats;
    }
    doc["schemes"] = schemes;
    doc["runs"] = runs;
    return doc;
}

// Analysis points -----------------------------------------------------------------

json theory_point(const ExperimentConfig& cfg, const PointSpec& point) {
    const auto seed = cfg.seeds.front();
    const auto workers = cfg.engine.workers;
    json doc = {{"label", point.label}, {"value", point.value}, {"seed", seed}};
    json records = json::array();
    if (point.label == "order_statistics") {
        const auto m = cfg.theory.model.n_ranks;
        const auto mx = analysis::expected_max_montecarlo(m, cfg.theory.max_replicates, seed, workers);
        records.push_back(comparison("expected_max", analysis::xi_max(m), mx.mean, mx.std_error));
        const auto tail = analysis::max_in_tail_montecarlo(cfg.theory.tail_mass, m, cfg.theory.tail_cycles, seed,
                                                           workers);
        records.push_back(comparison("max_in_upper_tail",
                                     analysis::max_quantile_probability(cfg.theory.tail_mass, m), tail.mean,
                                     tail.std_error));
        doc["n_ranks"] = m;
        doc["tail_mass"] = cfg.theory.tail_mass;
    } else {
        auto model = cfg.theory.model;
        model.lumping_factor = static_cast<std::int64_t>(point.value);
        auto independent = model;
        independent.rho = 0.0;
        const auto closed = analysis::expected_walltimes(independent);
        const auto mc = analysis::montecarlo_walltimes(model, cfg.theory.replicates, seed, workers);
        records.push_back(comparison("sync_ratio", closed.sync_ratio, mc.sync_ratio.mean, mc.sync_ratio.std_error));
        records.push_back(comparison("cv_ratio", closed.sync_ratio, mc.cv_ratio.mean, mc.cv_ratio.std_error));
        records.push_back(comparison("sync_conventional", closed.sync_conventional, mc.sync_conventional.mean,
                                     mc.sync_conventional.std_error));
        records.push_back(comparison("sync_structure_aware", closed.sync_structure_aware,
                                     mc.sync_structure_aware.mean, mc.sync_structure_aware.std_error));
        records.push_back(comparison("wall_conventional", closed.wall_conventional, mc.wall_conventional.mean,
                                     mc.wall_conventional.std_error));
        records.push_back(comparison("wall_structure_aware", closed.wall_structure_aware,
                                     mc.wall_structure_aware.mean, mc.wall_structure_aware.std_error));
        doc["model"] = model;
    }
    doc["records"] = records;
    return doc;
}

namespace {

// Every neuron fires exactly once, within the first cycle.
NetworkSpec one_spike_per_neuron(NetworkSpec net) {
    const auto t_model = net.grid.t_model_steps;
    for (std::size_t g = 0; g < net.neurons.size(); ++g) {
        auto& n = net.neurons[g];
        n.fire_interval_steps = t_model;
        n.fire_phase_steps = (t_model - static_cast<std::int64_t>(g) % net.grid.d_min_steps) % t_model;
    }
    return net;
}

} // namespace

json access_point(const ExperimentConfig& cfg, const PointSpec& point) {
    const auto m = point.network.n_areas;
    const auto params = analysis::AccessModelParams::weak_scaling(point.network.neurons_per_area,
                                                                  point.network.k_intra, point.network.k_inter,
                                                                  m, cfg.threads_per_rank);
    json doc = {{"label", point.label}, {"value", point.value}, {"params", params}};
    json records = json::array();
    for (auto scheme : cfg.schemes) {
        const double analytic = scheme == Scheme::conventional ? analysis::f_irr_conventional(params)
                                                               : analysis::f_irr_structure_aware(params);
        std::vector<double> oracle;
        bool engine_match = true;
        for (auto seed : cfg.seeds) {
            auto p = point;
            p.heterogeneity = {};
            const auto net = instantiate(p, seed);
            const auto plan = make_plan(net, scheme, m, cfg.threads_per_rank);
            const auto brute = analysis::f_irr_bruteforce(net, plan);
            oracle.push_back(brute.f_combined);
            const auto result = run(one_spike_per_neuron(net), plan, cfg.engine);
            engine_match = engine_match && result.totals.n_irregular == brute.groups &&
                           result.totals.n_synapse_touches == brute.synapses;
        }
        const auto stats = mean_sd(oracle);
        auto rec = comparison("f_irr", analytic, stats["mean"].get<double>(), stats["sd"].get<double>());
        rec["scheme"] = to_string(scheme);
        rec["oracle_per_seed"] = oracle;
        rec["engine_counters_match"] = engine_match;
        records.push_back(rec);
    }
    doc["records"] = records;
    return doc;
}

// Driver --------------------------------------------------------------------------

json run_experiment(const ExperimentConfig& cfg, std::ostream* log) {
    validate(cfg);
    const fs::path out = cfg.output_dir;
    fs::create_directories(out / "points");

    json canonical = to_json(cfg);
    canonical.erase("output_dir");
    const auto hash = fnv1a_hex(canonical.dump());

    const auto manifest_path = out / "manifest.json";
    std::set<std::string> completed;
    if (fs::exists(manifest_path)) {
        try {
            std::ifstream in(manifest_path);
            const auto old = json::parse(in);
            if (old.value("config_hash", "") == hash)
                for (const auto& label : old.at("completed")) completed.insert(label.get<std::string>());
        } catch (const std::exception&) {
            completed.clear();  // unreadable manifest: start over
        }
    }

    const auto points = sweep_points(cfg);
    json manifest = {{"config_hash", hash}, {"experiment", to_string(cfg.experiment)}, {"completed", json::array()},
                     {"n_points", points.size()}};
    json results = json::array();
    for (const auto& point : points) {
        const auto dir = out / "points" / point.label;
        const auto point_file = dir / "point.json";
        json doc;
        if (completed.count(point.label) && fs::exists(point_file)) {
            std::ifstream in(point_file);
            doc = json::parse(in);
            if (log) *log << "reusing " << point.label << '\n';
        } else {
            if (log) *log << "running " << point.label << '\n';
            fs::create_directories(dir);
            switch (cfg.experiment) {
            case ExperimentKind::theory_check: doc = theory_point(cfg, point); break;
            case ExperimentKind::access_check: doc = access_point(cfg, point); break;
            default: doc = aggregate(run_point(cfg, point, dir)); break;
            }
            write_json(point_file, doc);
        }
        results.push_back(doc);
        manifest["completed"].push_back(point.label);
        manifest["updated_at"] = utc_timestamp();
        write_json(manifest_path, manifest);
    }

    json summary = {{"experiment", to_string(cfg.experiment)}, {"config", canonical}, {"points", results}};
    write_json(out / "summary.json", summary);
    manifest["complete"] = true;
    write_json(manifest_path, manifest);
    return summary;
}

} // namespace areasim::cli
