#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "areasim/experiment.hpp"

namespace areasim::cli {

using nlohmann::json;

namespace {

constexpr std::pair<ExperimentKind, const char*> kExperimentNames[] = {
    {ExperimentKind::weak_scaling, "weak_scaling"},   {ExperimentKind::cv_area_sweep, "cv_area_sweep"},
    {ExperimentKind::cv_rate_sweep, "cv_rate_sweep"}, {ExperimentKind::d_sweep, "d_sweep"},
    {ExperimentKind::theory_check, "theory_check"},   {ExperimentKind::access_check, "access_check"},
    {ExperimentKind::single_run, "single_run"},
};

std::string join(const std::string& prefix, const std::string& key) {
    return prefix.empty() ? key : prefix + "." + key;
}

// Typed access to one JSON object that remembers which keys were consumed,
// so leftovers can be reported as unknown.
class Section {
public:
    Section(const json& doc, std::string path) : doc_(doc), path_(std::move(path)) {
        if (!doc_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
    }

    bool has(const std::string& key) const { return doc_.contains(key); }

    template <typename F>
    void with(const std::string& key, F&& f) {
        if (!doc_.contains(key)) return;
        seen_.insert(key);
        f(doc_.at(key), join(path_, key));
    }

    void number(const std::string& key, double& out) {
        with(key, [&](const json& v, const std::string& p) {
            if (!v.is_number()) throw ConfigError(p, "expected a number");
            out = v.get<double>();
            if (!std::isfinite(out)) throw ConfigError(p, "expected a finite number");
        });
    }

    template <typename Int>
    void integer(const std::string& key, Int& out, std::int64_t min_value = 0) {
        with(key, [&](const json& v, const std::string& p) { out = as_integer<Int>(v, p, min_value); });
    }

    void boolean(const std::string& key, bool& out) {
        with(key, [&](const json& v, const std::string& p) {
            if (!v.is_boolean()) throw ConfigError(p, "expected true or false");
            out = v.get<bool>();
        });
    }

    template <typename F>
    void object(const std::string& key, F&& f) {
        with(key, [&](const json& v, const std::string& p) {
            Section sub(v, p);
            f(sub);
            sub.finish();
        });
    }

    void finish() const {
        for (const auto& [key, _] : doc_.items())
            if (!seen_.count(key)) throw ConfigError(join(path_, key), "unknown key");
    }

    template <typename Int>
    static Int as_integer(const json& v, const std::string& p, std::int64_t min_value) {
        if (!v.is_number_integer() && !(v.is_number_float() && std::floor(v.get<double>()) == v.get<double>()))
            throw ConfigError(p, "expected an integer");
        const auto x = v.is_number_unsigned() ? static_cast<std::int64_t>(v.get<std::uint64_t>())
                                               : static_cast<std::int64_t>(v.get<double>());
        if (x < min_value) throw ConfigError(p, "must be at least " + std::to_string(min_value));
        return static_cast<Int>(x);
    }

private:
    const json& doc_;
    std::string path_;
    std::set<std::string> seen_;
};

void read_delay(Section& s, const std::string& key, DelayDistribution& d) {
    s.object(key, [&](Section& sub) {
        sub.number("mean_ms", d.mean_ms);
        sub.number("sd_ms", d.sd_ms);
    });
}

json delay_json(const DelayDistribution& d) { return {{"mean_ms", d.mean_ms}, {"sd_ms", d.sd_ms}}; }

bool is_integer(double v) { return std::floor(v) == v; }

} // namespace

ConfigError::ConfigError(std::string key, const std::string& message)
    : std::runtime_error(key + ": " + message), key_(std::move(key)) {}

std::string to_string(ExperimentKind k) {
    for (const auto& [kind, name] : kExperimentNames)
        if (kind == k) return name;
    return "unknown";
}

ExperimentKind experiment_from_string(const std::string& s) {
    for (const auto& [kind, name] : kExperimentNames)
        if (s == name) return kind;
    std::string names;
    for (const auto& [_, name] : kExperimentNames) names += std::string(names.empty() ? "" : ", ") + name;
    throw ConfigError("experiment", "unknown experiment '" + s + "' (expected one of " + names + ")");
}

ExperimentConfig default_config(ExperimentKind kind) {
    ExperimentConfig cfg;
    cfg.experiment = kind;
    auto& n = cfg.network;
    n.n_areas = 8;
    n.neurons_per_area = 1000;
    n.k_intra = 100;
    n.k_inter = 100;
    n.rate_hz = 2.5;
    n.grid = TimeGrid{10, 1, 10, 1000};
    switch (kind) {
    case ExperimentKind::weak_scaling: cfg.grid = {2, 4, 8, 16}; break;
    case ExperimentKind::cv_area_sweep:
    case ExperimentKind::cv_rate_sweep: cfg.grid = {0.0, 0.1, 0.2, 0.3}; break;
    case ExperimentKind::d_sweep: cfg.grid = {1, 2, 5, 10, 20}; break;
    case ExperimentKind::theory_check: cfg.grid = {1, 2, 5, 10}; break;
    case ExperimentKind::access_check:
        cfg.grid = {2, 4, 8};
        n.neurons_per_area = 4096 / 4;
        n.k_intra = 32;
        n.k_inter = 32;
        break;
    case ExperimentKind::single_run: cfg.write_heatmaps = true; break;
    }
    return cfg;
}

ExperimentConfig parse_config(const json& doc) {
    Section root(doc, "");
    ExperimentKind kind = ExperimentKind::single_run;
    root.with("experiment", [&](const json& v, const std::string& p) {
        if (!v.is_string()) throw ConfigError(p, "expected a string");
        kind = experiment_from_string(v.get<std::string>());
    });
    ExperimentConfig cfg = default_config(kind);

    root.with("output_dir", [&](const json& v, const std::string& p) {
        if (!v.is_string() || v.get<std::string>().empty()) throw ConfigError(p, "expected a non-empty path");
        cfg.output_dir = v.get<std::string>();
    });
    root.with("seeds", [&](const json& v, const std::string& p) {
        if (!v.is_array()) throw ConfigError(p, "expected a list of integers");
        cfg.seeds.clear();
        for (std::size_t i = 0; i < v.size(); ++i)
            cfg.seeds.push_back(Section::as_integer<std::uint64_t>(v[i], p + "[" + std::to_string(i) + "]", 0));
    });
    root.with("grid", [&](const json& v, const std::string& p) {
        if (!v.is_array()) throw ConfigError(p, "expected a list of numbers");
        cfg.grid.clear();
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number()) throw ConfigError(p + "[" + std::to_string(i) + "]", "expected a number");
            cfg.grid.push_back(v[i].get<double>());
        }
    });
    root.object("network", [&](Section& s) {
        auto& n = cfg.network;
        s.integer("n_areas", n.n_areas, 1);
        s.integer("neurons_per_area", n.neurons_per_area, 1);
        s.integer("k_intra", n.k_intra);
        s.integer("k_inter", n.k_inter);
        s.number("rate_hz", n.rate_hz);
        s.integer("h_steps_per_ms", n.grid.h_steps_per_ms, 1);
        s.integer("d_min_steps", n.grid.d_min_steps, 1);
        s.integer("d_min_inter_steps", n.grid.d_min_inter_steps, 1);
        s.integer("t_model_steps", n.grid.t_model_steps, 1);
        read_delay(s, "intra_delay", n.intra_delay);
        read_delay(s, "inter_delay", n.inter_delay);
        s.number("cv_area_size", cfg.heterogeneity.cv_area_size);
        s.number("cv_rate", cfg.heterogeneity.cv_rate);
    });
    root.object("partition", [&](Section& s) {
        s.integer("threads_per_rank", cfg.threads_per_rank, 1);
        s.with("schemes", [&](const json& v, const std::string& p) {
            if (!v.is_array() || v.empty()) throw ConfigError(p, "expected a non-empty list of scheme names");
            cfg.schemes.clear();
            for (std::size_t i = 0; i < v.size(); ++i) {
                const auto where = p + "[" + std::to_string(i) + "]";
                if (!v[i].is_string()) throw ConfigError(where, "expected a scheme name");
                try {
                    cfg.schemes.push_back(scheme_from_string(v[i].get<std::string>()));
                } catch (const std::exception& e) {
                    throw ConfigError(where, e.what());
                }
            }
        });
    });
    root.object("engine", [&](Section& s) {
        s.integer("initial_capacity", cfg.engine.initial_capacity, 1);
        s.integer("entry_bytes", cfg.engine.entry_bytes, 1);
        s.integer("workers", cfg.engine.workers, 1);
    });
    root.object("cost_params", [&](Section& s) {
        s.number("c_update", cfg.cost.c_update);
        s.number("c_hit", cfg.cost.c_hit);
        s.number("c_miss", cfg.cost.c_miss);
        s.number("c_collocate", cfg.cost.c_collocate);
    });
    root.object("exchange_cost", [&](Section& s) {
        s.number("alpha_per_call", cfg.exchange_cost.alpha_per_call);
        s.number("beta_per_byte", cfg.exchange_cost.beta_per_byte);
    });
    root.object("theory", [&](Section& s) {
        auto& m = cfg.theory.model;
        s.number("mu", m.mu);
        s.number("sigma", m.sigma);
        s.integer("n_ranks", m.n_ranks, 1);
        s.integer("n_cycles", m.n_cycles, 1);
        s.integer("lumping_factor", m.lumping_factor, 1);
        s.number("rho", m.rho);
        s.integer("replicates", cfg.theory.replicates, 2);
        s.number("tail_mass", cfg.theory.tail_mass);
        s.integer("tail_cycles", cfg.theory.tail_cycles, 1);
        s.integer("max_replicates", cfg.theory.max_replicates, 2);
    });
    root.object("outputs", [&](Section& s) {
        s.boolean("metrics", cfg.write_metrics);
        s.boolean("heatmaps", cfg.write_heatmaps);
    });
    root.finish();
    validate(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("--config", "cannot open " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("--config", path.string() + " is not valid JSON: " + e.what());
    }
    return parse_config(doc);
}

json to_json(const ExperimentConfig& cfg) {
    const auto& n = cfg.network;
    json schemes = json::array();
    for (auto s : cfg.schemes) schemes.push_back(to_string(s));
    const auto& m = cfg.theory.model;
    return {
        {"experiment", to_string(cfg.experiment)},
        {"output_dir", cfg.output_dir.string()},
        {"seeds", cfg.seeds},
        {"grid", cfg.grid},
        {"network",
         {{"n_areas", n.n_areas},
          {"neurons_per_area", n.neurons_per_area},
          {"k_intra", n.k_intra},
          {"k_inter", n.k_inter},
          {"rate_hz", n.rate_hz},
          {"h_steps_per_ms", n.grid.h_steps_per_ms},
          {"d_min_steps", n.grid.d_min_steps},
          {"d_min_inter_steps", n.grid.d_min_inter_steps},
          {"t_model_steps", n.grid.t_model_steps},
          {"intra_delay", delay_json(n.intra_delay)},
          {"inter_delay", delay_json(n.inter_delay)},
          {"cv_area_size", cfg.heterogeneity.cv_area_size},
          {"cv_rate", cfg.heterogeneity.cv_rate}}},
        {"partition", {{"threads_per_rank", cfg.threads_per_rank}, {"schemes", schemes}}},
        {"engine",
         {{"initial_capacity", cfg.engine.initial_capacity},
          {"entry_bytes", cfg.engine.entry_bytes},
          {"workers", cfg.engine.workers}}},
        {"cost_params",
         {{"c_update", cfg.cost.c_update},
          {"c_hit", cfg.cost.c_hit},
          {"c_miss", cfg.cost.c_miss},
          {"c_collocate", cfg.cost.c_collocate}}},
        {"exchange_cost",
         {{"alpha_per_call", cfg.exchange_cost.alpha_per_call}, {"beta_per_byte", cfg.exchange_cost.beta_per_byte}}},
        {"theory",
         {{"mu", m.mu},
          {"sigma", m.sigma},
          {"n_ranks", m.n_ranks},
          {"n_cycles", m.n_cycles},
          {"lumping_factor", m.lumping_factor},
          {"rho", m.rho},
          {"replicates", cfg.theory.replicates},
          {"tail_mass", cfg.theory.tail_mass},
          {"tail_cycles", cfg.theory.tail_cycles},
          {"max_replicates", cfg.theory.max_replicates}}},
        {"outputs", {{"metrics", cfg.write_metrics}, {"heatmaps", cfg.write_heatmaps}}},
    };
}

void validate(const ExperimentConfig& cfg) {
    if (cfg.seeds.empty()) throw ConfigError("seeds", "must not be empty");
    if (cfg.schemes.empty()) throw ConfigError("partition.schemes", "must not be empty");
    if (cfg.experiment != ExperimentKind::single_run && cfg.grid.empty())
        throw ConfigError("grid", "must not be empty for " + to_string(cfg.experiment));
    if (cfg.experiment == ExperimentKind::single_run && !cfg.grid.empty())
        throw ConfigError("grid", "single_run takes no grid");

    for (std::size_t i = 0; i < cfg.grid.size(); ++i) {
        const double v = cfg.grid[i];
        const auto where = "grid[" + std::to_string(i) + "]";
        switch (cfg.experiment) {
        case ExperimentKind::weak_scaling:
        case ExperimentKind::d_sweep:
        case ExperimentKind::theory_check:
            if (!is_integer(v) || v < 1) throw ConfigError(where, "expected an integer >= 1");
            break;
        case ExperimentKind::access_check:
            if (!is_integer(v) || v < 2) throw ConfigError(where, "expected an integer >= 2 (ranks)");
            break;
        case ExperimentKind::cv_area_sweep:
        case ExperimentKind::cv_rate_sweep:
            if (!(v >= 0.0 && v < 1.0)) throw ConfigError(where, "expected a coefficient of variation in [0, 1)");
            break;
        case ExperimentKind::single_run: break;
        }
    }

    const auto& h = cfg.heterogeneity;
    if (!(h.cv_area_size >= 0.0 && h.cv_area_size < 1.0))
        throw ConfigError("network.cv_area_size", "expected a value in [0, 1)");
    if (!(h.cv_rate >= 0.0 && h.cv_rate < 1.0)) throw ConfigError("network.cv_rate", "expected a value in [0, 1)");
    if (cfg.network.rate_hz < 0.0) throw ConfigError("network.rate_hz", "must be non-negative");
    for (const auto* key : {"intra_delay", "inter_delay"}) {
        const auto& d = std::string(key) == "intra_delay" ? cfg.network.intra_delay : cfg.network.inter_delay;
        if (d.mean_ms <= 0.0) throw ConfigError(std::string("network.") + key + ".mean_ms", "must be positive");
        if (d.sd_ms < 0.0) throw ConfigError(std::string("network.") + key + ".sd_ms", "must be non-negative");
    }
    for (const auto& [key, value] : {std::pair{"c_update", cfg.cost.c_update}, std::pair{"c_hit", cfg.cost.c_hit},
                                     std::pair{"c_miss", cfg.cost.c_miss},
                                     std::pair{"c_collocate", cfg.cost.c_collocate}})
        if (value < 0.0) throw ConfigError(std::string("cost_params.") + key, "must be non-negative");

    if (cfg.experiment == ExperimentKind::theory_check) {
        auto m = cfg.theory.model;
        const double tail = cfg.theory.tail_mass;
        if (!(tail >= 0.0 && tail <= 1.0)) throw ConfigError("theory.tail_mass", "expected a value in [0, 1]");
        for (double d : cfg.grid) {
            m.lumping_factor = static_cast<std::int64_t>(d);
            try {
                m.validate();
            } catch (const std::exception& e) {
                throw ConfigError("theory", e.what());
            }
        }
        return;
    }

    for (const auto& point : sweep_points(cfg)) {
        try {
            point.network.grid.validate();
        } catch (const std::exception& e) {
            throw ConfigError("network", "grid point " + point.label + ": " + e.what());
        }
        if (cfg.network.rate_hz > 0.0) {
            try {
                fire_interval_for_rate(point.network.rate_hz, point.network.grid.h_steps_per_ms);
            } catch (const std::exception& e) {
                throw ConfigError("network.rate_hz", e.what());
            }
        }
        if (point.network.k_inter > 0 && point.network.n_areas < 2)
            throw ConfigError("network.k_inter", "inter-area synapses need at least two areas (point " +
                                                     point.label + ")");
    }
}

} // namespace areasim::cli
