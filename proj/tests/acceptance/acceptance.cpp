// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "../support.hpp"
#include "areasim/analysis.hpp"
#include "areasim/engine.hpp"
#include "areasim/experiment.hpp"

using namespace areasim;
namespace an = areasim::analysis;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

// Random property-suite networks shared by criteria 1 and 2.
struct SuiteNet {
    NetworkSpec net;
    std::int64_t lumping = 1;
};

std::vector<SuiteNet> random_suite() {
    std::mt19937_64 rng(20240611);
    std::vector<SuiteNet> suite;
    const std::int64_t lumpings[] = {2, 5, 10};
    for (int i = 0; i < 12; ++i) {
        const std::uint32_t areas = 2 + rng() % 7;
        const std::uint32_t per_area = 40 + rng() % (2000 / areas - 40 - 2000 / areas / 4);
        const std::int64_t d = lumpings[i % 3];
        const std::uint32_t k_intra = 2 + rng() % 8;
        const std::uint32_t k_inter = 1 + rng() % 8;
        const double rate = 100.0 + static_cast<double>(rng() % 400);
        auto p = testing::toy_params(areas, per_area, k_intra, k_inter, d, 30 * d, rate, rng());
        p.intra_delay = {0.1 + 0.1 * (rng() % 10), 0.2};
        p.inter_delay = {0.1 * d + 0.1 * (rng() % 20), 0.5};
        const HeterogeneityParams hetero{0.05 * (rng() % 5), 0.05 * (rng() % 5)};
        suite.push_back({generate_heterogeneous(p, hetero), d});
    }
    return suite;
}

Outcome criterion_equivalence(const std::vector<SuiteNet>& suite) {
    std::size_t max_n = 0, total_records = 0;
    bool mixed = true;
    for (const auto& [net, d] : suite) {
        max_n = std::max<std::size_t>(max_n, net.n_neurons());
        EngineOptions opts;
        opts.record_deliveries = true;
        const auto m = static_cast<std::uint32_t>(net.areas.size());
        const auto conv = run(net, make_plan(net, Scheme::conventional, m, 2), opts);
        const auto sa = run(net, make_plan(net, Scheme::structure_aware, m, 2), opts);
        if (conv.deliveries != sa.deliveries || conv.deliveries.empty())
            return {false, "delivery multisets differ for a net with " + std::to_string(m) + " areas, D=" +
                               std::to_string(d)};
        total_records += conv.deliveries.size();
        std::set<std::int64_t> delays;
        for (const auto& s : net.synapses) delays.insert(s.delay_steps);
        mixed = mixed && delays.size() > 2;
    }
    if (max_n > 2000) return {false, "suite exceeds N = 2000"};
    if (!mixed) return {false, "a suite network lacks mixed delays"};
    return {true, std::to_string(suite.size()) + " nets, " + std::to_string(total_records) +
                      " identical delivery records, max N " + std::to_string(max_n)};
}

Outcome criterion_exchange_counts(const std::vector<SuiteNet>& suite) {
    for (const auto& [net, d] : suite) {
        const auto m = static_cast<std::uint32_t>(net.areas.size());
        const auto s = net.grid.n_cycles();
        const auto conv = run(net, make_plan(net, Scheme::conventional, m, 1));
        const auto sa = run(net, make_plan(net, Scheme::structure_aware, m, 1));
        if (conv.totals.n_global_exchanges != static_cast<std::uint64_t>(s) ||
            sa.totals.n_global_exchanges != static_cast<std::uint64_t>(s / d))
            return {false, "S=" + std::to_string(s) + " D=" + std::to_string(d) + ": conventional " +
                               std::to_string(conv.totals.n_global_exchanges) + ", structure-aware " +
                               std::to_string(sa.totals.n_global_exchanges)};
    }
    return {true, "conventional = S and structure-aware = S/D on all " + std::to_string(suite.size()) + " nets"};
}

Outcome criterion_access_reductions() {
    struct Case {
        std::uint32_t m, t;
        double expected;
    };
    const Case cases[] = {{32, 48, 0.12}, {32, 128, 0.29}, {128, 48, 0.37}, {128, 128, 0.43}};
    Outcome out{true, ""};
    for (const auto& c : cases) {
        const auto p = an::AccessModelParams::weak_scaling(130000, 3000, 3000, c.m, c.t);
        const double reduction = 1.0 - an::f_irr_structure_aware(p) / an::f_irr_conventional(p);
        if (std::abs(reduction - c.expected) > 0.02) out.pass = false;
        out.detail += "M=" + std::to_string(c.m) + ",T_M=" + std::to_string(c.t) + ": " +
                      fmt("%.1f%%", 100 * reduction) + " (paper " + fmt("%.0f%%", 100 * c.expected) + ") ";
    }
    return out;
}

Outcome criterion_access_oracle() {
    auto cfg = cli::default_config(cli::ExperimentKind::access_check);
    cfg.network.neurons_per_area = 1024;
    cfg.network.k_intra = 32;
    cfg.network.k_inter = 32;
    cfg.threads_per_rank = 2;
    cfg.seeds = {12, 654, 91856};
    cfg.grid = {4};
    const auto point = cli::sweep_points(cfg).front();
    const auto doc = cli::access_point(cfg, point);
    double worst = 0.0;
    bool exact = true;
    for (const auto& rec : doc["records"]) {
        const double analytic = rec["analytic"].get<double>();
        for (const auto& v : rec["oracle_per_seed"])
            worst = std::max(worst, std::abs(v.get<double>() - analytic) / analytic);
        exact = exact && rec["engine_counters_match"].get<bool>();
    }
    return {worst <= 0.05 && exact, "worst relative deviation " + fmt("%.2f%%", 100 * worst) +
                                        ", engine counters " + (exact ? "match exactly" : "DIFFER")};
}

Outcome criterion_sync_theory() {
    an::CycleTimeModel m{1.0, 0.1, 128, 10000, 10, 0.0};
    const double closed = an::expected_walltimes(m).sync_ratio;
    const double target = 1.0 / std::sqrt(10.0);
    const auto mc = an::montecarlo_walltimes(m, 20, 12);
    const double rel = std::abs(mc.sync_ratio.mean - closed) / closed;
    const bool pass = std::abs(closed - target) < 1e-12 && rel <= 0.05;
    return {pass, "closed form " + fmt("%.6f", closed) + " (reduction " + fmt("%.1f%%", 100 * (1 - closed)) +
                      "), Monte-Carlo " + fmt("%.6f", mc.sync_ratio.mean) + " (" + fmt("%.2f%%", 100 * rel) + ")"};
}

Outcome criterion_tail() {
    const double analytic = an::max_quantile_probability(0.035, 128);
    const auto mc = an::max_in_tail_montecarlo(0.035, 128, 100000, 12);
    const double rel = std::abs(mc.mean - analytic) / analytic;
    return {std::abs(analytic - 0.9895) <= 1e-4 && rel <= 0.01,
            "analytic " + fmt("%.6f", analytic) + ", empirical " + fmt("%.6f", mc.mean) + " over 1e5 cycles"};
}

Outcome criterion_blom() {
    const double xi = an::xi_max(128);
    const auto mc = an::expected_max_montecarlo(128, 1000000, 12);
    const double rel = std::abs(xi - mc.mean) / mc.mean;
    return {rel <= 0.02 && an::xi_max(1) == 0.0, "xi_128 " + fmt("%.5f", xi) + " vs Monte-Carlo " +
                                                     fmt("%.5f", mc.mean) + " (" + fmt("%.2f%%", 100 * rel) +
                                                     "), xi_1 = " + fmt("%g", an::xi_max(1))};
}

Outcome criterion_serial_correlation() {
    const an::CycleTimeModel m{1.0, 0.1, 32, 10000, 10, 0.9};
    const double bound = 1.0 / std::sqrt(10.0);
    const int batches = 40;
    int above = 0;
    for (int b = 0; b < batches; ++b)
        if (an::montecarlo_walltimes(m, 4, 1000 + b).cv_ratio.mean > bound) ++above;
    return {above >= 0.95 * batches,
            std::to_string(above) + "/" + std::to_string(batches) + " batches exceed 1/sqrt(10)"};
}

Outcome criterion_resize() {
    auto net = generate_benchmark(testing::toy_params(4, 30, 4, 4, 5, 60, 10.0, 9));
    for (auto& n : net.neurons) {
        n.fire_interval_steps = 1;  // every neuron fires at every step
        n.fire_phase_steps = 0;
    }
    const auto expected = testing::expected_deliveries(net);
    EngineOptions opts;
    opts.record_deliveries = true;
    opts.initial_capacity = 2;
    std::string detail;
    bool pass = true;
    for (auto scheme : {Scheme::conventional, Scheme::structure_aware}) {
        const auto r = run(net, make_plan(net, scheme, 4, 2), opts);
        pass = pass && r.deliveries == expected && r.totals.entries_received == r.totals.entries_sent &&
               r.totals.n_resize_rounds >= 1;
        detail += std::string(to_string(scheme)) + ": " + std::to_string(r.totals.n_resize_rounds) +
                  " resize rounds, " + std::to_string(r.totals.entries_sent) + " sent/" +
                  std::to_string(r.totals.entries_received) + " received; ";
    }
    return {pass, detail + std::to_string(expected.size()) + " deliveries checked"};
}

double seed_mean_sync(const nlohmann::json& point) {
    return point["schemes"]["structure_aware"]["sync_proxy"]["mean"].get<double>();
}

Outcome criterion_heterogeneity() {
    Outcome out{true, ""};
    auto cv = cli::default_config(cli::ExperimentKind::cv_area_sweep);
    cv.schemes = {Scheme::structure_aware};
    std::vector<double> sync;
    for (const auto& p : cli::sweep_points(cv)) sync.push_back(seed_mean_sync(cli::aggregate(cli::run_point(cv, p))));
    for (std::size_t i = 1; i < sync.size(); ++i) out.pass = out.pass && sync[i] >= sync[i - 1];
    out.detail = "cv_area sync_proxy";
    for (double s : sync) out.detail += " " + fmt("%.0f", s);

    auto ds = cli::default_config(cli::ExperimentKind::d_sweep);
    ds.schemes = {Scheme::structure_aware};
    ds.grid = {1, 10};
    const auto points = cli::sweep_points(ds);
    const double d1 = seed_mean_sync(cli::aggregate(cli::run_point(ds, points[0])));
    const double d10 = seed_mean_sync(cli::aggregate(cli::run_point(ds, points[1])));
    out.pass = out.pass && d10 <= 0.5 * d1;
    out.detail += "; D=10/D=1 = " + fmt("%.3f", d10 / d1);
    return out;
}

} // namespace

int main() {
    const auto suite = random_suite();
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"cross-scheme delivery equivalence", [&] { return criterion_equivalence(suite); }},
        {"exchange-count law", [&] { return criterion_exchange_counts(suite); }},
        {"irregular-access reductions", criterion_access_reductions},
        {"access-model oracle", criterion_access_oracle},
        {"synchronization ratio", criterion_sync_theory},
        {"upper-tail probability of the maximum", criterion_tail},
        {"Blom expected maximum", criterion_blom},
        {"serial-correlation degradation", criterion_serial_correlation},
        {"buffer-resize protocol", criterion_resize},
        {"heterogeneity and D-sweep trends", criterion_heterogeneity},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!o.pass) ++failures;
        std::printf("%s %2zu %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
