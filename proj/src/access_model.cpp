#include <algorithm>
#include <cmath>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "areasim/analysis.hpp"
#include "areasim/tables.hpp"

namespace areasim::analysis {

namespace {

// 1 - (1 - x)^k without cancellation for tiny x and huge k.
double at_least_one(double x, double k) { return -std::expm1(k * std::log1p(-x)); }

} // namespace

AccessModelParams AccessModelParams::weak_scaling(double n_per_rank, double k_intra, double k_inter,
                                                  std::uint32_t n_ranks,
                                                  std::uint32_t threads_per_rank) {
    AccessModelParams p;
    p.n_ranks = n_ranks;
    p.threads_per_rank = threads_per_rank;
    p.n_threads = p.n_ranks * p.threads_per_rank;
    p.n_per_rank = n_per_rank;
    p.n_total = n_per_rank * p.n_ranks;
    p.n_per_thread = p.n_total / p.n_threads;
    p.k_intra = k_intra;
    p.k_inter = k_inter;
    p.k_total = k_intra + k_inter;
    return p;
}

double f_irr_conventional(const AccessModelParams& p) {
    if (!(p.n_total > 0 && p.k_total > 0 && p.n_threads > 0))
        throw ValidationError("N, K_N and T must be positive");
    const double p_target = at_least_one(1.0 / p.n_total, p.n_per_thread * p.k_total);
    return p_target * p.n_threads / p.k_total;
}

double f_irr_structure_aware(const AccessModelParams& p) {
    if (p.n_ranks < 2)
        throw ValidationError("structure-aware access model needs M >= 2 (no neurons outside the own area)");
    if (!(p.k_total > 0 && p.n_per_rank > 0)) throw ValidationError("K_N and N_M must be positive");
    if (std::abs(p.k_intra + p.k_inter - p.k_total) > 1e-9 * p.k_total)
        throw ValidationError("K_intra + K_inter must equal K_N");
    const double p_intra = at_least_one(1.0 / p.n_per_rank, p.n_per_thread * p.k_intra);
    const double p_inter = at_least_one(1.0 / (p.n_total - p.n_per_rank), p.n_per_thread * p.k_inter);
    return (p_intra * p.threads_per_rank + p_inter * p.threads_per_rank * (p.n_ranks - 1.0)) / p.k_total;
}

BruteForceAccess f_irr_bruteforce(const NetworkSpec& net, const PartitionPlan& plan) {
    using Group = std::tuple<NeuronId, std::uint32_t, std::uint32_t, std::uint8_t>;
    std::vector<Group> groups;
    groups.reserve(net.synapses.size());
    BruteForceAccess out;
    for (const auto& s : net.synapses) {
        const auto pathway = index_of(pathway_for(plan.scheme, s.range));
        const auto& where = plan.assignment.at(s.target);
        groups.emplace_back(s.source, where.rank, where.thread, static_cast<std::uint8_t>(pathway));
        ++out.synapses[pathway];
    }
    std::sort(groups.begin(), groups.end());
    groups.erase(std::unique(groups.begin(), groups.end()), groups.end());
    for (const auto& g : groups) ++out.groups[std::get<3>(g)];

    auto ratio = [](std::uint64_t a, std::uint64_t b) {
        return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b);
    };
    out.f_intra = ratio(out.groups[0], out.synapses[0]);
    out.f_inter = ratio(out.groups[1], out.synapses[1]);
    out.f_combined = ratio(out.groups[0] + out.groups[1], out.synapses[0] + out.synapses[1]);
    return out;
}

void to_json(nlohmann::json& j, const CycleTimeModel& m) {
    j = {{"mu", m.mu},
         {"sigma", m.sigma},
         {"M", m.n_ranks},
         {"S", m.n_cycles},
         {"D", m.lumping_factor},
         {"rho", m.rho}};
}

void to_json(nlohmann::json& j, const Estimate& e) {
    j = {{"mean", e.mean}, {"std_error", e.std_error}};
}

void to_json(nlohmann::json& j, const ExpectedWalltimes& e) {
    j = {{"wall_conventional", e.wall_conventional},
         {"wall_structure_aware", e.wall_structure_aware},
         {"sync_conventional", e.sync_conventional},
         {"sync_structure_aware", e.sync_structure_aware},
         {"sync_ratio", e.sync_ratio}};
}

void to_json(nlohmann::json& j, const MonteCarloWalltimes& e) {
    j = {{"replicates", e.replicates},
         {"wall_conventional", e.wall_conventional},
         {"wall_structure_aware", e.wall_structure_aware},
         {"sync_conventional", e.sync_conventional},
         {"sync_structure_aware", e.sync_structure_aware},
         {"cv_conventional", e.cv_conventional},
         {"cv_structure_aware", e.cv_structure_aware},
         {"sync_ratio", e.sync_ratio},
         {"cv_ratio", e.cv_ratio}};
}

void to_json(nlohmann::json& j, const AccessModelParams& p) {
    j = {{"N", p.n_total},   {"N_M", p.n_per_rank}, {"N_T", p.n_per_thread},
         {"K_N", p.k_total}, {"K_intra", p.k_intra}, {"K_inter", p.k_inter},
         {"M", p.n_ranks},   {"T_M", p.threads_per_rank}, {"T", p.n_threads}};
}

} // namespace areasim::analysis
