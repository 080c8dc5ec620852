#pragma once

#include <array>
#include <cstdint>

#include <nlohmann/json_fwd.hpp>

#include "areasim/common.hpp"
#include "areasim/model.hpp"
#include "areasim/partition.hpp"

namespace areasim::analysis {

// ---------------------------------------------------------------------------
// Synchronization cost of blocking exchanges
// ---------------------------------------------------------------------------

/// Per-rank cycle times t ~ N(mu, sigma^2), optionally AR(1)-correlated
/// along the cycle axis with coefficient rho (stationary marginal unchanged).
/// Lumped windows span D cycles.
struct CycleTimeModel {
    double mu = 1.0;
    double sigma = 0.1;
    std::uint32_t n_ranks = 128;
    std::int64_t n_cycles = 10000;
    std::int64_t lumping_factor = 10;
    double rho = 0.0;

    void validate() const;
};

/// Standard normal quantile.
double normal_quantile(double p);

/// Expected maximum of M standard normals, Blom's approximation
/// Phi^-1((M - 3/8) / (M + 1/4)).
double xi_max(std::uint32_t n_ranks);

struct ExpectedWalltimes {
    double wall_conventional = 0.0;
    double wall_structure_aware = 0.0;
    double sync_conventional = 0.0;
    double sync_structure_aware = 0.0;
    double sync_ratio = 0.0;  // 1 / sqrt(D)
};

/// Closed form for independent cycle times. Throws ValidationError when
/// rho != 0; use montecarlo_walltimes instead.
ExpectedWalltimes expected_walltimes(const CycleTimeModel& model);

struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;
};

struct MonteCarloWalltimes {
    std::uint32_t replicates = 0;
    Estimate wall_conventional;
    Estimate wall_structure_aware;
    Estimate sync_conventional;
    Estimate sync_structure_aware;
    Estimate cv_conventional;
    Estimate cv_structure_aware;
    Estimate sync_ratio;  // per-replicate sync_struc / sync_conv
    Estimate cv_ratio;    // per-replicate cv_struc / cv_conv
};

/// Samples per-rank cycle times and evaluates both schemes on the same
/// samples: the wall time is the sum of per-window maxima; the
/// synchronization time is the rank-averaged wait (max - own) summed over
/// windows. Replicates use independent streams keyed by (seed, replicate)
/// and are reduced in order, so results do not depend on `workers`.
MonteCarloWalltimes montecarlo_walltimes(const CycleTimeModel& model, std::uint32_t replicates,
                                         std::uint64_t seed, std::uint32_t workers = 0);

/// Monte-Carlo estimate of E[max of M standard normals].
Estimate expected_max_montecarlo(std::uint32_t n_ranks, std::uint64_t replicates,
                                 std::uint64_t seed, std::uint32_t workers = 0);

/// Probability that the maximum of M draws lands in a tail of mass p:
/// 1 - (1 - p)^M.
double max_quantile_probability(double tail_mass, std::uint32_t n_ranks);

/// Fraction of simulated cycles whose per-cycle maximum over M i.i.d.
/// normal cycle times lies in the upper tail of mass p.
Estimate max_in_tail_montecarlo(double tail_mass, std::uint32_t n_ranks, std::uint64_t n_cycles,
                                std::uint64_t seed, std::uint32_t workers = 0);

// ---------------------------------------------------------------------------
// Irregular (first-synapse) memory access during spike delivery
// ---------------------------------------------------------------------------

struct AccessModelParams {
    double n_total = 0;            // N
    double n_per_rank = 0;         // N_M
    double n_per_thread = 0;       // N_T
    double k_total = 0;            // K_N
    double k_intra = 0;
    double k_inter = 0;
    double n_ranks = 1;            // M
    double threads_per_rank = 1;   // T_M
    double n_threads = 1;          // T

    /// Equal areas of `n_per_rank` neurons, one per rank.
    static AccessModelParams weak_scaling(double n_per_rank, double k_intra, double k_inter,
                                          std::uint32_t n_ranks, std::uint32_t threads_per_rank);
};

/// Round-robin placement: p_target T / K_N with
/// p_target = 1 - (1 - 1/N)^(N_T K_N).
double f_irr_conventional(const AccessModelParams& p);

/// Area-per-rank placement:
/// (p_intra T_M + p_inter T_M (M - 1)) / K_N. Requires M >= 2.
double f_irr_structure_aware(const AccessModelParams& p);

/// Exact first-access fraction of a concrete network and placement: distinct
/// (source, rank, thread, pathway) groups over synapses. Arrays are indexed
/// by pathway; under the conventional scheme everything is on the short one.
struct BruteForceAccess {
    std::array<std::uint64_t, kNumRangeClasses> groups{};
    std::array<std::uint64_t, kNumRangeClasses> synapses{};
    double f_intra = 0.0;
    double f_inter = 0.0;
    double f_combined = 0.0;
};

BruteForceAccess f_irr_bruteforce(const NetworkSpec& net, const PartitionPlan& plan);

void to_json(nlohmann::json& j, const CycleTimeModel& m);
void to_json(nlohmann::json& j, const Estimate& e);
void to_json(nlohmann::json& j, const ExpectedWalltimes& e);
void to_json(nlohmann::json& j, const MonteCarloWalltimes& e);
void to_json(nlohmann::json& j, const AccessModelParams& p);

} // namespace areasim::analysis
