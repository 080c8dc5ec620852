#include <gtest/gtest.h>

#include <algorithm>
#include <nlohmann/json.hpp>

#include "areasim/partition.hpp"
#include "support.hpp"

using namespace areasim;
using areasim::testing::toy_params;

namespace {

NetworkSpec areas_of_sizes(std::vector<std::uint32_t> sizes) {
    NetworkSpec net;
    net.grid = TimeGrid{10, 1, 10, 100};
    for (std::uint32_t a = 0; a < sizes.size(); ++a) {
        net.areas.push_back({a, sizes[a], 1.0});
        for (std::uint32_t i = 0; i < sizes[a]; ++i) net.neurons.push_back({10000, 0, false, a});
    }
    return net;
}

} // namespace

TEST(RoundRobin, FlattenedAssignment) {
    const auto net = generate_benchmark(toy_params(3, 4, 1, 1, 10, 100, 2.5, 1));
    const auto plan = plan_round_robin(net, 3, 2);
    const std::vector<std::pair<std::uint32_t, std::uint32_t>> expected = {
        {0, 0}, {0, 1}, {1, 0}, {1, 1}, {2, 0}, {2, 1}, {0, 0}, {0, 1}, {1, 0}, {1, 1}, {2, 0}, {2, 1}};
    for (NeuronId g = 0; g < 12; ++g) {
        EXPECT_EQ(plan.assignment[g].rank, expected[g].first) << g;
        EXPECT_EQ(plan.assignment[g].thread, expected[g].second) << g;
        EXPECT_EQ(plan.assignment[g].slot, g / 6);
    }
    EXPECT_TRUE(plan.frozen_ids.empty());
    EXPECT_EQ(plan.global_exchange_period_cycles, 1);
    EXPECT_EQ(plan.lumping_factor, 10);
}

TEST(RoundRobin, SingleRankSingleThread) {
    const auto net = generate_benchmark(toy_params(2, 5, 1, 1, 10, 100, 2.5, 1));
    const auto plan = plan_round_robin(net, 1, 1);
    for (const auto& p : plan.assignment) {
        EXPECT_EQ(p.rank, 0u);
        EXPECT_EQ(p.thread, 0u);
    }
}

TEST(RoundRobin, PigeonholeBalance) {
    for (std::uint32_t n : {1u, 7u, 60u, 61u, 97u}) {
        const auto net = areas_of_sizes({n});
        for (std::uint32_t m : {1u, 2u, 3u, 5u})
            for (std::uint32_t t : {1u, 2u, 4u}) {
                const auto hosted = plan_round_robin(net, m, t).hosted();
                const std::size_t lo = n / (m * t), hi = (n + m * t - 1) / (m * t);
                for (const auto& rank : hosted)
                    for (const auto& thread : rank) {
                        EXPECT_GE(thread.size(), lo);
                        EXPECT_LE(thread.size(), hi);
                    }
            }
    }
    EXPECT_THROW(plan_round_robin(areas_of_sizes({4}), 0, 1), ValidationError);
}

TEST(StructureAware, EqualAreasNoGhosts) {
    const auto net = generate_benchmark(toy_params(3, 4, 1, 1, 10, 100, 2.5, 1));
    const auto plan = plan_structure_aware(net, 2);
    EXPECT_EQ(plan.n_ranks, 3u);
    EXPECT_TRUE(plan.frozen_ids.empty());
    EXPECT_EQ(plan.global_exchange_period_cycles, 10);
    const auto hosted = plan.hosted();
    for (std::uint32_t r = 0; r < 3; ++r)
        for (std::uint32_t t = 0; t < 2; ++t) {
            ASSERT_EQ(hosted[r][t].size(), 2u);
            for (auto id : hosted[r][t]) EXPECT_EQ(net.neurons[id].area, r);
        }
}

TEST(StructureAware, GhostPaddingToLargestArea) {
    const auto net = areas_of_sizes({4, 6, 5});
    const auto plan = plan_structure_aware(net, 2);
    EXPECT_EQ(plan.n_real_neurons, 15u);
    EXPECT_EQ(plan.n_slots(), 18u);
    std::vector<int> frozen_per_rank(3, 0), slots_per_rank(3, 0);
    for (NeuronId id = 0; id < plan.n_slots(); ++id) {
        ++slots_per_rank[plan.assignment[id].rank];
        if (plan.is_ghost(id)) ++frozen_per_rank[plan.assignment[id].rank];
    }
    EXPECT_EQ(frozen_per_rank, (std::vector<int>{2, 0, 1}));
    EXPECT_EQ(slots_per_rank, (std::vector<int>{6, 6, 6}));
    EXPECT_EQ(plan.frozen_ids, (std::vector<NeuronId>{15, 16, 17}));
    EXPECT_DOUBLE_EQ(plan.frozen_fraction, 1.0 - 5.0 / 6.0);
}

TEST(StructureAware, FrozenFractionForSampledSizes) {
    const auto net = generate_heterogeneous(toy_params(8, 1000, 1, 1, 10, 100, 2.5, 654), {0.2, 0.0});
    const auto plan = plan_structure_aware(net, 4);
    double sum = 0, max = 0;
    for (const auto& a : net.areas) {
        sum += a.n_neurons;
        max = std::max<double>(max, a.n_neurons);
    }
    const double mean = sum / 8.0;
    EXPECT_GT(plan.frozen_ids.size(), 0u);
    EXPECT_NEAR(plan.frozen_fraction, 1.0 - mean / max, 1e-12);
}

TEST(StructureAware, SynapsesRespectRankBoundaries) {
    for (std::uint64_t seed : {12ull, 654ull, 91856ull}) {
        const auto net = generate_heterogeneous(toy_params(5, 30, 4, 4, 10, 100, 2.5, seed), {0.3, 0.0});
        const auto plan = plan_structure_aware(net, 3);
        for (const auto& s : net.synapses) {
            const bool same = plan.assignment[s.source].rank == plan.assignment[s.target].rank;
            EXPECT_EQ(same, s.range == RangeClass::intra);
            EXPECT_FALSE(plan.is_ghost(s.source));
            EXPECT_FALSE(plan.is_ghost(s.target));
        }
    }
}

TEST(Plans, TotalAndConsistentWithHostedLists) {
    const auto net = generate_heterogeneous(toy_params(4, 25, 2, 2, 5, 100, 2.5, 3), {0.3, 0.0});
    for (auto scheme : {Scheme::conventional, Scheme::structure_aware}) {
        const auto plan = make_plan(net, scheme, 4, 3);
        const auto hosted = plan.hosted();
        std::vector<int> seen(plan.n_slots(), 0);
        for (std::uint32_t r = 0; r < plan.n_ranks; ++r)
            for (std::uint32_t t = 0; t < plan.threads_per_rank; ++t)
                for (std::uint32_t slot = 0; slot < hosted[r][t].size(); ++slot) {
                    const auto id = hosted[r][t][slot];
                    ++seen[id];
                    EXPECT_EQ(plan.assignment[id], (Placement{r, t, slot}));
                }
        for (int s : seen) EXPECT_EQ(s, 1);
    }
    EXPECT_THROW(make_plan(net, Scheme::structure_aware, 3, 1), ValidationError);
}

TEST(Plans, ConventionalPeriodIgnoresLumping) {
    for (std::int64_t d : {1, 2, 5, 20}) {
        const auto net = generate_benchmark(toy_params(2, 5, 1, 1, d, 20 * d, 2.5, 1));
        EXPECT_EQ(plan_round_robin(net, 2, 1).global_exchange_period_cycles, 1);
        EXPECT_EQ(plan_structure_aware(net, 1).global_exchange_period_cycles, d);
    }
}

TEST(Plans, JsonRoundTrip) {
    const auto net = areas_of_sizes({4, 6, 5});
    const auto plan = plan_structure_aware(net, 2);
    const nlohmann::json doc = plan;
    const auto back = doc.get<PartitionPlan>();
    EXPECT_EQ(back.assignment, plan.assignment);
    EXPECT_EQ(back.frozen_ids, plan.frozen_ids);
    EXPECT_EQ(back.scheme, plan.scheme);
    EXPECT_EQ(back.global_exchange_period_cycles, plan.global_exchange_period_cycles);
}
