#include <gtest/gtest.h>

#include <cmath>

#include "areasim/analysis.hpp"
#include "support.hpp"

using namespace areasim;
using namespace areasim::analysis;
using areasim::testing::toy_params;

// Reference values computed independently with scipy.stats.norm and
// direct evaluation of the closed forms in double precision.
namespace ref {
constexpr double q975 = 1.959963984540054;
constexpr double blom_2 = 0.5894557978497783;
constexpr double blom_128 = 2.5846924742431145;
constexpr double exact_max_2 = 0.5641895835477563;  // 1 / sqrt(pi)
constexpr double tail_99 = 0.9895408568269545;      // 1 - 0.965^128
constexpr double f_conv_128_48 = 0.638358077693733;
constexpr double f_sa_128_48 = 0.40289345993980524;
} // namespace ref

TEST(NormalQuantile, KnownValues) {
    EXPECT_NEAR(normal_quantile(0.975), ref::q975, 1e-12);
    EXPECT_NEAR(normal_quantile(0.025), -ref::q975, 1e-12);
    EXPECT_EQ(normal_quantile(0.5), 0.0);
}

TEST(XiMax, BlomValues) {
    EXPECT_EQ(xi_max(1), 0.0);
    EXPECT_NEAR(xi_max(2), ref::blom_2, 1e-12);
    EXPECT_NEAR(xi_max(128), ref::blom_128, 1e-12);
    EXPECT_THROW(xi_max(0), ValidationError);
}

TEST(XiMax, StrictlyIncreasing) {
    for (std::uint32_t m = 1; m < 2048; ++m) EXPECT_LT(xi_max(m), xi_max(m + 1)) << m;
}

TEST(XiMax, MonteCarloOracleRecoversExactMaxOfTwo) {
    const auto mc = expected_max_montecarlo(2, 400000, 3);
    EXPECT_NEAR(mc.mean, ref::exact_max_2, 4 * mc.std_error);
}

TEST(ExpectedWalltimes, ClosedForm) {
    CycleTimeModel m{2.0, 0.3, 64, 1000, 10, 0.0};
    const auto e = expected_walltimes(m);
    const double xi = xi_max(64);
    EXPECT_DOUBLE_EQ(e.wall_conventional, 1000 * 2.0 + 1000 * xi * 0.3);
    EXPECT_DOUBLE_EQ(e.wall_structure_aware, 1000 * 2.0 + 1000 * xi * 0.3 / std::sqrt(10.0));
    EXPECT_NEAR(e.sync_ratio, 0.31622776601683794, 1e-15);
    EXPECT_NEAR(1.0 - e.sync_ratio, 0.684, 5e-4);

    m.lumping_factor = 1;
    EXPECT_EQ(expected_walltimes(m).sync_ratio, 1.0);
    EXPECT_EQ(expected_walltimes(m).wall_conventional, expected_walltimes(m).wall_structure_aware);

    m.n_ranks = 1;
    EXPECT_EQ(expected_walltimes(m).sync_conventional, 0.0);
    EXPECT_EQ(expected_walltimes(m).sync_structure_aware, 0.0);

    m.rho = 0.5;
    EXPECT_THROW(expected_walltimes(m), ValidationError);
}

TEST(CycleTimeModel, Validation) {
    EXPECT_THROW((CycleTimeModel{1, 0.1, 4, 105, 10, 0}).validate(), ValidationError);
    EXPECT_THROW((CycleTimeModel{1, 0.1, 4, 100, 10, 1.0}).validate(), ValidationError);
    EXPECT_THROW((CycleTimeModel{0, 0.1, 4, 100, 10, 0}).validate(), ValidationError);
}

TEST(MonteCarloWalltimes, ZeroSigmaHasNoSynchronization) {
    const auto mc = montecarlo_walltimes({1.5, 0.0, 16, 100, 10, 0.0}, 3, 1);
    EXPECT_EQ(mc.sync_conventional.mean, 0.0);
    EXPECT_EQ(mc.sync_structure_aware.mean, 0.0);
    EXPECT_NEAR(mc.wall_conventional.mean, 150.0, 1e-9);
    EXPECT_NEAR(mc.wall_structure_aware.mean, 150.0, 1e-9);
}

TEST(MonteCarloWalltimes, IndependentCyclesFollowClosedForm) {
    const CycleTimeModel m{1.0, 0.1, 32, 2000, 4, 0.0};
    const auto mc = montecarlo_walltimes(m, 8, 12);
    EXPECT_NEAR(mc.sync_ratio.mean, 0.5, 0.03);
    EXPECT_NEAR(mc.cv_ratio.mean, 0.5, 0.02);
    // Blom is within 1% of the exact expected maximum at M = 32.
    const auto e = expected_walltimes(m);
    EXPECT_NEAR(mc.sync_conventional.mean / e.sync_conventional, 1.0, 0.02);
}

TEST(MonteCarloWalltimes, SerialCorrelationDegradesLumping) {
    const auto mc = montecarlo_walltimes({1.0, 0.1, 16, 1000, 10, 0.9}, 4, 5);
    EXPECT_GT(mc.cv_ratio.mean, 1.0 / std::sqrt(10.0));
    EXPECT_GT(mc.sync_ratio.mean, 1.0 / std::sqrt(10.0));
}

TEST(MonteCarloWalltimes, IndependentOfWorkerCount) {
    const CycleTimeModel m{1.0, 0.2, 8, 200, 5, 0.3};
    const auto a = montecarlo_walltimes(m, 6, 99, 1);
    const auto b = montecarlo_walltimes(m, 6, 99, 4);
    EXPECT_EQ(a.sync_ratio.mean, b.sync_ratio.mean);
    EXPECT_EQ(a.wall_conventional.mean, b.wall_conventional.mean);
    EXPECT_EQ(expected_max_montecarlo(5, 30000, 1, 1).mean, expected_max_montecarlo(5, 30000, 1, 3).mean);
}

TEST(MaxQuantileProbability, ValuesAndMonotonicity) {
    EXPECT_NEAR(max_quantile_probability(0.035, 128), ref::tail_99, 1e-12);
    EXPECT_EQ(max_quantile_probability(0.0, 77), 0.0);
    EXPECT_EQ(max_quantile_probability(1.0, 77), 1.0);
    EXPECT_THROW(max_quantile_probability(1.5, 2), ValidationError);
    for (double p = 0.0; p < 0.99; p += 0.01) {
        EXPECT_LE(max_quantile_probability(p, 16), max_quantile_probability(p + 0.01, 16));
        EXPECT_LE(max_quantile_probability(p, 16), max_quantile_probability(p, 17));
    }
}

TEST(MaxQuantileProbability, MonteCarloAgreement) {
    const auto mc = max_in_tail_montecarlo(0.1, 8, 50000, 4);
    EXPECT_NEAR(mc.mean, max_quantile_probability(0.1, 8), 4 * mc.std_error + 1e-3);
}

TEST(AccessModel, PaperScaleValues) {
    const auto p = AccessModelParams::weak_scaling(130000, 3000, 3000, 128, 48);
    EXPECT_NEAR(f_irr_conventional(p), ref::f_conv_128_48, 1e-9);
    EXPECT_NEAR(f_irr_structure_aware(p), ref::f_sa_128_48, 1e-9);
}

TEST(AccessModel, LimitCases) {
    AccessModelParams p = AccessModelParams::weak_scaling(1e6, 1, 0, 1, 1);
    EXPECT_NEAR(f_irr_conventional(p), 1.0 - std::exp(-1.0), 1e-6);

    for (double k : {1.0, 10.0, 1000.0}) {
        const auto single = AccessModelParams::weak_scaling(500, k, 0, 1, 1);
        EXPECT_LE(f_irr_conventional(single), 1.0);
    }
    EXPECT_THROW(f_irr_structure_aware(AccessModelParams::weak_scaling(100, 5, 5, 1, 4)), ValidationError);
}

TEST(AccessModel, DecoupledAreasReduceToPerRankConventional) {
    for (std::uint32_t m : {2u, 8u, 64u}) {
        const auto sa = AccessModelParams::weak_scaling(20000, 600, 0, m, 12);
        const auto per_rank = AccessModelParams::weak_scaling(20000, 600, 0, 1, 12);
        EXPECT_NEAR(f_irr_structure_aware(sa), f_irr_conventional(per_rank), 1e-12);
    }
}

TEST(AccessModel, StructureAwareBelowConventionalInWeakScaling) {
    for (std::uint32_t m : {32u, 64u, 128u})
        for (std::uint32_t t : {48u, 128u}) {
            const auto p = AccessModelParams::weak_scaling(130000, 3000, 3000, m, t);
            EXPECT_LT(f_irr_structure_aware(p), f_irr_conventional(p)) << m << "x" << t;
        }
}

TEST(BruteForceAccess, ExtremeLayouts) {
    // Source 0 projects to 4 neurons that all sit on thread 0; source 1 to
    // 4 neurons on 4 distinct threads.
    NetworkSpec net;
    net.grid = TimeGrid{10, 1, 10, 100};
    net.areas.push_back({0, 17, 1.0});
    for (int i = 0; i < 17; ++i) net.neurons.push_back({100, 0, false, 0});
    for (NeuronId t : {4u, 8u, 12u, 16u}) net.synapses.push_back({0, t, 2, RangeClass::intra});
    for (NeuronId t : {5u, 6u, 7u, 9u}) net.synapses.push_back({1, t, 2, RangeClass::intra});
    const auto plan = plan_round_robin(net, 1, 4);

    net.synapses.resize(4);
    EXPECT_DOUBLE_EQ(f_irr_bruteforce(net, plan).f_combined, 0.25);
    net.synapses.clear();
    for (NeuronId t : {5u, 6u, 7u, 4u}) net.synapses.push_back({1, t, 2, RangeClass::intra});
    EXPECT_DOUBLE_EQ(f_irr_bruteforce(net, plan).f_combined, 1.0);
}

TEST(BruteForceAccess, RandomNetTracksAnalyticFormula) {
    const auto net = generate_benchmark(toy_params(4, 1024, 32, 32, 10, 100, 2.5, 12));
    const auto params = AccessModelParams::weak_scaling(1024, 32, 32, 4, 2);
    const auto conv = f_irr_bruteforce(net, plan_round_robin(net, 4, 2));
    const auto sa = f_irr_bruteforce(net, plan_structure_aware(net, 2));
    EXPECT_NEAR(conv.f_combined / f_irr_conventional(params), 1.0, 0.05);
    EXPECT_NEAR(sa.f_combined / f_irr_structure_aware(params), 1.0, 0.05);
    EXPECT_EQ(conv.synapses[1], 0u);
    EXPECT_EQ(sa.synapses[0], sa.synapses[1]);
}
