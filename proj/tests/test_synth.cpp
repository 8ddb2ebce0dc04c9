#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "gin/oracle.hpp"
#include "gin/rng.hpp"
#include "gin/synth.hpp"

using namespace gin;

namespace {

GenConfig config(std::uint64_t seed, int n = 1000) {
    GenConfig c;
    c.seed = seed;
    c.sample_size = n;
    return c;
}

double moment(const std::vector<double>& x, int k) {
    double s = 0.0;
    for (double v : x) s += std::pow(v, k);
    return s / static_cast<double>(x.size());
}

}  // namespace

TEST(Rng, DerivedSeedsAreStable) {
    EXPECT_EQ(derive_seed(1, {2, 3}), derive_seed(1, {2, 3}));
    EXPECT_NE(derive_seed(1, {2, 3}), derive_seed(1, {3, 2}));
    EXPECT_NE(derive_seed(1, {2}), derive_seed(2, {2}));
    RngStream a(7, {stream::kNoise, 4}), b(7, {stream::kNoise, 4});
    for (int i = 0; i < 10; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, BelowIsInRangeAndCoversIt) {
    RngStream r(11);
    std::vector<int> hits(7, 0);
    for (int i = 0; i < 7000; ++i) {
        const auto v = r.below(7);
        ASSERT_LT(v, 7u);
        ++hits[v];
    }
    for (int h : hits) EXPECT_GT(h, 800);
}

TEST(Noise, UniformPowerMoments) {
    RngStream r(3);
    const auto x = draw_noise(NoiseSpec::uniform_power(5.0), 200000, r);
    for (double v : x) ASSERT_LE(std::abs(v), 1.0);
    const double m2 = moment(x, 2), m4 = moment(x, 4);
    EXPECT_NEAR(moment(x, 1), 0.0, 0.003);
    EXPECT_NEAR(m2, 1.0 / 11.0, 0.002);
    // E[u^20] / E[u^10]^2 - 3 = 121/21 - 3
    EXPECT_NEAR(m4 / (m2 * m2) - 3.0, 121.0 / 21.0 - 3.0, 0.25);
    EXPECT_DOUBLE_EQ(NoiseSpec::uniform_power(5.0).variance(), 1.0 / 11.0);
}

TEST(Noise, UniformAndCustom) {
    EXPECT_DOUBLE_EQ(NoiseSpec::uniform(2.0).variance(), 4.0 / 3.0);
    const auto table = NoiseSpec::custom({-1.0, 0.0, 1.0});
    EXPECT_NEAR(table.variance(), 1.0 / 3.0, 1e-12);
    RngStream r(5);
    const auto x = draw_noise(table, 100000, r);
    EXPECT_NEAR(moment(x, 2), 1.0 / 3.0, 0.01);
    auto scaled = NoiseSpec::uniform_power(5.0);
    scaled.scale = std::sqrt(11.0);
    EXPECT_NEAR(scaled.variance(), 1.0, 1e-12);
}

TEST(Noise, RejectsBadSpecs) {
    EXPECT_THROW(NoiseSpec::custom({0.0, 1.0, 2.0}).validate(), std::invalid_argument);
    EXPECT_THROW(NoiseSpec::custom({1.0, 0.0}).validate(), std::invalid_argument);
    EXPECT_THROW(NoiseSpec::uniform(-1.0).validate(), std::invalid_argument);
    RngStream r(1);
    EXPECT_THROW(draw_noise(NoiseSpec::gaussian(1.0), 10, r), std::invalid_argument);
}

TEST(CaseGraph, Shapes) {
    const auto c1 = case_graph(1, config(1));
    EXPECT_EQ(c1.num_latents(), 2);
    EXPECT_EQ(c1.num_observed(), 4);
    EXPECT_EQ(c1.edges().size(), 5u);

    const auto c2 = case_graph(2, config(1));
    EXPECT_EQ(c2.num_observed(), 6);
    const auto c2_clusters = true_clusters(c2);
    ASSERT_EQ(c2_clusters.size(), 2u);
    EXPECT_EQ(c2_clusters[0], (CausalCluster{{0, 1}, 1}));
    EXPECT_EQ(c2_clusters[1], (CausalCluster{{2, 3, 4, 5}, 2}));

    const auto c3 = case_graph(3, config(1));
    EXPECT_EQ(c3.num_latents(), 3);
    EXPECT_EQ(c3.num_observed(), 9);

    const auto c4 = case_graph(4, config(1));
    EXPECT_EQ(c4.num_latents(), 4);
    EXPECT_EQ(c4.num_observed(), 8);
    const auto clusters = true_clusters(c4);
    ASSERT_EQ(clusters.size(), 3u);
    EXPECT_EQ(clusters[0], (CausalCluster{{0, 1, 2, 3}, 2}));
    EXPECT_EQ(clusters[1], (CausalCluster{{4, 5}, 1}));
    EXPECT_EQ(clusters[2], (CausalCluster{{6, 7}, 1}));

    EXPECT_THROW(case_graph(5, config(1)), std::invalid_argument);
}

TEST(CaseGraph, CoefficientLawAndDeterminism) {
    for (int id = 1; id <= 4; ++id) {
        const auto a = case_graph(id, config(42));
        const auto b = case_graph(id, config(42));
        EXPECT_EQ(a.coefficients(), b.coefficients());
        EXPECT_TRUE(validate_model(a).empty());
        for (const auto& e : a.edges()) {
            EXPECT_GE(std::abs(e.coef), 0.5);
            EXPECT_LE(std::abs(e.coef), 2.0);
        }
    }
    EXPECT_NE(case_graph(4, config(1)).coefficients(), case_graph(4, config(2)).coefficients());
}

TEST(RandomGraph, Shapes) {
    const auto g = random_graph(5, 3, config(9));
    EXPECT_EQ(g.num_latents(), 5);
    EXPECT_EQ(g.num_observed(), 15);
    EXPECT_EQ(random_graph(20, 3, config(9)).num_observed(), 60);
    const auto tiny = random_graph(1, 2, config(9));
    EXPECT_TRUE(validate_model(tiny).empty());
    EXPECT_EQ(true_clusters(tiny).size(), 1u);
    EXPECT_THROW(random_graph(3, 1, config(9)), std::invalid_argument);
}

TEST(RandomGraph, EveryLaterLatentHasALatentParent) {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto g = random_graph(5, 2, config(seed));
        EXPECT_TRUE(validate_model(g).empty());
        for (int l = 1; l < g.num_latents(); ++l) EXPECT_FALSE(g.latent_parents(l).empty());
        EXPECT_TRUE(g.latent_parents(0).empty());
    }
}

TEST(Sample, CenteredAndReproducible) {
    const auto g = case_graph(4, config(3));
    const auto a = sample(g, config(3, 1000));
    const auto b = sample(g, config(3, 1000));
    ASSERT_EQ(a.rows(), 1000);
    ASSERT_EQ(a.cols(), 8);
    EXPECT_EQ(a.values(), b.values());
    EXPECT_EQ(a.names()[0], "X1");
    for (int j = 0; j < a.cols(); ++j) EXPECT_NEAR(a.values().col(j).mean(), 0.0, 1e-12);
}

TEST(Sample, ZeroCoefficientsGiveIndependentColumns) {
    std::vector<NoiseSpec> noise(3, NoiseSpec::uniform_power());
    const LingLamGraph g({"L1"}, {"X1", "X2"}, Eigen::MatrixXd::Zero(3, 3), noise);
    const auto d = sample(g, config(4, 50000));
    const auto& x = d.values();
    const double r = x.col(0).dot(x.col(1)) / std::sqrt(x.col(0).squaredNorm() * x.col(1).squaredNorm());
    EXPECT_LT(std::abs(r), 4.0 / std::sqrt(50000.0));
}

TEST(Sample, MatchesPopulationCovariance) {
    const auto g = case_graph(1, config(5));
    const int n = 100000;
    const auto d = sample(g, config(5, n));
    const Eigen::MatrixXd pop = PopulationOracle(g).observed_covariance();
    const auto& x = d.values();
    for (int i = 0; i < x.cols(); ++i)
        for (int j = 0; j <= i; ++j) {
            const Eigen::ArrayXd prod = x.col(i).array() * x.col(j).array();
            const double c = prod.sum() / (n - 1);
            const double se = std::sqrt((prod - prod.mean()).square().sum() / (n - 1) / n);
            EXPECT_LT(std::abs(c - pop(i, j)), 3.0 * se) << i << "," << j;
        }
}

TEST(Sample, RefusesGaussianNoise) {
    std::vector<NoiseSpec> noise(3, NoiseSpec::uniform_power());
    noise[1] = NoiseSpec::gaussian(1.0);
    const LingLamGraph g({"L1"}, {"X1", "X2"}, {{"L1", "X1", 1.0}, {"L1", "X2", 1.0}}, noise);
    EXPECT_THROW(sample(g, config(1, 100)), std::invalid_argument);
}

TEST(Sample, UnitVarianceOption) {
    auto c = config(6, 200000);
    c.unit_variance_noise = true;
    const auto g = case_graph(1, c);
    for (const auto& s : g.noise_specs()) EXPECT_NEAR(s.variance(), 1.0, 1e-12);
}
