#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "gin/gin_test.hpp"
#include "gin/oracle.hpp"
#include "gin/rng.hpp"
#include "gin/synth.hpp"

using namespace gin;
using gin::fixtures::cols;

namespace {

GenConfig config(std::uint64_t seed, int n) {
    GenConfig c;
    c.seed = seed;
    c.sample_size = n;
    return c;
}

// Columns z, y with y = beta * z + e, both non-Gaussian.
DataMatrix cause_effect(std::uint64_t seed, int n, double beta) {
    RngStream r(seed);
    const auto z = draw_noise(NoiseSpec::uniform_power(), n, r);
    const auto e = draw_noise(NoiseSpec::uniform_power(), n, r);
    Eigen::MatrixXd v(n, 2);
    for (int i = 0; i < n; ++i) {
        v(i, 0) = z[i];
        v(i, 1) = beta * z[i] + e[i];
    }
    return DataMatrix(v, {"Z", "Y"});
}

}  // namespace

TEST(GinTest, LabelledExamples) {
    const auto g = case_graph(4, config(21, 2000));
    const auto data = sample(g, config(21, 2000));
    const auto ok = gin_test(data, cols(g, {"X4", "X5"}), cols(g, {"X1", "X2", "X3"}), TestConfig{});
    EXPECT_TRUE(ok.satisfied) << ok.combined_p;
    EXPECT_EQ(ok.pairwise_p.size(), 2u);
    const auto bad = gin_test(data, cols(g, {"X3", "X6"}), cols(g, {"X1", "X2", "X5"}), TestConfig{});
    EXPECT_FALSE(bad.satisfied) << bad.combined_p;
    EXPECT_EQ(bad.config_used, TestConfig{});
}

TEST(GinTest, IndependentNoiseColumns) {
    RngStream r(4);
    Eigen::MatrixXd v(500, 3);
    for (int j = 0; j < 3; ++j) {
        const auto x = draw_noise(NoiseSpec::uniform_power(), 500, r);
        for (int i = 0; i < 500; ++i) v(i, j) = x[i];
    }
    const DataMatrix d(v, {"A", "B", "C"});
    const auto res = gin_test(d, std::vector<int>{2}, std::vector<int>{0, 1}, TestConfig{});
    EXPECT_TRUE(res.satisfied) << res.combined_p;
}

TEST(GinTest, Preconditions) {
    const auto d = cause_effect(1, 100, 1.0);
    EXPECT_THROW(gin_test(d, std::vector<int>{0}, std::vector<int>{1}, TestConfig{}),
                 std::invalid_argument);
    EXPECT_THROW(gin_test(d, std::vector<int>{}, std::vector<int>{0, 1}, TestConfig{}),
                 std::invalid_argument);
    EXPECT_THROW(gin_test(d, std::vector<int>{0}, std::vector<int>{0, 1}, TestConfig{}),
                 std::invalid_argument);
    TestConfig bad;
    bad.alpha = 0.0;
    EXPECT_THROW(in_test(d, std::vector<int>{0}, 1, bad), std::invalid_argument);
}

TEST(GinTest, JointModeReportsOneEntry) {
    const auto g = case_graph(1, config(2, 500));
    const auto data = sample(g, config(2, 500));
    TestConfig joint;
    joint.joint_hsic = true;
    const auto res = gin_test(data, cols(g, {"X3", "X4"}), cols(g, {"X1", "X2"}), joint);
    ASSERT_EQ(res.pairwise_p.size(), 1u);
    EXPECT_EQ(res.pairwise_p[0].z_col, -1);
    EXPECT_EQ(res.combined_p, res.pairwise_p[0].p_value);
}

TEST(InTest, CauseEffectAsymmetry) {
    const auto d = cause_effect(5, 1000, 1.0);
    const auto forward = in_test(d, std::vector<int>{0}, 1, TestConfig{});
    EXPECT_TRUE(forward.satisfied) << forward.combined_p;
    const auto backward = in_test(d, std::vector<int>{1}, 0, TestConfig{});
    EXPECT_FALSE(backward.satisfied) << backward.combined_p;
}

TEST(InTest, OmegaIsCanonicalRegression) {
    const auto d = cause_effect(6, 2000, -1.5);
    const auto res = in_test(d, std::vector<int>{0}, 1, TestConfig{});
    const Eigen::VectorXd expected = canonical_direction(Eigen::Vector2d(1.0, 1.5));
    EXPECT_LT((res.omega.omega - expected).norm(), 3.0 / std::sqrt(2000.0));
}

TEST(InTest, ExactCopyIsDegenerate) {
    RngStream r(7);
    Eigen::MatrixXd v(200, 2);
    for (int i = 0; i < 200; ++i) v(i, 0) = v(i, 1) = r.uniform(-1, 1);
    const DataMatrix d(v, {"A", "B"});
    const auto res = in_test(d, std::vector<int>{0}, 1, TestConfig{});
    EXPECT_TRUE(res.degenerate);
    EXPECT_TRUE(res.satisfied);
    EXPECT_EQ(res.combined_p, 1.0);
}

TEST(Augmentation, ContainsInCondition) {
    int in_held = 0, contained = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto d = cause_effect(100 + seed, 2000, 0.8);
        const auto in = in_test(d, std::vector<int>{0}, 1, TestConfig{});
        const auto aug = gin_via_augmentation(d, std::vector<int>{0}, 1, TestConfig{});
        if (in.satisfied) {
            ++in_held;
            if (aug.satisfied) ++contained;
        }
        // slope standard error is about 1/sqrt(N)
        const Eigen::VectorXd expected = canonical_direction(Eigen::Vector2d(1.0, -0.8));
        EXPECT_LT((aug.omega.omega - expected).norm(), 3.0 / std::sqrt(2000.0));
    }
    EXPECT_GT(in_held, 0);
    EXPECT_EQ(contained, in_held);
}

TEST(Augmentation, AgreesWithInTestOnIndependentColumns) {
    RngStream r(9);
    int agree = 0;
    for (int t = 0; t < 100; ++t) {
        Eigen::MatrixXd v(300, 2);
        for (int j = 0; j < 2; ++j) {
            const auto x = draw_noise(NoiseSpec::uniform_power(), 300, r);
            for (int i = 0; i < 300; ++i) v(i, j) = x[i];
        }
        const DataMatrix d(v, {"A", "B"});
        const bool in = in_test(d, std::vector<int>{1}, 0, TestConfig{}).satisfied;
        const bool aug = gin_via_augmentation(d, std::vector<int>{1}, 0, TestConfig{}).satisfied;
        if (in == aug) ++agree;
    }
    EXPECT_GE(agree, 95);
}

TEST(GinEngine, CachesColumnGramsAndMatchesFreeFunction) {
    const auto g = case_graph(3, config(10, 600));
    const auto data = sample(g, config(10, 600));
    GinEngine engine(data, TestConfig{});
    const std::vector<int> z = {3, 4, 5}, y = {0, 1};
    const auto a = engine.gin(z, y);
    const auto bytes = engine.cache_bytes();
    EXPECT_GT(bytes, 0u);
    const auto b = engine.gin(z, y);
    EXPECT_EQ(engine.cache_bytes(), bytes);
    EXPECT_EQ(a.combined_p, b.combined_p);
    EXPECT_NEAR(gin_test(data, z, y, TestConfig{}).combined_p, a.combined_p, 1e-12);

    GinEngine tight(data, TestConfig{});
    tight.set_cache_budget(0);
    EXPECT_NEAR(tight.gin(z, y).combined_p, a.combined_p, 1e-12);
    EXPECT_EQ(tight.cache_bytes(), 0u);
}

TEST(GinTest, AgreesWithOracleOnCaseGraphs) {
    int total = 0, agree = 0;
    for (int id : {1, 3}) {
        const auto g = case_graph(id, config(30 + id, 4000));
        const auto data = sample(g, config(30 + id, 4000));
        const PopulationOracle oracle(g);
        GinEngine engine(data, TestConfig{});
        const int m = g.num_observed();
        for (int a = 0; a < m; ++a)
            for (int b = a + 1; b < m; ++b) {
                std::vector<int> z;
                for (int c = 0; c < m; ++c)
                    if (c != a && c != b) z.push_back(c);
                const std::vector<int> y = {a, b};
                ++total;
                if (engine.gin(z, y).satisfied == oracle.exact_gin(z, y).satisfied) ++agree;
            }
    }
    EXPECT_GE(agree, static_cast<int>(std::ceil(0.95 * total))) << agree << "/" << total;
}
