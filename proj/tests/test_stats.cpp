#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "gin/error.hpp"
#include "gin/kernel.hpp"
#include "gin/oracle.hpp"
#include "gin/rng.hpp"
#include "gin/stats.hpp"

using namespace gin;

namespace {

DataMatrix make_data(const Eigen::MatrixXd& values) {
    std::vector<std::string> names;
    for (int j = 0; j < values.cols(); ++j) names.push_back("C" + std::to_string(j));
    return DataMatrix(values, names);
}

Eigen::VectorXd uniform_column(RngStream& r, int n, double lo = -1.0, double hi = 1.0) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = r.uniform(lo, hi);
    return v;
}

Eigen::VectorXd sin_series(int n, double freq, double phase = 0.0) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = std::sin(freq * i + phase);
    return v;
}

}  // namespace

TEST(CrossCovariance, SelfAndUncorrelated) {
    Eigen::MatrixXd v(4, 3);
    // column 1 has variance 2; columns 0 and 2 are orthogonal after centering
    v << 1, 1, 1,
         -1, -1, 1,
         1, 2, -1,
         -1, -2, -1;
    const auto d = make_data(v);
    const Eigen::MatrixXd c11 = cross_covariance(d, std::vector<int>{1}, std::vector<int>{1}, true);
    EXPECT_NEAR(c11(0, 0), 10.0 / 3.0, 1e-12);
    const Eigen::MatrixXd c02 = cross_covariance(d, std::vector<int>{0}, std::vector<int>{2});
    EXPECT_NEAR(c02(0, 0), 0.0, 1e-12);
    EXPECT_THROW(cross_covariance(d, std::vector<int>{1}, std::vector<int>{1}), std::invalid_argument);
    EXPECT_THROW(cross_covariance(d, std::vector<int>{}, std::vector<int>{1}), std::invalid_argument);
    EXPECT_THROW(cross_covariance(d, std::vector<int>{7}, std::vector<int>{1}), std::invalid_argument);
}

TEST(Omega, ForcedNullDirection) {
    Eigen::MatrixXd cross(2, 1);
    cross << 1.0, 0.0;
    const auto sol = omega_from_cross_covariance(cross, 1e-8);
    EXPECT_NEAR(sol.omega(0), 0.0, 1e-15);
    EXPECT_NEAR(sol.omega(1), 1.0, 1e-15);
    EXPECT_EQ(sol.null_dim, 1);
    EXPECT_NEAR(sol.residual_singular_value, 0.0, 1e-15);
    EXPECT_FALSE(sol.degenerate);
}

TEST(Omega, AllZeroCrossCovariance) {
    const auto sol = omega_from_cross_covariance(Eigen::MatrixXd::Zero(3, 2), 1e-8);
    EXPECT_TRUE(sol.degenerate);
    EXPECT_EQ(sol.null_dim, 3);
    EXPECT_EQ(sol.omega, Eigen::Vector3d(1, 0, 0));
}

TEST(Omega, TwoLayerClosedForm) {
    // Y = {X1,X2,X3}, Z = {X4,X5} with a = (1,2,3), b = (1,1,2)
    const auto g = fixtures::two_layer_graph();
    const Eigen::MatrixXd sigma = PopulationOracle(g).observed_covariance();
    const Eigen::MatrixXd cross = sigma({0, 1, 2}, {3, 4});
    const auto sol = omega_from_cross_covariance(cross, 1e-8);
    const Eigen::Vector3d expected = Eigen::Vector3d(1, 1, -1) / std::sqrt(3.0);
    EXPECT_LT((sol.omega - expected).norm(), 1e-10);
    EXPECT_LT(sol.residual_singular_value, 1e-10 * cross.norm());
}

TEST(Omega, ResidualMatchesReportedSingularValue) {
    RngStream r(8);
    for (int t = 0; t < 20; ++t) {
        Eigen::MatrixXd cross(3, 4);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 4; ++j) cross(i, j) = r.uniform(-1, 1);
        const auto sol = omega_from_cross_covariance(cross, 1e-8);
        EXPECT_NEAR(sol.omega.norm(), 1.0, 1e-12);
        EXPECT_NEAR((sol.omega.transpose() * cross).norm(), sol.residual_singular_value, 1e-12);
        EXPECT_GT(sol.omega(0) != 0.0 ? sol.omega(0) : sol.omega(1), 0.0);
    }
}

TEST(Omega, ScaleEquivariance) {
    const auto g = fixtures::two_layer_graph();
    const Eigen::MatrixXd sigma = PopulationOracle(g).observed_covariance();
    const Eigen::MatrixXd cross = sigma({0, 1, 2}, {3, 4});
    const Eigen::Vector3d d(2.0, 0.5, 3.0);
    const auto base = omega_from_cross_covariance(cross, 1e-8);
    const auto scaled = omega_from_cross_covariance(d.asDiagonal() * cross, 1e-8);
    const Eigen::VectorXd expected = canonical_direction(d.cwiseInverse().asDiagonal() * base.omega);
    EXPECT_LT((scaled.omega - expected).norm(), 1e-10);
}

TEST(Omega, ScalarYIsRejected) {
    RngStream r(1);
    Eigen::MatrixXd v(50, 2);
    v.col(0) = uniform_column(r, 50);
    v.col(1) = uniform_column(r, 50);
    const auto d = make_data(v);
    EXPECT_THROW(estimate_omega(d, std::vector<int>{0}, std::vector<int>{1}, TestConfig{}),
                 std::invalid_argument);
}

TEST(Hsic, FrozenGammaValues) {
    // Reference values from an independent float64 implementation of the
    // Gretton gamma test with the median heuristic.
    const Eigen::VectorXd x = sin_series(60, 1.0);
    Eigen::VectorXd y1(60);
    for (int i = 0; i < 60; ++i) y1(i) = std::cos(3.0 * i) + 0.3 * x(i) * x(i);
    const Eigen::VectorXd y2 = [] {
        Eigen::VectorXd v(60);
        for (int i = 0; i < 60; ++i) v(i) = std::cos(7.3 * i + 0.5);
        return v;
    }();
    const auto a = hsic_test(x, y1, TestConfig{});
    EXPECT_NEAR(a.statistic, 0.07616431697203806, 1e-5);
    EXPECT_NEAR(a.p_value, 0.9605160950367457, 1e-4);
    const auto b = hsic_test(x, y2, TestConfig{});
    EXPECT_NEAR(b.statistic, 4.353090003979974, 1e-4);
    EXPECT_NEAR(std::log(b.p_value), std::log(1.90478551229182e-13), 0.05);
}

TEST(Hsic, PerfectDependence) {
    RngStream r(2);
    const Eigen::VectorXd x = uniform_column(r, 300);
    EXPECT_LT(hsic_pvalue(x, x, TestConfig{}), 1e-4);
}

TEST(Hsic, UncorrelatedButDependent) {
    RngStream r(3);
    const Eigen::VectorXd x = uniform_column(r, 1000);
    const Eigen::VectorXd y = x.array().square();
    EXPECT_NEAR(x.dot(y - Eigen::VectorXd::Constant(1000, y.mean())) / 1000.0, 0.0, 0.02);
    EXPECT_LT(hsic_pvalue(x, y, TestConfig{}), 0.01);
    TestConfig perm;
    perm.pvalue_method = PValueMethod::Permutation;
    perm.permutations = 200;
    EXPECT_LT(hsic_pvalue(x, y, perm), 0.01);
}

TEST(Hsic, ConstantArgumentIsDegenerate) {
    RngStream r(4);
    const Eigen::VectorXd x = uniform_column(r, 100);
    const auto res = hsic_test(x, Eigen::VectorXd::Constant(100, 3.0), TestConfig{});
    EXPECT_TRUE(res.degenerate);
    EXPECT_EQ(res.p_value, 1.0);
}

TEST(Hsic, SymmetricForGamma) {
    RngStream r(5);
    const Eigen::VectorXd x = uniform_column(r, 200);
    Eigen::VectorXd y = uniform_column(r, 200);
    y += 0.3 * x.array().cube().matrix();
    EXPECT_NEAR(hsic_pvalue(x, y, TestConfig{}), hsic_pvalue(y, x, TestConfig{}), 1e-9);
}

TEST(Hsic, NullRejectionRate) {
    RngStream r(6);
    int rejected = 0;
    for (int t = 0; t < 1000; ++t) {
        const Eigen::VectorXd x = uniform_column(r, 100);
        const Eigen::VectorXd y = uniform_column(r, 100);
        if (hsic_pvalue(x, y, TestConfig{}) < 0.05) ++rejected;
    }
    EXPECT_GE(rejected, 30);
    EXPECT_LE(rejected, 80);
}

TEST(Hsic, StreamedMatchesMaterialized) {
    RngStream r(7);
    const Eigen::VectorXd x = uniform_column(r, 400);
    Eigen::VectorXd y = uniform_column(r, 400);
    y += 0.2 * x.array().square().matrix();
    TestConfig small;
    small.gram_materialize_limit = 100;
    const auto full = hsic_test(x, y, TestConfig{});
    const auto streamed = hsic_test(x, y, small);
    EXPECT_NEAR(streamed.statistic, full.statistic, 1e-4 * std::abs(full.statistic));
    EXPECT_NEAR(streamed.p_value, full.p_value, 1e-4);

    TestConfig perm;
    perm.pvalue_method = PValueMethod::Permutation;
    perm.permutations = 50;
    perm.permutation_seed = 3;
    TestConfig perm_streamed = perm;
    perm_streamed.gram_materialize_limit = 100;
    EXPECT_NEAR(hsic_test(x, y, perm).p_value, hsic_test(x, y, perm_streamed).p_value, 1e-12);
}

TEST(Hsic, PermutationPValueGrid) {
    RngStream r(9);
    const Eigen::VectorXd x = uniform_column(r, 80);
    const Eigen::VectorXd y = uniform_column(r, 80);
    TestConfig perm;
    perm.pvalue_method = PValueMethod::Permutation;
    perm.permutations = 99;
    perm.permutation_seed = 5;
    const double p = hsic_pvalue(x, y, perm);
    const double count = p * 100.0;
    EXPECT_NEAR(count, std::round(count), 1e-9);
    EXPECT_GE(p, 0.01);
    EXPECT_EQ(p, hsic_pvalue(x, y, perm));
}

TEST(Hsic, RejectsBadInput) {
    EXPECT_THROW(hsic_test(Eigen::VectorXd::Ones(30), Eigen::VectorXd::Ones(31), TestConfig{}),
                 std::invalid_argument);
    RngStream r(1);
    EXPECT_THROW(hsic_test(uniform_column(r, 10), uniform_column(r, 10), TestConfig{}),
                 std::invalid_argument);
}

TEST(Kernel, MedianBandwidthOfKnownPoints) {
    Eigen::MatrixXd pts(4, 1);
    pts << 0, 1, 2, 4;
    // squared distances 1, 4, 16, 1, 9, 4 -> median 4
    EXPECT_NEAR(kernel::median_bandwidth(pts), std::sqrt(2.0), 1e-12);
    EXPECT_EQ(kernel::bandwidth(pts, KernelWidth::fixed(0.05)), 0.05);
}

TEST(Fisher, KnownValues) {
    EXPECT_NEAR(fisher_combine(std::vector<double>{0.05}).p_value, 0.05, 1e-12);
    EXPECT_NEAR(fisher_combine(std::vector<double>{1.0, 1.0}).p_value, 1.0, 1e-12);
    EXPECT_NEAR(fisher_combine(std::vector<double>{0.5, 0.5}).p_value, 0.5965735902799727, 1e-12);
    EXPECT_NEAR(fisher_combine(std::vector<double>{0.2, 0.3, 0.7}).p_value, 0.38618190276887515, 1e-12);
}

TEST(Fisher, ClampsZeroAndRejectsBadInput) {
    const auto r = fisher_combine(std::vector<double>{0.0, 0.5});
    EXPECT_TRUE(r.clamped);
    EXPECT_LT(r.p_value, 1e-300);
    EXPECT_THROW(fisher_combine(std::vector<double>{}), std::invalid_argument);
    EXPECT_THROW(fisher_combine(std::vector<double>{1.5}), std::invalid_argument);
}

TEST(Fisher, Monotone) {
    double prev = 0.0;
    for (double p : {0.001, 0.01, 0.1, 0.4, 0.9}) {
        const double c = fisher_combine(std::vector<double>{p, 0.3, 0.6}).p_value;
        EXPECT_GE(c, prev);
        prev = c;
    }
}

TEST(Ols, ExactLinearRelation) {
    RngStream r(10);
    Eigen::MatrixXd v(200, 2);
    v.col(0) = uniform_column(r, 200);
    v.col(1) = 2.0 * v.col(0);
    const auto d = make_data(v);
    const auto res = ols_residual(d, std::vector<int>{0}, 1);
    EXPECT_LT(res.cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(ols_coefficients(d, std::vector<int>{0}, 1)(0), 2.0, 1e-12);
}

TEST(Ols, RecoversNoise) {
    RngStream r(11);
    const int n = 100000;
    Eigen::MatrixXd v(n, 2);
    v.col(0) = uniform_column(r, n);
    const Eigen::VectorXd e = uniform_column(r, n, -0.5, 0.5);
    v.col(1) = v.col(0) + e;
    const auto d = make_data(v);
    EXPECT_NEAR(ols_coefficients(d, std::vector<int>{0}, 1)(0), 1.0, 0.01);
    const Eigen::VectorXd res = ols_residual(d, std::vector<int>{0}, 1);
    EXPECT_LT((res - (e.array() - e.mean()).matrix()).cwiseAbs().maxCoeff(), 0.02);
}

TEST(Ols, IndependentRegressor) {
    RngStream r(12);
    const int n = 50000;
    Eigen::MatrixXd v(n, 2);
    v.col(0) = uniform_column(r, n);
    v.col(1) = uniform_column(r, n);
    EXPECT_NEAR(ols_coefficients(make_data(v), std::vector<int>{0}, 1)(0), 0.0, 0.03);
}

TEST(Ols, SingularDesign) {
    RngStream r(13);
    Eigen::MatrixXd v(100, 3);
    v.col(0) = uniform_column(r, 100);
    v.col(1) = 3.0 * v.col(0);
    v.col(2) = uniform_column(r, 100);
    EXPECT_THROW(ols_residual(make_data(v), std::vector<int>{0, 1}, 2), NumericalError);
}

TEST(TestConfigValidation, Ranges) {
    TestConfig c;
    EXPECT_NO_THROW(c.validate());
    c.alpha = 1.5;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = TestConfig{};
    c.permutations = 0;
    c.pvalue_method = PValueMethod::Permutation;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = TestConfig{};
    c.kernel_width = KernelWidth::fixed(-1.0);
    EXPECT_THROW(c.validate(), std::invalid_argument);
}
