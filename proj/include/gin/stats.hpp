#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gin/data_matrix.hpp"

namespace gin {

struct KernelWidth {
    enum class Mode { Median, Fixed };
    Mode mode = Mode::Median;
    double value = 0.05;  // Fixed only; applies to standardized inputs

    static KernelWidth median() { return {}; }
    static KernelWidth fixed(double width) { return {Mode::Fixed, width}; }
    bool operator==(const KernelWidth&) const = default;
};

enum class PValueMethod { Gamma, Permutation };

struct TestConfig {
    double alpha = 0.05;
    KernelWidth kernel_width;
    PValueMethod pvalue_method = PValueMethod::Gamma;
    int permutations = 500;
    std::uint64_t permutation_seed = 0;
    // Singular values below svd_tolerance * sigma_max count as null directions.
    double svd_tolerance = 1e-8;
    // Test the surrogate against all of Z jointly instead of pairwise + Fisher.
    bool joint_hsic = false;
    // Above this N the HSIC statistic is streamed instead of materializing
    // N x N Gram matrices.
    int gram_materialize_limit = 10000;

    // Throws std::invalid_argument.
    void validate() const;
    bool operator==(const TestConfig&) const = default;
};

struct OmegaSolution {
    Eigen::VectorXd omega;
    double residual_singular_value = 0.0;
    int null_dim = 0;
    // Set when the cross-covariance vanishes and every direction is null.
    bool degenerate = false;
};

// Sample cross-covariance (1/(N-1) normalization). Overlapping index sets
// are rejected unless allow_overlap. Throws std::invalid_argument.
Eigen::MatrixXd cross_covariance(const DataMatrix& data, std::span<const int> y_cols,
                                 std::span<const int> z_cols, bool allow_overlap = false);

// Left singular vector of `cross` with the smallest singular value; when
// rows > cols the unmatched directions have singular value zero.
// Sign canonical: first nonzero component positive.
OmegaSolution omega_from_cross_covariance(const Eigen::MatrixXd& cross, double svd_tolerance);

// Throws std::invalid_argument for |Y| < 2.
OmegaSolution estimate_omega(const DataMatrix& data, std::span<const int> y_cols,
                             std::span<const int> z_cols, const TestConfig& config,
                             bool allow_overlap = false);

// Makes the first nonzero entry positive and the norm one.
Eigen::VectorXd canonical_direction(Eigen::VectorXd v);

struct HsicResult {
    double p_value = 1.0;
    double statistic = 0.0;
    // A constant argument makes the test vacuous; p_value is then 1.
    bool degenerate = false;
};

// Gaussian-kernel HSIC independence test. x and y may have several columns
// (joint test). Throws std::invalid_argument on length mismatch and, for the
// gamma approximation, N < 20.
HsicResult hsic_test(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const TestConfig& config);
double hsic_pvalue(const Eigen::VectorXd& x, const Eigen::VectorXd& y, const TestConfig& config);

struct FisherResult {
    double p_value = 1.0;
    double statistic = 0.0;
    // Some input was zero and got clamped to the smallest positive double.
    bool clamped = false;
};

// Survival of chi-square with 2c dof at -2 sum ln p. Throws
// std::invalid_argument on an empty list or inputs outside [0, 1].
FisherResult fisher_combine(std::span<const double> pvals);

// Least-squares coefficients of y on Z (with intercept). Throws
// gin::NumericalError when the Z covariance has condition number > 1e12.
Eigen::VectorXd ols_coefficients(const DataMatrix& data, std::span<const int> z_cols, int y_col);
Eigen::VectorXd ols_residual(const DataMatrix& data, std::span<const int> z_cols, int y_col);

}  // namespace gin
