#pragma once

#include <cstddef>
#include <cstdint>

#include <Eigen/Dense>

#include "gin/stats.hpp"

// Gaussian-kernel HSIC machinery shared by hsic_test and the GIN engine.
namespace gin::kernel {

// Column-wise standardization in place. Constant columns become zero.
// Returns false if every column was constant.
bool standardize(Eigen::MatrixXd& x);

// sqrt(0.5 * median of the positive squared distances among the first 100
// rows). Falls back to 1 when there are none.
double median_bandwidth(const Eigen::MatrixXd& x);
double bandwidth(const Eigen::MatrixXd& standardized, const KernelWidth& width);

// H K H for k(a, b) = exp(-|a - b|^2 / (2 sigma^2)), stored in single
// precision. Also keeps the off-diagonal mean of K, which the gamma
// approximation needs.
class CenteredGram {
public:
    CenteredGram(const Eigen::MatrixXd& standardized, double sigma);

    const Eigen::MatrixXf& matrix() const { return kc_; }
    double off_diagonal_mean() const { return off_mean_; }
    int size() const { return static_cast<int>(kc_.rows()); }
    std::size_t bytes() const { return static_cast<std::size_t>(kc_.size()) * sizeof(float); }

private:
    Eigen::MatrixXf kc_;
    double off_mean_ = 0.0;
};

HsicResult gamma_test(const CenteredGram& a, const CenteredGram& b);
HsicResult permutation_test(const CenteredGram& a, const CenteredGram& b, int permutations,
                            std::uint64_t seed);

// Same answers without the N x N storage; every kernel entry is recomputed.
HsicResult streamed_gamma_test(const Eigen::MatrixXd& x, double sigma_x, const Eigen::MatrixXd& y,
                               double sigma_y);
HsicResult streamed_permutation_test(const Eigen::MatrixXd& x, double sigma_x,
                                     const Eigen::MatrixXd& y, double sigma_y, int permutations,
                                     std::uint64_t seed);

// Gamma-approximation p-value from the centered-product sums.
// sum_prod = sum_ij Kc Lc, sum_sq_offdiag = sum_{i != j} (Kc Lc)^2.
HsicResult gamma_from_sums(int n, double sum_prod, double sum_sq_offdiag, double mu_x, double mu_y);

}  // namespace gin::kernel
