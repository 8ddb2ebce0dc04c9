#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gin/data_matrix.hpp"
#include "gin/kernel.hpp"
#include "gin/stats.hpp"

namespace gin {

struct PairPValue {
    int z_col = 0;
    double p_value = 1.0;
};

struct GinResult {
    bool satisfied = false;
    double combined_p = 1.0;
    std::vector<PairPValue> pairwise_p;  // one per Z column; a single entry (-1) in joint mode
    OmegaSolution omega;
    TestConfig config_used;
    // Vacuous test (zero surrogate, constant column or all-zero cross-covariance).
    bool degenerate = false;
    // A zero p-value was clamped before Fisher's combination.
    bool clamped = false;
};

// Runs GIN and IN tests against one data set. Keeps the data covariance and
// the centered Gram matrix of every column it has seen, so repeated tests
// over the same columns (as in structure search) pay for each column kernel
// once. Not thread safe.
class GinEngine {
public:
    GinEngine(const DataMatrix& data, TestConfig config);

    const DataMatrix& data() const { return data_; }
    const TestConfig& config() const { return config_; }

    // Preconditions of gin_test; throws std::invalid_argument.
    GinResult gin(std::span<const int> z_cols, std::span<const int> y_cols);
    GinResult in(std::span<const int> z_cols, int y_col);
    // GIN of Z against Y_aug = (y, Z); overlap of Y_aug and Z is intended.
    GinResult gin_augmented(std::span<const int> z_cols, int y_col);

    // Bytes of cached Gram matrices; caching stops at the budget.
    std::size_t cache_bytes() const { return cache_bytes_; }
    void set_cache_budget(std::size_t bytes) { cache_budget_ = bytes; }

private:
    // reference bounds the surrogate norm absent cancellation.
    GinResult finish(const Eigen::VectorXd& surrogate, double reference,
                     std::span<const int> z_cols, OmegaSolution omega);
    Eigen::MatrixXd cross(std::span<const int> y, std::span<const int> z) const;
    bool materialize() const { return data_.rows() <= config_.gram_materialize_limit; }
    const kernel::CenteredGram* column_gram(int col);
    HsicResult pair_test(const Eigen::MatrixXd& e_std, double e_sigma,
                         const kernel::CenteredGram* e_gram, int z_col);

    const DataMatrix& data_;
    TestConfig config_;
    Eigen::MatrixXd centered_;
    Eigen::MatrixXd cov_;
    std::map<int, std::unique_ptr<kernel::CenteredGram>> grams_;
    std::map<int, std::unique_ptr<kernel::CenteredGram>> transient_;
    std::size_t cache_bytes_ = 0;
    std::size_t cache_budget_ = std::size_t{2} << 30;
};

// Surrogate omega^T Y tested against each Z column, Fisher-combined.
// Needs |Y| >= 2, Z nonempty, Y and Z disjoint.
GinResult gin_test(const DataMatrix& data, std::span<const int> z_cols, std::span<const int> y_cols,
                   const TestConfig& config);

// Residual of y regressed on Z tested against each Z column. The reported
// omega is the canonical form of [1, -beta] over (y, Z).
GinResult in_test(const DataMatrix& data, std::span<const int> z_cols, int y_col,
                  const TestConfig& config);

GinResult gin_via_augmentation(const DataMatrix& data, std::span<const int> z_cols, int y_col,
                               const TestConfig& config);

}  // namespace gin
