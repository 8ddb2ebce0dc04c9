#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gin/graph_model.hpp"

namespace gin {

// (I - B)^{-1}: row i expresses variable i over all noise terms. Computed
// by substitution in causal order.
Eigen::MatrixXd mixing_matrix(const LingLamGraph& graph);

// M diag(noise variances) M^T over all variables (latents first).
Eigen::MatrixXd population_covariance(const LingLamGraph& graph);

// Global-index graph queries.
bool d_separated(const LingLamGraph& graph, std::span<const int> a, std::span<const int> b,
                 std::span<const int> given);

// s1 is exogenous relative to s2: s2 within s1, or every V in s2 \ s1
// neither causes a member of s1 nor shares with one a common cause outside
// s1. A common cause counts only if it reaches V without passing through
// s1 and reaches the s1 member without passing through s1 or V.
bool is_exogenous_set(const LingLamGraph& graph, std::span<const int> s1, std::span<const int> s2);

enum class NullQuantifier {
    ForAll,  // every null-space direction yields an independent surrogate
    Exists,  // some direction does
};

struct ExactGinResult {
    bool satisfied = false;
    int null_dim = 0;
    // Noise terms (global variable indices) shared by a surrogate and Z.
    std::vector<int> shared_noise;
    // A singular value of the cross-covariance sits in the band where the
    // null-space dimension is numerically unclear; redraw coefficients.
    bool ambiguous = false;
};

struct ExactInResult {
    bool satisfied = false;
    std::vector<int> shared_noise;
};

struct GraphicalGinResult {
    bool satisfied = false;
    std::vector<int> witness;  // latent global indices
};

// Exact decisions from the generating model. Z and Y are data columns
// (observed variables in order). Copies the graph.
class PopulationOracle {
public:
    explicit PopulationOracle(LingLamGraph graph);

    const LingLamGraph& graph() const { return graph_; }
    const Eigen::MatrixXd& mixing() const { return mixing_; }
    const Eigen::MatrixXd& covariance() const { return sigma_; }
    Eigen::MatrixXd observed_covariance() const;

    // Decides GIN through noise supports (Darmois-Skitovitch): a surrogate
    // is independent of Z iff it shares no noise term with any Z column.
    // Y of size one and overlapping Y/Z are accepted.
    ExactGinResult exact_gin(std::span<const int> z_cols, std::span<const int> y_cols,
                             NullQuantifier quantifier = NullQuantifier::ForAll) const;

    // Residual of y on Z shares no noise term with Z.
    ExactInResult exact_in(std::span<const int> z_cols, int y_col) const;

    // Latent-subset criterion with exhaustive enumeration. Throws
    // std::invalid_argument for more than 16 latents.
    GraphicalGinResult graphical_gin(std::span<const int> z_cols, std::span<const int> y_cols) const;

private:
    std::vector<int> support(const Eigen::RowVectorXd& row) const;
    std::vector<int> to_global(std::span<const int> cols) const;

    LingLamGraph graph_;
    Eigen::MatrixXd mixing_;
    Eigen::MatrixXd sigma_;
};

}  // namespace gin
