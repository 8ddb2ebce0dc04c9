#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "gin/noise.hpp"

namespace gin {

enum class VariableKind { Latent, Observed };

struct VariableRef {
    int index = 0;
    std::string name;
    VariableKind kind = VariableKind::Latent;

    bool is_latent() const { return kind == VariableKind::Latent; }
    bool operator==(const VariableRef&) const = default;
};

struct EdgeSpec {
    std::string from;
    std::string to;
    double coef = 0.0;
};

// A linear acyclic model over latent and observed variables.
//
// Latents occupy global indices [0, num_latents) and observed variables
// [num_latents, num_variables). Observed variable with global index v is
// data column v - num_latents. coefficients()(i, j) is the direct effect of
// j on i. Instances are immutable; the with_/without_ members return edited
// copies.
class LingLamGraph {
public:
    // Throws std::invalid_argument on duplicate or unknown names, size
    // mismatches, non-finite coefficients, self loops or cycles.
    LingLamGraph(std::vector<std::string> latent_names, std::vector<std::string> observed_names,
                 const std::vector<EdgeSpec>& edges, std::vector<NoiseSpec> noise);
    LingLamGraph(std::vector<std::string> latent_names, std::vector<std::string> observed_names,
                 Eigen::MatrixXd coefficients, std::vector<NoiseSpec> noise);

    int num_latents() const { return num_latents_; }
    int num_observed() const { return static_cast<int>(variables_.size()) - num_latents_; }
    int num_variables() const { return static_cast<int>(variables_.size()); }

    const std::vector<VariableRef>& variables() const { return variables_; }
    std::span<const VariableRef> latents() const;
    std::span<const VariableRef> observed() const;
    const VariableRef& variable(int index) const;
    // Throws std::invalid_argument for an unknown name.
    const VariableRef& find(std::string_view name) const;
    bool contains(std::string_view name) const;

    const Eigen::MatrixXd& coefficients() const { return coefficients_; }
    const NoiseSpec& noise(int index) const { return noise_.at(static_cast<std::size_t>(index)); }
    const std::vector<NoiseSpec>& noise_specs() const { return noise_; }

    // Topological order of all variables (parents first); ties broken by index.
    const std::vector<int>& causal_order() const { return causal_order_; }
    std::vector<int> parents(int index) const;
    std::vector<int> children(int index) const;
    std::vector<int> latent_parents(int index) const;
    // True iff a directed path of length >= 1 leads from `ancestor` to `descendant`.
    bool is_ancestor(int ancestor, int descendant) const;

    int column_of(int observed_index) const;
    int observed_at_column(int column) const { return num_latents_ + column; }
    std::vector<EdgeSpec> edges() const;

    LingLamGraph with_edge(std::string_view from, std::string_view to, double coef) const;
    LingLamGraph without_variable(std::string_view name) const;

private:
    void finish_construction();

    int num_latents_ = 0;
    std::vector<VariableRef> variables_;
    Eigen::MatrixXd coefficients_;
    std::vector<NoiseSpec> noise_;
    std::vector<int> causal_order_;
    std::vector<std::vector<bool>> ancestor_;  // ancestor_[a][d]
};

// A set of observed variables (data columns, ascending) sharing latent_dim
// latent direct causes.
struct CausalCluster {
    std::vector<int> members;
    int latent_dim = 1;

    bool operator==(const CausalCluster&) const = default;
};

// Cluster indices, root first.
struct CausalOrder {
    std::vector<int> sequence;

    bool operator==(const CausalOrder&) const = default;
};

enum class Assumption { A1Measurement, A2NonGaussian, A3DoublePure, A4Purity };

struct Violation {
    Assumption assumption;
    std::vector<std::string> variables;
    std::string message;
};

std::string assumption_name(Assumption a);

// Empty iff the graph satisfies the measurement, non-Gaussianity,
// double-pure-child and purity assumptions. Never throws.
std::vector<Violation> validate_model(const LingLamGraph& graph);

// Observed variables (global indices, ascending) with a parent in
// latent_set. Throws std::invalid_argument for unknown or non-latent indices.
std::vector<int> children_of(const LingLamGraph& graph, std::span<const int> latent_set);

// Observed variables grouped by identical latent parent sets. Members are
// data columns; clusters are sorted by their first member. Observed
// variables without latent parents belong to no cluster. Throws
// std::invalid_argument if validate_model reports violations.
std::vector<CausalCluster> true_clusters(const LingLamGraph& graph);

// Latent parent set (global indices) shared by the members of a true cluster.
std::vector<int> cluster_latents(const LingLamGraph& graph, const CausalCluster& cluster);

}  // namespace gin
