#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gin/data_matrix.hpp"
#include "gin/gin_test.hpp"
#include "gin/graph_model.hpp"
#include "gin/oracle.hpp"
#include "gin/stats.hpp"

namespace gin {

struct GinVerdict {
    bool satisfied = false;
    double p_value = 1.0;
    bool degenerate = false;
};

// Source of GIN decisions for the structure search: statistical tests on a
// sample, or exact answers from a known model.
class GinTester {
public:
    virtual ~GinTester() = default;
    virtual int num_columns() const = 0;
    virtual GinVerdict test(std::span<const int> z_cols, std::span<const int> y_cols) = 0;
    // Every Y column is correlated with some Z column. A cluster is only
    // accepted against a dependent complement; independent columns satisfy
    // GIN trivially.
    virtual bool dependent(std::span<const int> z_cols, std::span<const int> y_cols) {
        (void)z_cols;
        (void)y_cols;
        return true;
    }
};

class SampleGinTester : public GinTester {
public:
    SampleGinTester(const DataMatrix& data, const TestConfig& config) : engine_(data, config) {}
    int num_columns() const override { return engine_.data().cols(); }
    GinVerdict test(std::span<const int> z_cols, std::span<const int> y_cols) override;
    // Fisher z-test on Pearson correlations, Bonferroni over Z per Y column.
    bool dependent(std::span<const int> z_cols, std::span<const int> y_cols) override;
    GinEngine& engine() { return engine_; }

private:
    GinEngine engine_;
    Eigen::MatrixXd corr_;
};

// p_value is 1 for a satisfied condition and 0 otherwise.
class OracleGinTester : public GinTester {
public:
    explicit OracleGinTester(LingLamGraph graph, NullQuantifier q = NullQuantifier::ForAll)
        : oracle_(std::move(graph)), quantifier_(q) {}
    int num_columns() const override { return oracle_.graph().num_observed(); }
    GinVerdict test(std::span<const int> z_cols, std::span<const int> y_cols) override;
    bool dependent(std::span<const int> z_cols, std::span<const int> y_cols) override;
    const PopulationOracle& oracle() const { return oracle_; }

private:
    PopulationOracle oracle_;
    NullQuantifier quantifier_;
};

// Which variables act as Z when a candidate cluster is tested: every other
// observed variable, or only those still unclustered.
enum class ClusterContext { Full, Pool };

struct DiscoveryOptions {
    ClusterContext context = ClusterContext::Full;
    // Largest latent dimension tried; 0 means no limit.
    int max_latent_dim = 0;
    bool record_trace = true;
};

struct TraceEntry {
    std::string stage;  // "cluster" or "order"
    std::vector<int> z;
    std::vector<int> y;
    GinVerdict verdict;
};

struct ClusterSearchResult {
    std::vector<CausalCluster> clusters;  // sorted by first member
    std::vector<int> unclustered;
};

struct RootSearchState {
    std::vector<int> resolved;  // cluster indices, root first
    std::vector<int> z_half;
    std::vector<int> y_half;
};

struct RootChoice {
    int cluster = -1;
    double min_p = 1.0;
    bool low_confidence = false;
};

struct DiscoveryResult {
    std::vector<CausalCluster> clusters;
    CausalOrder order;
    std::vector<int> unclustered;
    std::vector<TraceEntry> trace;
    std::vector<std::string> warnings;
    bool low_confidence = false;
};

// Members used on each side of the half split: first k (Y side) and next k
// (Z side) by column. Short clusters give Y min(k, n-1) members and Z the
// rest; `short_cluster` reports that case.
struct HalfSplit {
    std::vector<int> y_side;
    std::vector<int> z_side;
    bool short_cluster = false;
};
HalfSplit half_split(const CausalCluster& cluster);

ClusterSearchResult find_clusters(GinTester& tester, const DiscoveryOptions& options = {},
                                  std::vector<TraceEntry>* trace = nullptr);
ClusterSearchResult find_clusters(const DataMatrix& data, const TestConfig& config,
                                  const DiscoveryOptions& options = {});

// candidates: indices into `clusters`. Throws std::invalid_argument when empty.
RootChoice find_root(GinTester& tester, const std::vector<CausalCluster>& clusters,
                     std::span<const int> candidates, const RootSearchState& state,
                     std::vector<TraceEntry>* trace = nullptr);

CausalOrder learn_order(GinTester& tester, const std::vector<CausalCluster>& clusters,
                        std::vector<TraceEntry>* trace = nullptr,
                        std::vector<std::string>* warnings = nullptr);

DiscoveryResult discover(GinTester& tester, const DiscoveryOptions& options = {});
DiscoveryResult discover(const DataMatrix& data, const TestConfig& config,
                         const DiscoveryOptions& options = {});

}  // namespace gin
