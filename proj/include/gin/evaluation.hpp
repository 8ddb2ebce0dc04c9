#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gin/discovery.hpp"
#include "gin/graph_model.hpp"
#include "gin/stats.hpp"
#include "gin/synth.hpp"

namespace gin {

// A latent parent set of the ground truth together with its child cluster.
struct TrueLatentSet {
    std::vector<int> latents;  // global indices
    CausalCluster cluster;     // members are data columns
};

// One entry per true cluster, in true_clusters order.
std::vector<TrueLatentSet> true_latent_sets(const LingLamGraph& graph);

// P precedes Q when some latent of P \ Q is a proper ancestor of some
// latent of Q \ P. Both directions can hold; such pairs are unordered.
bool latent_set_precedes(const LingLamGraph& graph, const TrueLatentSet& p, const TrueLatentSet& q);

struct ClusterMatching {
    // For each estimated cluster, the index of the true set with maximal
    // Jaccard overlap (smaller index on ties), or -1 with no overlap at all.
    std::vector<int> truth_of;
    std::vector<double> jaccard;
    std::vector<int> unmatched_truth;
    // Estimated latents beyond the matched truth, summed over clusters.
    int surplus_latents = 0;
};

ClusterMatching match_clusters(const std::vector<CausalCluster>& estimated, const LingLamGraph& truth);

struct MetricCounts {
    int omitted = 0;      // OL
    int false_latents = 0;  // FL
    int total_latents = 0;  // TL, latent dimensions summed over true sets
    int mismeasured = 0;  // MO
    int total_observed = 0;  // TO
};

struct MetricReport {
    double latent_omission = 0.0;
    double latent_commission = 0.0;
    double mismeasurement = 0.0;
    bool correct_ordering = false;
    MetricCounts counts;
};

MetricReport score(const DiscoveryResult& estimated, const LingLamGraph& truth);

struct BenchmarkSpec {
    std::vector<int> case_ids;  // fixed structures 1..4
    // Random structures: random_graph(latents, children) for each entry.
    std::vector<int> random_latents;
    int random_children = 3;
    std::vector<int> sample_sizes;
    int repetitions = 10;
    std::uint64_t seed = 0;
    GenConfig gen;
    TestConfig test;
    DiscoveryOptions options;
    int threads = 1;
};

struct BenchmarkRow {
    std::string structure;  // "case1".."case4" or "random(L,C)"
    int sample_size = 0;
    int repetitions = 0;
    double latent_omission = 0.0;
    double latent_commission = 0.0;
    double mismeasurement = 0.0;
    // Repetitions with a nonzero value of the metric.
    int omission_failures = 0;
    int commission_failures = 0;
    int mismeasurement_failures = 0;
    double ordering_rate = 0.0;
};

// Repetition r of (structure, N) draws graph and data from
// derive_seed(seed, {kRepetition, structure id, N, r}). Output is identical
// for any thread count.
std::vector<BenchmarkRow> benchmark(const BenchmarkSpec& spec);

// Per-repetition seed used by benchmark; structure id is the case id, or
// 100 + latents for random structures.
std::uint64_t repetition_seed(std::uint64_t master, int structure_id, int sample_size, int repetition);

}  // namespace gin
