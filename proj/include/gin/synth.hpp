#pragma once

#include <cstdint>
#include <vector>

#include "gin/data_matrix.hpp"
#include "gin/graph_model.hpp"
#include "gin/noise.hpp"
#include "gin/rng.hpp"

namespace gin {

struct GenConfig {
    // |b| ~ U[coef_low, coef_high], sign uniform over {+, -} when random_sign.
    double coef_low = 0.5;
    double coef_high = 2.0;
    bool random_sign = true;
    std::uint64_t seed = 0;
    int sample_size = 1000;
    NoiseSpec noise = NoiseSpec::uniform_power(5.0);
    // Rescale every noise term to unit variance (off by default).
    bool unit_variance_noise = false;
    // Probability of each earlier-latent -> later-latent edge in random_graph.
    double latent_edge_probability = 0.5;

    void validate() const;
};

// Fixed benchmark structures:
//   1: L1->L2, L1->{X1,X2}, L2->{X3,X4}
//   2: case 1 plus {L1,L2}->{X5,X6} and L1->{X3,X4}
//   3: L1->L2, L1->L3, L2->L3, three pure children each
//   4: the two-latent-cluster structure {L1,L2}->{X1..X4}, L3->{X5,X6},
//      L4->{X7,X8} with L1->L2, {L1,L2}->L3, {L1,L2}->L4, L3->L4
// Coefficients are drawn from config.seed.
LingLamGraph case_graph(int case_id, const GenConfig& config);

// Random latent DAG: latent j > 1 receives an edge from each earlier latent
// with probability config.latent_edge_probability, at least one forced.
// Every latent gets children_per_latent pure observed children.
LingLamGraph random_graph(int num_latents, int children_per_latent, const GenConfig& config);

// config.sample_size i.i.d. rows by forward simulation in causal order.
// Returns the centered observed columns. Refuses Gaussian noise.
DataMatrix sample(const LingLamGraph& graph, const GenConfig& config);

// Noise stream of one variable: derived from (seed, variable index).
RngStream noise_stream(std::uint64_t seed, int variable);

}  // namespace gin
