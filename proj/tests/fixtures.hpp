#pragma once

#include <string>
#include <vector>

#include "gin/graph_model.hpp"
#include "gin/noise.hpp"

namespace gin::fixtures {

// Four latents, eight observed: {L1,L2} -> X1..X4, L3 -> X5,X6, L4 -> X7,X8.
// X1..X3 loadings are a = (1, 2, 3), b = (1, 1, 2).
inline LingLamGraph two_layer_graph(double alpha = 0.8, double beta = 0.7, double sigma = 1.2) {
    std::vector<EdgeSpec> edges = {
        {"L1", "L2", alpha}, {"L1", "L3", beta}, {"L2", "L3", sigma},
        {"L1", "L4", 0.9},   {"L2", "L4", -0.6}, {"L3", "L4", 1.1},
        {"L1", "X1", 1.0},   {"L2", "X1", 1.0},  {"L1", "X2", 2.0},
        {"L2", "X2", 1.0},   {"L1", "X3", 3.0},  {"L2", "X3", 2.0},
        {"L1", "X4", 1.5},   {"L2", "X4", -1.0}, {"L3", "X5", 1.3},
        {"L3", "X6", 0.9},   {"L4", "X7", 1.0},  {"L4", "X8", -1.4},
    };
    std::vector<NoiseSpec> noise(12, NoiseSpec::uniform_power(5.0));
    return LingLamGraph({"L1", "L2", "L3", "L4"},
                        {"X1", "X2", "X3", "X4", "X5", "X6", "X7", "X8"}, edges, noise);
}

// Observed names to data columns of a graph.
inline std::vector<int> cols(const LingLamGraph& g, std::initializer_list<const char*> names) {
    std::vector<int> out;
    for (const char* n : names) out.push_back(g.column_of(g.find(n).index));
    return out;
}

inline std::vector<int> globals(const LingLamGraph& g, std::initializer_list<const char*> names) {
    std::vector<int> out;
    for (const char* n : names) out.push_back(g.find(n).index);
    return out;
}

}  // namespace gin::fixtures
