#include "gin/synth.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace gin {

void GenConfig::validate() const {
    if (!(coef_low > 0.0 && coef_low < coef_high && std::isfinite(coef_high)))
        throw std::invalid_argument("coefficient range must satisfy 0 < low < high");
    if (sample_size < 1) throw std::invalid_argument("sample size must be >= 1");
    if (!(latent_edge_probability >= 0.0 && latent_edge_probability <= 1.0))
        throw std::invalid_argument("latent edge probability must lie in [0, 1]");
    if (noise.is_gaussian()) throw std::invalid_argument("Gaussian noise violates non-Gaussianity");
    noise.validate();
}

namespace {

std::string name(char prefix, int one_based) { return std::string(1, prefix) + std::to_string(one_based); }

class GraphBuilder {
public:
    GraphBuilder(const GenConfig& config, int num_latents, int num_observed)
        : config_(config), coef_rng_(config.seed, {stream::kCoefficients}) {
        for (int i = 1; i <= num_latents; ++i) latents_.push_back(name('L', i));
        for (int i = 1; i <= num_observed; ++i) observed_.push_back(name('X', i));
    }

    // Indices are one-based as in the structure descriptions.
    void latent_edge(int from, int to) { edges_.push_back({name('L', from), name('L', to), draw()}); }
    void measure(int latent, int observed) {
        edges_.push_back({name('L', latent), name('X', observed), draw()});
    }

    LingLamGraph build() {
        NoiseSpec spec = config_.noise;
        if (config_.unit_variance_noise) spec.scale = spec.scale / std::sqrt(spec.variance());
        std::vector<NoiseSpec> noise(latents_.size() + observed_.size(), spec);
        return LingLamGraph(latents_, observed_, edges_, std::move(noise));
    }

private:
    double draw() {
        const double magnitude = coef_rng_.uniform(config_.coef_low, config_.coef_high);
        if (!config_.random_sign) return magnitude;
        return coef_rng_.coin() ? -magnitude : magnitude;
    }

    const GenConfig& config_;
    RngStream coef_rng_;
    std::vector<std::string> latents_, observed_;
    std::vector<EdgeSpec> edges_;
};

}  // namespace

LingLamGraph case_graph(int case_id, const GenConfig& config) {
    config.validate();
    switch (case_id) {
        case 1: {
            GraphBuilder g(config, 2, 4);
            g.latent_edge(1, 2);
            g.measure(1, 1);
            g.measure(1, 2);
            g.measure(2, 3);
            g.measure(2, 4);
            return g.build();
        }
        case 2: {
            GraphBuilder g(config, 2, 6);
            g.latent_edge(1, 2);
            g.measure(1, 1);
            g.measure(1, 2);
            for (int x = 3; x <= 6; ++x) {
                g.measure(1, x);
                g.measure(2, x);
            }
            return g.build();
        }
        case 3: {
            GraphBuilder g(config, 3, 9);
            g.latent_edge(1, 2);
            g.latent_edge(1, 3);
            g.latent_edge(2, 3);
            for (int l = 1; l <= 3; ++l)
                for (int k = 1; k <= 3; ++k) g.measure(l, 3 * (l - 1) + k);
            return g.build();
        }
        case 4: {
            GraphBuilder g(config, 4, 8);
            g.latent_edge(1, 2);
            g.latent_edge(1, 3);
            g.latent_edge(2, 3);
            g.latent_edge(1, 4);
            g.latent_edge(2, 4);
            g.latent_edge(3, 4);
            for (int x = 1; x <= 4; ++x) {
                g.measure(1, x);
                g.measure(2, x);
            }
            g.measure(3, 5);
            g.measure(3, 6);
            g.measure(4, 7);
            g.measure(4, 8);
            return g.build();
        }
        default:
            throw std::invalid_argument("case id must be 1, 2, 3 or 4, got " + std::to_string(case_id));
    }
}

LingLamGraph random_graph(int num_latents, int children_per_latent, const GenConfig& config) {
    config.validate();
    if (num_latents < 1) throw std::invalid_argument("need at least one latent variable");
    if (children_per_latent < 2)
        throw std::invalid_argument("each latent needs at least two pure children");

    RngStream wiring(config.seed, {stream::kWiring});
    GraphBuilder g(config, num_latents, num_latents * children_per_latent);
    for (int j = 2; j <= num_latents; ++j) {
        std::vector<int> parents;
        for (int i = 1; i < j; ++i)
            if (wiring.uniform01() < config.latent_edge_probability) parents.push_back(i);
        if (parents.empty()) parents.push_back(1 + static_cast<int>(wiring.below(static_cast<std::uint64_t>(j - 1))));
        for (int i : parents) g.latent_edge(i, j);
    }
    for (int l = 1; l <= num_latents; ++l)
        for (int k = 1; k <= children_per_latent; ++k) g.measure(l, (l - 1) * children_per_latent + k);
    return g.build();
}

RngStream noise_stream(std::uint64_t seed, int variable) {
    return RngStream(seed, {stream::kNoise, static_cast<std::uint64_t>(variable)});
}

DataMatrix sample(const LingLamGraph& graph, const GenConfig& config) {
    if (config.sample_size < 1) throw std::invalid_argument("sample size must be >= 1");
    for (const auto& v : graph.variables())
        if (graph.noise(v.index).is_gaussian())
            throw std::invalid_argument("refusing to sample Gaussian noise for " + v.name);

    const int n = config.sample_size;
    const int vars = graph.num_variables();
    Eigen::MatrixXd values(n, vars);
    const auto& b = graph.coefficients();
    for (int v : graph.causal_order()) {
        auto rng = noise_stream(config.seed, v);
        const auto eps = draw_noise(graph.noise(v), n, rng);
        auto col = values.col(v);
        col = Eigen::Map<const Eigen::VectorXd>(eps.data(), n);
        for (int p = 0; p < vars; ++p)
            if (b(v, p) != 0.0) col += b(v, p) * values.col(p);
    }

    const int nl = graph.num_latents();
    Eigen::MatrixXd observed = values.rightCols(graph.num_observed());
    observed.rowwise() -= observed.colwise().mean();
    std::vector<std::string> names;
    for (const auto& x : graph.observed()) names.push_back(x.name);
    (void)nl;
    return DataMatrix(std::move(observed), std::move(names));
}

}  // namespace gin
