#include "gin/graph_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace gin {

namespace {

std::vector<VariableRef> make_variables(std::vector<std::string> latent_names,
                                        std::vector<std::string> observed_names) {
    std::vector<VariableRef> vars;
    vars.reserve(latent_names.size() + observed_names.size());
    std::set<std::string> seen;
    auto add = [&](std::string name, VariableKind kind) {
        if (name.empty()) throw std::invalid_argument("variable names must be non-empty");
        if (!seen.insert(name).second)
            throw std::invalid_argument("duplicate variable name '" + name + "'");
        vars.push_back({static_cast<int>(vars.size()), std::move(name), kind});
    };
    for (auto& n : latent_names) add(std::move(n), VariableKind::Latent);
    for (auto& n : observed_names) add(std::move(n), VariableKind::Observed);
    return vars;
}

}  // namespace

LingLamGraph::LingLamGraph(std::vector<std::string> latent_names,
                           std::vector<std::string> observed_names,
                           const std::vector<EdgeSpec>& edges, std::vector<NoiseSpec> noise)
    : num_latents_(static_cast<int>(latent_names.size())),
      variables_(make_variables(std::move(latent_names), std::move(observed_names))),
      noise_(std::move(noise)) {
    const int n = num_variables();
    coefficients_ = Eigen::MatrixXd::Zero(n, n);
    for (const auto& e : edges) {
        const int from = find(e.from).index;
        const int to = find(e.to).index;
        if (coefficients_(to, from) != 0.0)
            throw std::invalid_argument("duplicate edge " + e.from + " -> " + e.to);
        coefficients_(to, from) = e.coef;
    }
    finish_construction();
}

LingLamGraph::LingLamGraph(std::vector<std::string> latent_names,
                           std::vector<std::string> observed_names, Eigen::MatrixXd coefficients,
                           std::vector<NoiseSpec> noise)
    : num_latents_(static_cast<int>(latent_names.size())),
      variables_(make_variables(std::move(latent_names), std::move(observed_names))),
      coefficients_(std::move(coefficients)),
      noise_(std::move(noise)) {
    finish_construction();
}

void LingLamGraph::finish_construction() {
    const int n = num_variables();
    if (coefficients_.rows() != n || coefficients_.cols() != n)
        throw std::invalid_argument("coefficient matrix must be " + std::to_string(n) + "x" +
                                    std::to_string(n));
    if (static_cast<int>(noise_.size()) != n)
        throw std::invalid_argument("need one noise spec per variable");
    if (!coefficients_.allFinite()) throw std::invalid_argument("coefficients must be finite");
    for (int i = 0; i < n; ++i)
        if (coefficients_(i, i) != 0.0)
            throw std::invalid_argument("self loop on " + variables_[i].name);

    // Kahn's algorithm, smallest index first.
    std::vector<int> indegree(n, 0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (coefficients_(i, j) != 0.0) ++indegree[i];
    std::set<int> ready;
    for (int i = 0; i < n; ++i)
        if (indegree[i] == 0) ready.insert(i);
    causal_order_.clear();
    while (!ready.empty()) {
        const int v = *ready.begin();
        ready.erase(ready.begin());
        causal_order_.push_back(v);
        for (int c = 0; c < n; ++c)
            if (coefficients_(c, v) != 0.0 && --indegree[c] == 0) ready.insert(c);
    }
    if (static_cast<int>(causal_order_.size()) != n)
        throw std::invalid_argument("graph contains a directed cycle");

    ancestor_.assign(n, std::vector<bool>(n, false));
    for (int v : causal_order_) {
        for (int p = 0; p < n; ++p) {
            if (coefficients_(v, p) == 0.0) continue;
            ancestor_[p][v] = true;
            for (int a = 0; a < n; ++a)
                if (ancestor_[a][p]) ancestor_[a][v] = true;
        }
    }
}

std::span<const VariableRef> LingLamGraph::latents() const {
    return std::span<const VariableRef>(variables_).subspan(0, num_latents_);
}

std::span<const VariableRef> LingLamGraph::observed() const {
    return std::span<const VariableRef>(variables_).subspan(num_latents_);
}

const VariableRef& LingLamGraph::variable(int index) const {
    if (index < 0 || index >= num_variables())
        throw std::invalid_argument("variable index " + std::to_string(index) + " out of range");
    return variables_[static_cast<std::size_t>(index)];
}

const VariableRef& LingLamGraph::find(std::string_view name) const {
    for (const auto& v : variables_)
        if (v.name == name) return v;
    throw std::invalid_argument("unknown variable '" + std::string(name) + "'");
}

bool LingLamGraph::contains(std::string_view name) const {
    return std::any_of(variables_.begin(), variables_.end(),
                       [&](const VariableRef& v) { return v.name == name; });
}

std::vector<int> LingLamGraph::parents(int index) const {
    variable(index);
    std::vector<int> out;
    for (int j = 0; j < num_variables(); ++j)
        if (coefficients_(index, j) != 0.0) out.push_back(j);
    return out;
}

std::vector<int> LingLamGraph::children(int index) const {
    variable(index);
    std::vector<int> out;
    for (int i = 0; i < num_variables(); ++i)
        if (coefficients_(i, index) != 0.0) out.push_back(i);
    return out;
}

std::vector<int> LingLamGraph::latent_parents(int index) const {
    std::vector<int> out = parents(index);
    std::erase_if(out, [this](int p) { return p >= num_latents_; });
    return out;
}

bool LingLamGraph::is_ancestor(int ancestor, int descendant) const {
    variable(ancestor);
    variable(descendant);
    return ancestor_[static_cast<std::size_t>(ancestor)][static_cast<std::size_t>(descendant)];
}

int LingLamGraph::column_of(int observed_index) const {
    if (variable(observed_index).is_latent())
        throw std::invalid_argument(variables_[observed_index].name + " is not observed");
    return observed_index - num_latents_;
}

std::vector<EdgeSpec> LingLamGraph::edges() const {
    std::vector<EdgeSpec> out;
    for (int j = 0; j < num_variables(); ++j)
        for (int i = 0; i < num_variables(); ++i)
            if (coefficients_(i, j) != 0.0)
                out.push_back({variables_[j].name, variables_[i].name, coefficients_(i, j)});
    return out;
}

LingLamGraph LingLamGraph::with_edge(std::string_view from, std::string_view to,
                                     double coef) const {
    Eigen::MatrixXd b = coefficients_;
    b(find(to).index, find(from).index) = coef;
    std::vector<std::string> lat, obs;
    for (const auto& v : variables_) (v.is_latent() ? lat : obs).push_back(v.name);
    return LingLamGraph(std::move(lat), std::move(obs), std::move(b), noise_);
}

LingLamGraph LingLamGraph::without_variable(std::string_view name) const {
    const int drop = find(name).index;
    std::vector<std::string> lat, obs;
    std::vector<int> keep;
    std::vector<NoiseSpec> noise;
    for (const auto& v : variables_) {
        if (v.index == drop) continue;
        (v.is_latent() ? lat : obs).push_back(v.name);
        keep.push_back(v.index);
        noise.push_back(noise_[v.index]);
    }
    const auto k = static_cast<Eigen::Index>(keep.size());
    Eigen::MatrixXd b(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j) b(i, j) = coefficients_(keep[i], keep[j]);
    return LingLamGraph(std::move(lat), std::move(obs), std::move(b), std::move(noise));
}

std::string assumption_name(Assumption a) {
    switch (a) {
        case Assumption::A1Measurement: return "A1";
        case Assumption::A2NonGaussian: return "A2";
        case Assumption::A3DoublePure: return "A3";
        case Assumption::A4Purity: return "A4";
    }
    return "?";
}

std::vector<Violation> validate_model(const LingLamGraph& graph) {
    std::vector<Violation> out;
    const int n = graph.num_variables();
    const int nl = graph.num_latents();
    const auto& b = graph.coefficients();
    const auto& vars = graph.variables();

    // A1: latent-row / observed-column block is zero.
    for (int i = 0; i < nl; ++i)
        for (int j = nl; j < n; ++j)
            if (b(i, j) != 0.0)
                out.push_back({Assumption::A1Measurement,
                               {vars[j].name, vars[i].name},
                               "observed " + vars[j].name + " is a parent of latent " +
                                   vars[i].name});

    for (int v = 0; v < n; ++v)
        if (graph.noise(v).is_gaussian())
            out.push_back({Assumption::A2NonGaussian,
                           {vars[v].name},
                           "noise of " + vars[v].name + " is Gaussian"});

    // A4: no observed -> observed edges.
    std::vector<bool> impure(static_cast<std::size_t>(n), false);
    for (int i = nl; i < n; ++i)
        for (int j = nl; j < n; ++j)
            if (b(i, j) != 0.0) {
                impure[i] = impure[j] = true;
                out.push_back({Assumption::A4Purity,
                               {vars[j].name, vars[i].name},
                               "edge between observed " + vars[j].name + " and " + vars[i].name});
            }

    // A3: latents grouped by identical observed-child sets.
    std::map<std::vector<int>, std::vector<int>> groups;
    for (int l = 0; l < nl; ++l) {
        std::vector<int> kids;
        for (int i = nl; i < n; ++i)
            if (b(i, l) != 0.0) kids.push_back(i);
        groups[kids].push_back(l);
    }
    for (const auto& [kids, group] : groups) {
        const auto pure = std::count_if(kids.begin(), kids.end(),
                                        [&](int c) { return !impure[c]; });
        const auto needed = 2 * static_cast<long>(group.size());
        if (pure < needed) {
            Violation v{Assumption::A3DoublePure, {}, {}};
            for (int l : group) v.variables.push_back(vars[l].name);
            v.message = "latent set of dimension " + std::to_string(group.size()) + " has " +
                        std::to_string(pure) + " pure children, needs " + std::to_string(needed);
            out.push_back(std::move(v));
        }
    }
    return out;
}

std::vector<int> children_of(const LingLamGraph& graph, std::span<const int> latent_set) {
    for (int l : latent_set)
        if (!graph.variable(l).is_latent())
            throw std::invalid_argument(graph.variable(l).name + " is not a latent variable");
    std::vector<int> out;
    for (const auto& x : graph.observed()) {
        const bool hit = std::any_of(latent_set.begin(), latent_set.end(), [&](int l) {
            return graph.coefficients()(x.index, l) != 0.0;
        });
        if (hit) out.push_back(x.index);
    }
    return out;
}

std::vector<CausalCluster> true_clusters(const LingLamGraph& graph) {
    const auto violations = validate_model(graph);
    if (!violations.empty())
        throw std::invalid_argument("model violates " + assumption_name(violations.front().assumption) +
                                    ": " + violations.front().message);
    std::map<std::vector<int>, CausalCluster> by_parents;
    for (const auto& x : graph.observed()) {
        auto parents = graph.latent_parents(x.index);
        if (parents.empty()) continue;
        auto& c = by_parents[parents];
        c.latent_dim = static_cast<int>(parents.size());
        c.members.push_back(graph.column_of(x.index));
    }
    std::vector<CausalCluster> out;
    for (auto& [parents, c] : by_parents) out.push_back(std::move(c));
    std::sort(out.begin(), out.end(), [](const CausalCluster& a, const CausalCluster& b) {
        return a.members.front() < b.members.front();
    });
    return out;
}

std::vector<int> cluster_latents(const LingLamGraph& graph, const CausalCluster& cluster) {
    if (cluster.members.empty()) return {};
    return graph.latent_parents(graph.observed_at_column(cluster.members.front()));
}

}  // namespace gin
