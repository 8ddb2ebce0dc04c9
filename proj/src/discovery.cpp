#include "gin/discovery.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace gin {

GinVerdict SampleGinTester::test(std::span<const int> z_cols, std::span<const int> y_cols) {
    const auto r = engine_.gin(z_cols, y_cols);
    return {r.satisfied, r.combined_p, r.degenerate};
}

bool SampleGinTester::dependent(std::span<const int> z_cols, std::span<const int> y_cols) {
    const auto& data = engine_.data();
    if (corr_.size() == 0) {
        const Eigen::MatrixXd c = data.values().rowwise() - data.values().colwise().mean();
        const Eigen::MatrixXd cov = c.transpose() * c;
        const Eigen::VectorXd sd = cov.diagonal().cwiseSqrt();
        corr_ = cov.cwiseQuotient(sd * sd.transpose());
    }
    const double n = data.rows();
    if (n <= 3 || z_cols.empty()) return false;
    const double cut = engine_.config().alpha / static_cast<double>(z_cols.size());
    for (int y : y_cols) {
        bool any = false;
        for (int z : z_cols) {
            const double r = std::clamp(corr_(y, z), -1.0 + 1e-15, 1.0 - 1e-15);
            const double stat = std::abs(std::atanh(r)) * std::sqrt(n - 3.0);
            if (std::erfc(stat / std::sqrt(2.0)) < cut) {
                any = true;
                break;
            }
        }
        if (!any) return false;
    }
    return true;
}

GinVerdict OracleGinTester::test(std::span<const int> z_cols, std::span<const int> y_cols) {
    const auto r = oracle_.exact_gin(z_cols, y_cols, quantifier_);
    return {r.satisfied, r.satisfied ? 1.0 : 0.0, false};
}

bool OracleGinTester::dependent(std::span<const int> z_cols, std::span<const int> y_cols) {
    const Eigen::MatrixXd s = oracle_.observed_covariance();
    const double scale = s.diagonal().maxCoeff();
    for (int y : y_cols) {
        bool any = false;
        for (int z : z_cols) any = any || std::abs(s(y, z)) > 1e-9 * scale;
        if (!any) return false;
    }
    return true;
}

namespace {

class UnionFind {
public:
    explicit UnionFind(int n) : parent_(static_cast<std::size_t>(n)) {
        std::iota(parent_.begin(), parent_.end(), 0);
    }
    int find(int x) {
        while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent_[std::max(a, b)] = std::min(a, b);
    }

private:
    std::vector<int> parent_;
};

// Calls f on every k-subset of items in lexicographic order.
template <typename F>
void for_each_subset(const std::vector<int>& items, int k, F&& f) {
    const int n = static_cast<int>(items.size());
    if (k > n || k <= 0) return;
    std::vector<int> idx(static_cast<std::size_t>(k));
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<int> subset(static_cast<std::size_t>(k));
    while (true) {
        for (int i = 0; i < k; ++i) subset[i] = items[idx[i]];
        f(subset);
        int i = k - 1;
        while (i >= 0 && idx[i] == n - k + i) --i;
        if (i < 0) return;
        ++idx[i];
        for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

void record(std::vector<TraceEntry>* trace, const char* stage, std::span<const int> z,
            std::span<const int> y, const GinVerdict& v) {
    if (trace == nullptr) return;
    trace->push_back({stage, {z.begin(), z.end()}, {y.begin(), y.end()}, v});
}

}  // namespace

HalfSplit half_split(const CausalCluster& cluster) {
    std::vector<int> m = cluster.members;
    std::sort(m.begin(), m.end());
    const int k = cluster.latent_dim;
    const int n = static_cast<int>(m.size());
    HalfSplit h;
    if (n >= 2 * k) {
        h.y_side.assign(m.begin(), m.begin() + k);
        h.z_side.assign(m.begin() + k, m.begin() + 2 * k);
        return h;
    }
    h.short_cluster = true;
    const int ny = std::max(0, std::min(k, n - 1));
    h.y_side.assign(m.begin(), m.begin() + ny);
    h.z_side.assign(m.begin() + ny, m.end());
    return h;
}

ClusterSearchResult find_clusters(GinTester& tester, const DiscoveryOptions& options,
                                  std::vector<TraceEntry>* trace) {
    const int m = tester.num_columns();
    std::vector<int> pool(static_cast<std::size_t>(m));
    std::iota(pool.begin(), pool.end(), 0);
    ClusterSearchResult result;

    for (int len = 1; !pool.empty() && static_cast<int>(pool.size()) > len + 1; ++len) {
        if (options.max_latent_dim > 0 && len > options.max_latent_dim) break;
        std::vector<std::vector<int>> accepted;
        for_each_subset(pool, len + 1, [&](const std::vector<int>& p) {
            std::vector<int> z;
            if (options.context == ClusterContext::Full) {
                for (int c = 0; c < m; ++c)
                    if (!std::binary_search(p.begin(), p.end(), c)) z.push_back(c);
            } else {
                for (int c : pool)
                    if (!std::binary_search(p.begin(), p.end(), c)) z.push_back(c);
            }
            if (z.empty()) return;
            const auto v = tester.test(z, p);
            record(trace, "cluster", z, p, v);
            if (v.satisfied && tester.dependent(z, p)) accepted.push_back(p);
        });
        if (accepted.empty()) continue;

        // Overlapping accepted subsets share their latent parents.
        UnionFind uf(m);
        std::vector<char> hit(static_cast<std::size_t>(m), 0);
        for (const auto& p : accepted) {
            for (int c : p) hit[c] = 1;
            for (std::size_t i = 1; i < p.size(); ++i) uf.unite(p[0], p[i]);
        }
        std::map<int, std::vector<int>> groups;
        for (int c : pool)
            if (hit[c]) groups[uf.find(c)].push_back(c);
        for (auto& [root, members] : groups) result.clusters.push_back({members, len});
        std::erase_if(pool, [&](int c) { return hit[c] != 0; });
    }
    result.unclustered = pool;
    std::sort(result.clusters.begin(), result.clusters.end(),
              [](const CausalCluster& a, const CausalCluster& b) { return a.members.front() < b.members.front(); });
    return result;
}

ClusterSearchResult find_clusters(const DataMatrix& data, const TestConfig& config,
                                  const DiscoveryOptions& options) {
    SampleGinTester tester(data, config);
    return find_clusters(tester, options);
}

RootChoice find_root(GinTester& tester, const std::vector<CausalCluster>& clusters,
                     std::span<const int> candidates, const RootSearchState& state,
                     std::vector<TraceEntry>* trace) {
    if (candidates.empty()) throw std::invalid_argument("no candidate clusters");
    for (int c : candidates)
        if (c < 0 || c >= static_cast<int>(clusters.size()))
            throw std::invalid_argument("candidate cluster index out of range");
    if (candidates.size() == 1) return {candidates.front(), 1.0, false};

    RootChoice best;
    bool best_passes = false;
    for (int r : candidates) {
        const auto split = half_split(clusters[r]);
        std::vector<int> z = split.z_side;
        z.insert(z.end(), state.z_half.begin(), state.z_half.end());
        bool passes = !z.empty();
        double min_p = z.empty() ? 0.0 : 1.0;
        for (int k : candidates) {
            if (k == r || z.empty()) continue;
            std::vector<int> y = split.y_side;
            const auto& other = clusters[k].members;
            const auto take = std::min<std::size_t>(static_cast<std::size_t>(clusters[k].latent_dim), other.size());
            std::vector<int> sorted = other;
            std::sort(sorted.begin(), sorted.end());
            y.insert(y.end(), sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(take));
            y.insert(y.end(), state.y_half.begin(), state.y_half.end());
            const auto v = tester.test(z, y);
            record(trace, "order", z, y, v);
            passes = passes && v.satisfied;
            min_p = std::min(min_p, v.p_value);
        }
        const bool better = best.cluster < 0 || (passes && !best_passes) ||
                            (passes == best_passes && min_p > best.min_p);
        if (better) {
            best = {r, min_p, false};
            best_passes = passes;
        }
    }
    best.low_confidence = !best_passes;
    return best;
}

CausalOrder learn_order(GinTester& tester, const std::vector<CausalCluster>& clusters,
                        std::vector<TraceEntry>* trace, std::vector<std::string>* warnings) {
    CausalOrder order;
    RootSearchState state;
    std::vector<int> candidates(clusters.size());
    std::iota(candidates.begin(), candidates.end(), 0);
    for (const auto& c : clusters)
        if (half_split(c).short_cluster && warnings != nullptr)
            warnings->push_back("cluster starting at column " + std::to_string(c.members.front()) +
                                " has fewer than 2k members; half split is incomplete");
    while (!candidates.empty()) {
        const auto root = find_root(tester, clusters, candidates, state, trace);
        if (root.low_confidence && warnings != nullptr)
            warnings->push_back("no candidate passed the root test at position " +
                                std::to_string(order.sequence.size()) + "; chose best min p");
        order.sequence.push_back(root.cluster);
        state.resolved.push_back(root.cluster);
        const auto split = half_split(clusters[root.cluster]);
        state.z_half.insert(state.z_half.end(), split.z_side.begin(), split.z_side.end());
        state.y_half.insert(state.y_half.end(), split.y_side.begin(), split.y_side.end());
        std::erase(candidates, root.cluster);
    }
    return order;
}

DiscoveryResult discover(GinTester& tester, const DiscoveryOptions& options) {
    DiscoveryResult r;
    auto* trace = options.record_trace ? &r.trace : nullptr;
    auto found = find_clusters(tester, options, trace);
    r.clusters = std::move(found.clusters);
    r.unclustered = std::move(found.unclustered);
    if (!r.clusters.empty()) {
        const auto before = r.warnings.size();
        r.order = learn_order(tester, r.clusters, trace, &r.warnings);
        r.low_confidence = r.warnings.size() > before;
    }
    return r;
}

DiscoveryResult discover(const DataMatrix& data, const TestConfig& config,
                         const DiscoveryOptions& options) {
    SampleGinTester tester(data, config);
    return discover(tester, options);
}

}  // namespace gin
