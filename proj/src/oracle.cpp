#include "gin/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <set>
#include <stdexcept>
#include <string>

namespace gin {

namespace {

constexpr double kSupportTol = 1e-9;
constexpr double kRankTol = 1e-8;

int numerical_rank(const Eigen::MatrixXd& m, double rel_tol) {
    if (m.size() == 0) return 0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || !(s(0) > 0.0)) return 0;
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > rel_tol * s(0)) ++r;
    return r;
}

Eigen::MatrixXd block(const Eigen::MatrixXd& m, std::span<const int> rows, std::span<const int> cols) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(rows[i], cols[j]);
    return out;
}

}  // namespace

Eigen::MatrixXd mixing_matrix(const LingLamGraph& graph) {
    const int n = graph.num_variables();
    const auto& b = graph.coefficients();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int v : graph.causal_order()) {
        m(v, v) = 1.0;
        for (int p = 0; p < n; ++p)
            if (b(v, p) != 0.0) m.row(v) += b(v, p) * m.row(p);
    }
    return m;
}

Eigen::MatrixXd population_covariance(const LingLamGraph& graph) {
    const Eigen::MatrixXd m = mixing_matrix(graph);
    Eigen::VectorXd omega(graph.num_variables());
    for (int v = 0; v < graph.num_variables(); ++v) omega(v) = graph.noise(v).variance();
    Eigen::MatrixXd sigma = m * omega.asDiagonal() * m.transpose();
    return 0.5 * (sigma + sigma.transpose());
}

bool d_separated(const LingLamGraph& graph, std::span<const int> a, std::span<const int> b,
                 std::span<const int> given) {
    const int n = graph.num_variables();
    std::vector<char> observed(n, 0), anc_of_given(n, 0), target(n, 0);
    for (int z : given) observed[graph.variable(z).index] = 1;
    for (int t : b) target[graph.variable(t).index] = 1;
    // Ancestors of the conditioning set, itself included.
    for (int v = 0; v < n; ++v)
        for (int z : given)
            if (v == z || graph.is_ancestor(v, z)) anc_of_given[v] = 1;

    // Reachability over (node, arrived-from-child?) states.
    std::vector<char> seen_up(n, 0), seen_down(n, 0);
    std::deque<std::pair<int, bool>> queue;
    for (int s : a) queue.emplace_back(graph.variable(s).index, true);
    while (!queue.empty()) {
        const auto [v, from_child] = queue.front();
        queue.pop_front();
        auto& seen = from_child ? seen_up : seen_down;
        if (seen[v]) continue;
        seen[v] = 1;
        if (!observed[v] && target[v]) return false;
        if (from_child) {
            if (observed[v]) continue;
            for (int p : graph.parents(v)) queue.emplace_back(p, true);
            for (int c : graph.children(v)) queue.emplace_back(c, false);
        } else {
            if (!observed[v])
                for (int c : graph.children(v)) queue.emplace_back(c, false);
            if (anc_of_given[v])
                for (int p : graph.parents(v)) queue.emplace_back(p, true);
        }
    }
    return true;
}

bool is_exogenous_set(const LingLamGraph& graph, std::span<const int> s1, std::span<const int> s2) {
    const int n = graph.num_variables();
    std::vector<char> in_s1(n, 0);
    for (int s : s1) in_s1[graph.variable(s).index] = 1;

    // Nodes reaching `target` along directed paths whose intermediate nodes
    // avoid `blocked`.
    auto reaching = [&](int target, const std::vector<char>& blocked) {
        std::vector<char> out(n, 0);
        std::vector<int> stack{target};
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            for (int p : graph.parents(v)) {
                if (out[p]) continue;
                out[p] = 1;
                if (!blocked[p]) stack.push_back(p);
            }
        }
        return out;
    };

    for (int v : s2) {
        graph.variable(v);
        if (in_s1[v]) continue;
        for (int s : s1)
            if (graph.is_ancestor(v, s)) return false;
        const auto to_v = reaching(v, in_s1);
        auto blocked = in_s1;
        blocked[v] = 1;
        for (int s : s1) {
            const auto to_s = reaching(s, blocked);
            for (int c = 0; c < n; ++c)
                if (c != v && !in_s1[c] && to_v[c] && to_s[c]) return false;
        }
    }
    return true;
}

PopulationOracle::PopulationOracle(LingLamGraph graph)
    : graph_(std::move(graph)), mixing_(mixing_matrix(graph_)), sigma_(population_covariance(graph_)) {}

Eigen::MatrixXd PopulationOracle::observed_covariance() const {
    const int nl = graph_.num_latents();
    const int m = graph_.num_observed();
    return sigma_.block(nl, nl, m, m);
}

std::vector<int> PopulationOracle::to_global(std::span<const int> cols) const {
    std::vector<int> out;
    for (int c : cols) {
        if (c < 0 || c >= graph_.num_observed())
            throw std::invalid_argument("observed column " + std::to_string(c) + " out of range");
        out.push_back(graph_.observed_at_column(c));
    }
    return out;
}

std::vector<int> PopulationOracle::support(const Eigen::RowVectorXd& row) const {
    std::vector<int> out;
    for (Eigen::Index i = 0; i < row.size(); ++i)
        if (std::abs(row(i)) > kSupportTol) out.push_back(static_cast<int>(i));
    return out;
}

ExactGinResult PopulationOracle::exact_gin(std::span<const int> z_cols, std::span<const int> y_cols,
                                           NullQuantifier quantifier) const {
    if (z_cols.empty() || y_cols.empty()) throw std::invalid_argument("empty Y or Z");
    const auto y = to_global(y_cols);
    const auto z = to_global(z_cols);
    const Eigen::MatrixXd cross = block(sigma_, y, z);
    const auto ny = static_cast<Eigen::Index>(y.size());

    ExactGinResult r;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(cross, Eigen::ComputeFullU);
    const auto& s = svd.singularValues();
    double scale = 0.0;
    for (int v : y) scale = std::max(scale, sigma_(v, v));
    for (int v : z) scale = std::max(scale, sigma_(v, v));
    const double smax = s.size() > 0 ? s(0) : 0.0;
    Eigen::MatrixXd basis;
    if (!(smax > 1e-12 * scale)) {
        basis = Eigen::MatrixXd::Identity(ny, ny);
    } else {
        std::vector<Eigen::Index> null_cols;
        for (Eigen::Index i = 0; i < ny; ++i) {
            const double si = i < s.size() ? s(i) / smax : 0.0;
            if (si >= 1e-9 && si <= 1e-6) r.ambiguous = true;
            if (si <= kRankTol) null_cols.push_back(i);
        }
        basis.resize(ny, static_cast<Eigen::Index>(null_cols.size()));
        for (std::size_t k = 0; k < null_cols.size(); ++k)
            basis.col(static_cast<Eigen::Index>(k)) = svd.matrixU().col(null_cols[k]);
    }
    r.null_dim = static_cast<int>(basis.cols());
    if (r.null_dim == 0) return r;

    Eigen::MatrixXd my(ny, mixing_.cols());
    for (Eigen::Index i = 0; i < ny; ++i) my.row(i) = mixing_.row(y[static_cast<std::size_t>(i)]);
    std::set<int> z_support;
    for (int v : z)
        for (int k : support(mixing_.row(v))) z_support.insert(k);

    if (quantifier == NullQuantifier::ForAll) {
        std::set<int> shared;
        for (Eigen::Index k = 0; k < basis.cols(); ++k) {
            const Eigen::RowVectorXd coef = basis.col(k).transpose() * my;
            for (int e : support(coef))
                if (z_support.count(e)) shared.insert(e);
        }
        r.shared_noise.assign(shared.begin(), shared.end());
        r.satisfied = shared.empty();
        return r;
    }

    // Some c != 0 with (basis c)^T M_Y vanishing on the Z support.
    const std::vector<int> zs(z_support.begin(), z_support.end());
    Eigen::MatrixXd restricted(basis.cols(), static_cast<Eigen::Index>(zs.size()));
    const Eigen::MatrixXd proj = basis.transpose() * my;
    for (std::size_t j = 0; j < zs.size(); ++j)
        restricted.col(static_cast<Eigen::Index>(j)) = proj.col(zs[j]);
    int rank = 0;
    if (restricted.size() > 0) {
        Eigen::JacobiSVD<Eigen::MatrixXd> rs(restricted);
        for (Eigen::Index i = 0; i < rs.singularValues().size(); ++i)
            if (rs.singularValues()(i) > kSupportTol * std::max(1.0, rs.singularValues()(0))) ++rank;
    }
    r.satisfied = rank < basis.cols();
    if (!r.satisfied) {
        std::set<int> shared;
        for (Eigen::Index k = 0; k < basis.cols(); ++k)
            for (int e : support(proj.row(k)))
                if (z_support.count(e)) shared.insert(e);
        r.shared_noise.assign(shared.begin(), shared.end());
    }
    return r;
}

ExactInResult PopulationOracle::exact_in(std::span<const int> z_cols, int y_col) const {
    if (z_cols.empty()) throw std::invalid_argument("empty Z");
    const int ycol[] = {y_col};
    const auto z = to_global(z_cols);
    const int y = to_global(ycol).front();
    const Eigen::MatrixXd szz = block(sigma_, z, z);
    const Eigen::VectorXd szy = block(sigma_, z, std::vector<int>{y}).col(0);
    const Eigen::VectorXd beta = szz.ldlt().solve(szy);
    Eigen::RowVectorXd residual = mixing_.row(y);
    for (std::size_t j = 0; j < z.size(); ++j)
        residual -= beta(static_cast<Eigen::Index>(j)) * mixing_.row(z[j]);
    std::set<int> z_support;
    for (int v : z)
        for (int k : support(mixing_.row(v))) z_support.insert(k);
    ExactInResult r;
    for (int e : support(residual))
        if (z_support.count(e)) r.shared_noise.push_back(e);
    r.satisfied = r.shared_noise.empty();
    return r;
}

GraphicalGinResult PopulationOracle::graphical_gin(std::span<const int> z_cols,
                                                   std::span<const int> y_cols) const {
    const int nl = graph_.num_latents();
    if (nl > 16) throw std::invalid_argument("too many latents for exhaustive enumeration");
    const auto y = to_global(y_cols);
    const auto z = to_global(z_cols);
    std::set<int> ly;
    for (int v : y)
        for (int p : graph_.latent_parents(v)) ly.insert(p);
    const std::vector<int> ly_vec(ly.begin(), ly.end());
    const int kmax = std::min(static_cast<int>(y.size()) - 1, static_cast<int>(z.size()));

    GraphicalGinResult r;
    for (int k = 0; k <= kmax; ++k) {
        for (unsigned mask = 0; mask < (1u << nl); ++mask) {
            if (std::popcount(mask) != k) continue;
            std::vector<int> s;
            for (int l = 0; l < nl; ++l)
                if (mask & (1u << l)) s.push_back(l);
            if (!is_exogenous_set(graph_, s, ly_vec)) continue;
            if (!d_separated(graph_, y, z, s)) continue;
            if (k > 0 && (numerical_rank(block(sigma_, s, z), kRankTol) != k ||
                          numerical_rank(block(sigma_, s, y), kRankTol) != k))
                continue;
            r.satisfied = true;
            r.witness = s;
            return r;
        }
    }
    return r;
}

}  // namespace gin
