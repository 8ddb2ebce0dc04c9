#include "gin/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <mutex>
#include <set>
#include <stdexcept>
#include <thread>

#include "gin/rng.hpp"

namespace gin {

std::vector<TrueLatentSet> true_latent_sets(const LingLamGraph& graph) {
    std::vector<TrueLatentSet> out;
    for (auto& c : true_clusters(graph)) out.push_back({cluster_latents(graph, c), std::move(c)});
    return out;
}

bool latent_set_precedes(const LingLamGraph& graph, const TrueLatentSet& p, const TrueLatentSet& q) {
    for (int a : p.latents) {
        if (std::find(q.latents.begin(), q.latents.end(), a) != q.latents.end()) continue;
        for (int b : q.latents) {
            if (std::find(p.latents.begin(), p.latents.end(), b) != p.latents.end()) continue;
            if (graph.is_ancestor(a, b)) return true;
        }
    }
    return false;
}

namespace {

double jaccard(const std::vector<int>& a, const std::vector<int>& b) {
    const std::set<int> sa(a.begin(), a.end()), sb(b.begin(), b.end());
    int inter = 0;
    for (int x : sa) inter += static_cast<int>(sb.count(x));
    const int uni = static_cast<int>(sa.size() + sb.size()) - inter;
    return uni == 0 ? 0.0 : static_cast<double>(inter) / uni;
}

ClusterMatching match_against(const std::vector<CausalCluster>& estimated,
                              const std::vector<TrueLatentSet>& truth) {
    ClusterMatching m;
    std::vector<int> best_dim(truth.size(), 0), dim_sum(truth.size(), 0);
    for (const auto& e : estimated) {
        int best = -1;
        double best_j = 0.0;
        for (std::size_t t = 0; t < truth.size(); ++t) {
            const double j = jaccard(e.members, truth[t].cluster.members);
            if (j > best_j) {
                best_j = j;
                best = static_cast<int>(t);
            }
        }
        m.truth_of.push_back(best);
        m.jaccard.push_back(best_j);
        if (best < 0) {
            m.surplus_latents += e.latent_dim;
            continue;
        }
        best_dim[best] = std::max(best_dim[best], e.latent_dim);
        dim_sum[best] += e.latent_dim;
    }
    for (std::size_t t = 0; t < truth.size(); ++t) {
        if (dim_sum[t] == 0) m.unmatched_truth.push_back(static_cast<int>(t));
        const int covered = std::min(truth[t].cluster.latent_dim, best_dim[t]);
        m.surplus_latents += dim_sum[t] - covered;
    }
    return m;
}

}  // namespace

ClusterMatching match_clusters(const std::vector<CausalCluster>& estimated, const LingLamGraph& truth) {
    return match_against(estimated, true_latent_sets(truth));
}

MetricReport score(const DiscoveryResult& estimated, const LingLamGraph& truth) {
    const auto sets = true_latent_sets(truth);
    const auto m = match_against(estimated.clusters, sets);
    MetricReport r;
    auto& c = r.counts;
    c.total_observed = truth.num_observed();
    std::vector<int> best_dim(sets.size(), 0);
    for (std::size_t e = 0; e < estimated.clusters.size(); ++e)
        if (m.truth_of[e] >= 0)
            best_dim[m.truth_of[e]] = std::max(best_dim[m.truth_of[e]], estimated.clusters[e].latent_dim);
    for (std::size_t t = 0; t < sets.size(); ++t) {
        const int d = sets[t].cluster.latent_dim;
        c.total_latents += d;
        c.omitted += d - std::min(d, best_dim[t]);
    }
    c.false_latents = m.surplus_latents;

    for (std::size_t e = 0; e < estimated.clusters.size(); ++e) {
        const int t = m.truth_of[e];
        for (int col : estimated.clusters[e].members) {
            const auto parents = truth.latent_parents(truth.observed_at_column(col));
            if (t < 0 || parents != sets[t].latents) ++c.mismeasured;
        }
    }
    if (c.total_latents > 0) {
        r.latent_omission = static_cast<double>(c.omitted) / c.total_latents;
        r.latent_commission = std::min(1.0, static_cast<double>(c.false_latents) / c.total_latents);
    }
    if (c.total_observed > 0) r.mismeasurement = static_cast<double>(c.mismeasured) / c.total_observed;

    // Ordering: every true set recovered and no pair placed against the
    // true partial order.
    bool ok = m.unmatched_truth.empty() &&
              estimated.order.sequence.size() == estimated.clusters.size();
    std::vector<int> mapped;
    for (int idx : estimated.order.sequence) {
        if (idx < 0 || idx >= static_cast<int>(m.truth_of.size())) {
            ok = false;
            break;
        }
        if (m.truth_of[idx] >= 0) mapped.push_back(m.truth_of[idx]);
    }
    for (std::size_t i = 0; ok && i < mapped.size(); ++i)
        for (std::size_t j = i + 1; ok && j < mapped.size(); ++j) {
            const auto& a = sets[mapped[i]];
            const auto& b = sets[mapped[j]];
            if (mapped[i] != mapped[j] && latent_set_precedes(truth, b, a) &&
                !latent_set_precedes(truth, a, b))
                ok = false;
        }
    r.correct_ordering = ok;
    return r;
}

std::uint64_t repetition_seed(std::uint64_t master, int structure_id, int sample_size, int repetition) {
    return derive_seed(master, {stream::kRepetition, static_cast<std::uint64_t>(structure_id),
                                static_cast<std::uint64_t>(sample_size),
                                static_cast<std::uint64_t>(repetition)});
}

namespace {

struct Job {
    int row = 0;
    int structure_id = 0;
    int latents = 0;  // random structures only
    int n = 0;
    int rep = 0;
};

}  // namespace

std::vector<BenchmarkRow> benchmark(const BenchmarkSpec& spec) {
    if (spec.repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
    if (spec.sample_sizes.empty()) throw std::invalid_argument("no sample sizes given");
    spec.test.validate();

    std::vector<BenchmarkRow> rows;
    std::vector<Job> jobs;
    auto add_structure = [&](const std::string& name, int id, int latents) {
        for (int n : spec.sample_sizes) {
            const int row = static_cast<int>(rows.size());
            rows.push_back({name, n, spec.repetitions});
            for (int r = 0; r < spec.repetitions; ++r) jobs.push_back({row, id, latents, n, r});
        }
    };
    for (int c : spec.case_ids) {
        if (c < 1 || c > 4) throw std::invalid_argument("case id must be 1..4");
        add_structure("case" + std::to_string(c), c, 0);
    }
    for (int l : spec.random_latents)
        add_structure("random(" + std::to_string(l) + "," + std::to_string(spec.random_children) + ")",
                      100 + l, l);

    std::vector<MetricReport> reports(jobs.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            try {
                const auto& job = jobs[i];
                GenConfig gen = spec.gen;
                gen.seed = repetition_seed(spec.seed, job.structure_id, job.n, job.rep);
                gen.sample_size = job.n;
                const auto graph = job.latents > 0 ? random_graph(job.latents, spec.random_children, gen)
                                                   : case_graph(job.structure_id, gen);
                const auto data = sample(graph, gen);
                DiscoveryOptions options = spec.options;
                options.record_trace = false;
                reports[i] = score(discover(data, spec.test, options), graph);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const int threads = std::max(1, std::min<int>(spec.threads, static_cast<int>(jobs.size())));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    // Fold in job order so the sums do not depend on scheduling.
    std::vector<int> ordered(rows.size(), 0);
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        auto& row = rows[jobs[i].row];
        const auto& r = reports[i];
        row.latent_omission += r.latent_omission;
        row.latent_commission += r.latent_commission;
        row.mismeasurement += r.mismeasurement;
        row.omission_failures += r.latent_omission > 0.0;
        row.commission_failures += r.latent_commission > 0.0;
        row.mismeasurement_failures += r.mismeasurement > 0.0;
        ordered[jobs[i].row] += r.correct_ordering;
    }
    for (std::size_t k = 0; k < rows.size(); ++k) {
        auto& row = rows[k];
        const double reps = row.repetitions;
        row.latent_omission /= reps;
        row.latent_commission /= reps;
        row.mismeasurement /= reps;
        row.ordering_rate = ordered[k] / reps;
    }
    return rows;
}

}  // namespace gin
