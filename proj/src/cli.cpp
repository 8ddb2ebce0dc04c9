#include "gin/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "gin/csv_io.hpp"
#include "gin/discovery.hpp"
#include "gin/error.hpp"
#include "gin/evaluation.hpp"
#include "gin/gin_test.hpp"
#include "gin/graph_io.hpp"
#include "gin/oracle.hpp"
#include "gin/synth.hpp"
#include "gin/version.hpp"

namespace gin {

using nlohmann::json;

namespace {

struct TestOptions {
    double alpha = 0.05;
    std::string kernel = "median";
    std::string pvalue = "gamma";
    int permutations = 500;
    bool joint = false;
    std::string context = "full";
};

void add_test_options(CLI::App* cmd, TestOptions& o) {
    cmd->add_option("--alpha", o.alpha, "Significance level")->capture_default_str();
    cmd->add_option("--kernel", o.kernel, "Kernel width: 'median' or a positive number")
        ->capture_default_str();
    cmd->add_option("--pvalue", o.pvalue, "HSIC p-value: gamma or permutation")
        ->check(CLI::IsMember({"gamma", "permutation"}))
        ->capture_default_str();
    cmd->add_option("--permutations", o.permutations, "Permutations for --pvalue permutation")
        ->capture_default_str();
    cmd->add_flag("--joint-hsic", o.joint, "Test the surrogate against all of Z jointly");
}

TestConfig make_test_config(const TestOptions& o, std::uint64_t seed) {
    TestConfig c;
    c.alpha = o.alpha;
    if (o.kernel != "median") {
        double w = 0.0;
        std::size_t used = 0;
        try {
            w = std::stod(o.kernel, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != o.kernel.size()) throw std::invalid_argument("--kernel must be 'median' or a number");
        c.kernel_width = KernelWidth::fixed(w);
    }
    c.pvalue_method = o.pvalue == "permutation" ? PValueMethod::Permutation : PValueMethod::Gamma;
    c.permutations = o.permutations;
    c.permutation_seed = seed;
    c.joint_hsic = o.joint;
    c.validate();
    return c;
}

json test_config_json(const TestConfig& c) {
    json k = c.kernel_width.mode == KernelWidth::Mode::Median ? json("median") : json(c.kernel_width.value);
    return {{"alpha", c.alpha},
            {"kernel_width", k},
            {"pvalue_method", c.pvalue_method == PValueMethod::Gamma ? "gamma" : "permutation"},
            {"permutations", c.permutations},
            {"permutation_seed", c.permutation_seed},
            {"svd_tolerance", c.svd_tolerance},
            {"joint_hsic", c.joint_hsic},
            {"p_value_correction", "none"}};
}

json gen_config_json(const GenConfig& g) {
    return {{"coef_low", g.coef_low},
            {"coef_high", g.coef_high},
            {"random_sign", g.random_sign},
            {"seed", g.seed},
            {"sample_size", g.sample_size},
            {"noise", g.noise.family_name()},
            {"noise_parameter", g.noise.parameter},
            {"unit_variance_noise", g.unit_variance_noise},
            {"latent_edge_probability", g.latent_edge_probability}};
}

json envelope(const std::string& command, std::uint64_t seed) {
    return {{"schema_version", kSchemaVersion}, {"version", kVersion}, {"command", command}, {"seed", seed}};
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

std::vector<int> parse_int_list(const std::string& s, const char* what) {
    std::vector<int> out;
    for (const auto& item : split_list(s)) {
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != item.size()) throw std::invalid_argument(std::string(what) + ": bad integer '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw std::invalid_argument(std::string(what) + " list is empty");
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open '" + path + "' for writing");
    f << text;
    if (!f) throw DataError("write to '" + path + "' failed");
}

json read_json(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw DataError("cannot open '" + path + "' for reading");
    try {
        return json::parse(f);
    } catch (const json::exception& e) {
        throw DataError("malformed JSON in '" + path + "': " + e.what());
    }
}

std::vector<std::string> names_of(const std::vector<std::string>& names, const std::vector<int>& cols) {
    std::vector<std::string> out;
    for (int c : cols) out.push_back(names[static_cast<std::size_t>(c)]);
    return out;
}

std::string result_dot(const DiscoveryResult& r, const std::vector<std::string>& names) {
    std::ostringstream o;
    o << "digraph discovery {\n  rankdir=TB;\n";
    for (std::size_t i = 0; i < r.clusters.size(); ++i) {
        const auto& c = r.clusters[i];
        o << "  subgraph cluster_" << i << " {\n    style=rounded;\n    label=\"S" << i + 1 << "\";\n";
        for (int m : c.members) o << "    \"" << names[m] << "\" [shape=box];\n";
        o << "  }\n";
        o << "  \"L(S" << i + 1 << ")\" [shape=ellipse, label=\"L(S" << i + 1 << ") k=" << c.latent_dim
          << "\"];\n";
        for (int m : c.members) o << "  \"L(S" << i + 1 << ")\" -> \"" << names[m] << "\";\n";
    }
    for (std::size_t i = 1; i < r.order.sequence.size(); ++i)
        o << "  \"L(S" << r.order.sequence[i - 1] + 1 << ")\" -> \"L(S" << r.order.sequence[i] + 1
          << ")\" [style=bold];\n";
    for (int u : r.unclustered) o << "  \"" << names[u] << "\" [shape=box, style=dashed];\n";
    o << "}\n";
    return o.str();
}

json gin_result_json(const GinResult& r, const std::vector<std::string>& names) {
    json pairs = json::array();
    for (const auto& p : r.pairwise_p)
        pairs.push_back({{"z", p.z_col < 0 ? json("joint") : json(names[p.z_col])}, {"p_value", p.p_value}});
    return {{"satisfied", r.satisfied},
            {"combined_p", r.combined_p},
            {"pairwise_p", pairs},
            {"omega", std::vector<double>(r.omega.omega.data(), r.omega.omega.data() + r.omega.omega.size())},
            {"residual_singular_value", r.omega.residual_singular_value},
            {"null_dim", r.omega.null_dim},
            {"degenerate", r.degenerate},
            {"clamped", r.clamped}};
}

std::uint64_t resolve_seed(const CLI::Option* opt, std::uint64_t value) {
    if (opt->count() > 0) return value;
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

int resolve_threads(const CLI::Option* opt, int value) {
    if (opt->count() > 0) return std::max(1, value);
    if (const char* env = std::getenv("GIN_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::string fmt_metric(double v, int failures) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f(%d)", v, failures);
    return buf;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Latent-variable causal discovery with the GIN condition"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    int verbosity = 0;
    app.add_flag("-v,--verbose", verbosity, "Print progress to stderr");

    // simulate
    auto* sim = app.add_subcommand("simulate", "Draw a sample from a fixed or random structure");
    int sim_case = 0, sim_n = 1000;
    std::string sim_random, sim_out, sim_graph_out, sim_meta;
    std::uint64_t sim_seed = 0;
    bool sim_unit = false;
    GenConfig sim_gen;
    sim->add_option("--case", sim_case, "Fixed structure 1..4");
    sim->add_option("--random", sim_random, "Random structure LATENTS,CHILDREN");
    sim->add_option("--n", sim_n, "Sample size")->capture_default_str();
    auto* sim_seed_opt = sim->add_option("--seed", sim_seed, "Master seed (default: system entropy)");
    sim->add_option("--out", sim_out, "CSV output path")->required();
    sim->add_option("--graph-out", sim_graph_out, "Write the generating graph as JSON");
    sim->add_option("--meta-out", sim_meta, "Sidecar JSON path (default: <out>.json)");
    sim->add_option("--coef-low", sim_gen.coef_low)->capture_default_str();
    sim->add_option("--coef-high", sim_gen.coef_high)->capture_default_str();
    sim->add_option("--edge-probability", sim_gen.latent_edge_probability,
                    "Latent edge probability for --random")->capture_default_str();
    sim->add_flag("--unit-variance", sim_unit, "Rescale noise terms to unit variance");

    // discover
    auto* disc = app.add_subcommand("discover", "Find causal clusters and their causal order");
    std::string disc_data, disc_out, disc_dot;
    bool disc_trace = false;
    std::uint64_t disc_seed = 0;
    TestOptions disc_opts;
    disc->add_option("--data", disc_data, "Input CSV")->required();
    disc->add_option("--out", disc_out, "Result JSON path (default: stdout)");
    disc->add_option("--dot", disc_dot, "Also write a DOT rendering");
    disc->add_flag("--trace", disc_trace, "Include every GIN test in the result");
    auto* disc_seed_opt = disc->add_option("--seed", disc_seed, "Seed for permutation p-values");
    disc->add_option("--cluster-context", disc_opts.context, "Z for cluster tests: full or pool")
        ->check(CLI::IsMember({"full", "pool"}))
        ->capture_default_str();
    add_test_options(disc, disc_opts);

    // gin-test
    auto* gt = app.add_subcommand("gin-test", "Run one GIN test");
    std::string gt_data, gt_z, gt_y, gt_out;
    std::uint64_t gt_seed = 0;
    TestOptions gt_opts;
    gt->add_option("--data", gt_data, "Input CSV")->required();
    gt->add_option("--z", gt_z, "Comma-separated Z column names")->required();
    gt->add_option("--y", gt_y, "Comma-separated Y column names")->required();
    gt->add_option("--out", gt_out, "Result JSON path (default: stdout)");
    auto* gt_seed_opt = gt->add_option("--seed", gt_seed, "Seed for permutation p-values");
    add_test_options(gt, gt_opts);

    // oracle-check
    auto* oc = app.add_subcommand("oracle-check", "Exact GIN decision from a known graph");
    std::string oc_graph, oc_z, oc_y;
    oc->add_option("--graph", oc_graph, "Graph JSON")->required();
    oc->add_option("--z", oc_z, "Comma-separated observed names")->required();
    oc->add_option("--y", oc_y, "Comma-separated observed names")->required();

    // benchmark
    auto* bench = app.add_subcommand("benchmark", "Repeat simulate + discover + score");
    std::string b_cases, b_random, b_n = "500,1000,2000", b_out, b_json, b_dat;
    int b_reps = 10, b_children = 3, b_threads = 1;
    std::uint64_t b_seed = 0;
    bool b_unit = false;
    TestOptions b_opts;
    bench->add_option("--cases", b_cases, "Fixed structures, e.g. 1,2,3,4");
    bench->add_option("--random", b_random, "Latent counts for random structures, e.g. 5");
    bench->add_option("--children", b_children, "Pure children per latent for --random")->capture_default_str();
    bench->add_option("--n", b_n, "Sample sizes")->capture_default_str();
    bench->add_option("--reps", b_reps, "Repetitions per cell")->capture_default_str();
    auto* b_seed_opt = bench->add_option("--seed", b_seed, "Master seed (default: system entropy)");
    auto* b_threads_opt = bench->add_option("--threads", b_threads, "Worker threads (fallback: GIN_THREADS)");
    bench->add_option("--out", b_out, "Table CSV path (default: stdout)");
    bench->add_option("--json", b_json, "Also write the table and config as JSON");
    bench->add_option("--ordering-dat", b_dat, "Gnuplot data file of ordering rates");
    bench->add_option("--cluster-context", b_opts.context, "Z for cluster tests: full or pool")
        ->check(CLI::IsMember({"full", "pool"}))
        ->capture_default_str();
    bench->add_flag("--unit-variance", b_unit, "Rescale noise terms to unit variance");
    add_test_options(bench, b_opts);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*sim) {
            if ((sim_case != 0) == !sim_random.empty())
                throw std::invalid_argument("give exactly one of --case and --random");
            GenConfig gen = sim_gen;
            gen.seed = resolve_seed(sim_seed_opt, sim_seed);
            gen.sample_size = sim_n;
            gen.unit_variance_noise = sim_unit;
            LingLamGraph graph = [&] {
                if (sim_case != 0) return case_graph(sim_case, gen);
                const auto lc = parse_int_list(sim_random, "--random");
                if (lc.size() != 2) throw std::invalid_argument("--random expects LATENTS,CHILDREN");
                return random_graph(lc[0], lc[1], gen);
            }();
            const auto data = sample(graph, gen);
            save_csv(sim_out, data);
            json meta = envelope("simulate", gen.seed);
            meta["config"] = gen_config_json(gen);
            meta["structure"] = sim_case != 0 ? json("case" + std::to_string(sim_case)) : json("random(" + sim_random + ")");
            if (sim_case == 0) meta["random_dag_law"] = "each earlier latent is a parent with the given probability; at least one forced";
            meta["graph"] = graph_to_json(graph);
            write_text(sim_meta.empty() ? sim_out + ".json" : sim_meta, meta.dump(2) + "\n");
            if (!sim_graph_out.empty()) write_text(sim_graph_out, graph_to_json(graph).dump(2) + "\n");
            if (verbosity > 0) err << "wrote " << data.rows() << "x" << data.cols() << " sample to " << sim_out << "\n";
            return kExitOk;
        }

        if (*disc) {
            const auto data = load_csv(disc_data);
            const std::uint64_t seed = disc_seed_opt->count() ? disc_seed : 0;
            const auto config = make_test_config(disc_opts, seed);
            DiscoveryOptions options;
            options.context = disc_opts.context == "pool" ? ClusterContext::Pool : ClusterContext::Full;
            options.record_trace = disc_trace;
            const auto r = discover(data, config, options);
            const auto& names = data.names();
            json doc = envelope("discover", seed);
            doc["config"] = test_config_json(config);
            doc["config"]["cluster_context"] = disc_opts.context;
            doc["config"]["data"] = disc_data;
            json clusters = json::array();
            for (const auto& c : r.clusters)
                clusters.push_back({{"members", names_of(names, c.members)}, {"latent_dim", c.latent_dim}});
            doc["clusters"] = clusters;
            doc["order"] = r.order.sequence;
            doc["unclustered"] = names_of(names, r.unclustered);
            doc["warnings"] = r.warnings;
            doc["low_confidence"] = r.low_confidence;
            if (disc_trace) {
                json trace = json::array();
                for (const auto& t : r.trace)
                    trace.push_back({{"stage", t.stage},
                                     {"z", names_of(names, t.z)},
                                     {"y", names_of(names, t.y)},
                                     {"satisfied", t.verdict.satisfied},
                                     {"combined_p", t.verdict.p_value}});
                doc["trace"] = trace;
            }
            const std::string text = doc.dump(2) + "\n";
            if (disc_out.empty())
                out << text;
            else
                write_text(disc_out, text);
            if (!disc_dot.empty()) write_text(disc_dot, result_dot(r, names));
            return kExitOk;
        }

        if (*gt) {
            const auto data = load_csv(gt_data);
            const std::uint64_t seed = gt_seed_opt->count() ? gt_seed : 0;
            const auto config = make_test_config(gt_opts, seed);
            const auto z = data.column_indices(split_list(gt_z));
            const auto y = data.column_indices(split_list(gt_y));
            const auto r = gin_test(data, z, y, config);
            json doc = envelope("gin-test", seed);
            doc["config"] = test_config_json(config);
            doc["z"] = split_list(gt_z);
            doc["y"] = split_list(gt_y);
            doc["result"] = gin_result_json(r, data.names());
            const std::string text = doc.dump(2) + "\n";
            if (gt_out.empty())
                out << text;
            else
                write_text(gt_out, text);
            return kExitOk;
        }

        if (*oc) {
            const auto graph = graph_from_json(read_json(oc_graph));
            auto columns = [&](const std::string& list) {
                std::vector<int> cols;
                for (const auto& name : split_list(list)) {
                    const auto& v = graph.find(name);
                    if (v.is_latent()) throw std::invalid_argument(name + " is latent");
                    cols.push_back(graph.column_of(v.index));
                }
                return cols;
            };
            const auto z = columns(oc_z);
            const auto y = columns(oc_y);
            const PopulationOracle oracle(graph);
            const auto exact = oracle.exact_gin(z, y);
            const auto graphical = oracle.graphical_gin(z, y);
            std::vector<std::string> witness, certificate;
            for (int l : graphical.witness) witness.push_back(graph.variable(l).name);
            for (int e : exact.shared_noise) certificate.push_back("e_" + graph.variable(e).name);
            json doc = envelope("oracle-check", 0);
            doc["config"] = {{"graph", oc_graph}, {"support_tolerance", 1e-9}, {"rank_tolerance", 1e-8}};
            doc["z"] = split_list(oc_z);
            doc["y"] = split_list(oc_y);
            doc["exact_gin"] = exact.satisfied;
            doc["null_dim"] = exact.null_dim;
            doc["ambiguous"] = exact.ambiguous;
            doc["graphical_gin"] = graphical.satisfied;
            doc["witness"] = witness;
            doc["certificate"] = certificate;
            out << doc.dump(2) << "\n";
            return kExitOk;
        }

        if (*bench) {
            BenchmarkSpec spec;
            if (!b_cases.empty()) spec.case_ids = parse_int_list(b_cases, "--cases");
            if (!b_random.empty()) spec.random_latents = parse_int_list(b_random, "--random");
            if (spec.case_ids.empty() && spec.random_latents.empty())
                throw std::invalid_argument("give --cases and/or --random");
            spec.random_children = b_children;
            spec.sample_sizes = parse_int_list(b_n, "--n");
            spec.repetitions = b_reps;
            spec.seed = resolve_seed(b_seed_opt, b_seed);
            spec.threads = resolve_threads(b_threads_opt, b_threads);
            spec.gen.unit_variance_noise = b_unit;
            spec.test = make_test_config(b_opts, spec.seed);
            spec.options.context = b_opts.context == "pool" ? ClusterContext::Pool : ClusterContext::Full;
            const auto rows = benchmark(spec);

            std::ostringstream csv;
            csv << "structure,N,reps,latent_omission,omission_failures,latent_commission,"
                   "commission_failures,mismeasurement,mismeasurement_failures,ordering_rate,"
                   "omission_cell,commission_cell,mismeasurement_cell\r\n";
            json table = json::array();
            for (const auto& r : rows) {
                csv << r.structure << ',' << r.sample_size << ',' << r.repetitions << ','
                    << format_double(r.latent_omission) << ',' << r.omission_failures << ','
                    << format_double(r.latent_commission) << ',' << r.commission_failures << ','
                    << format_double(r.mismeasurement) << ',' << r.mismeasurement_failures << ','
                    << format_double(r.ordering_rate) << ',' << fmt_metric(r.latent_omission, r.omission_failures)
                    << ',' << fmt_metric(r.latent_commission, r.commission_failures) << ','
                    << fmt_metric(r.mismeasurement, r.mismeasurement_failures) << "\r\n";
                table.push_back({{"structure", r.structure},
                                 {"N", r.sample_size},
                                 {"reps", r.repetitions},
                                 {"latent_omission", r.latent_omission},
                                 {"omission_failures", r.omission_failures},
                                 {"latent_commission", r.latent_commission},
                                 {"commission_failures", r.commission_failures},
                                 {"mismeasurement", r.mismeasurement},
                                 {"mismeasurement_failures", r.mismeasurement_failures},
                                 {"ordering_rate", r.ordering_rate}});
            }
            if (b_out.empty())
                out << csv.str();
            else
                write_text(b_out, csv.str());
            if (!b_json.empty()) {
                json doc = envelope("benchmark", spec.seed);
                doc["config"] = {{"test", test_config_json(spec.test)},
                                 {"generator", gen_config_json(spec.gen)},
                                 {"cluster_context", b_opts.context},
                                 {"matching", "max Jaccard overlap, ties to smaller true index"},
                                 {"failure_count", "repetitions with a nonzero metric value"}};
                doc["rows"] = table;
                write_text(b_json, doc.dump(2) + "\n");
            }
            if (!b_dat.empty()) {
                std::ostringstream dat;
                dat << "# structure N ordering_rate\n";
                for (const auto& r : rows)
                    dat << r.structure << ' ' << r.sample_size << ' ' << format_double(r.ordering_rate) << '\n';
                write_text(b_dat, dat.str());
            }
            return kExitOk;
        }
    } catch (const DataError& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitUsage;
}

int run(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, std::cout, std::cerr);
}

}  // namespace gin
