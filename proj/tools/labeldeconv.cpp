// Command-line entry point for reproducible runs: dataset generation,
// preprocessing, the two-phase trainer, baselines, the dense theory checks,
// and the analytic 4-node example.

#include <cstdio>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ld/bundle.hpp"
#include "ld/metrics.hpp"
#include "ld/oracle.hpp"
#include "ld/pipeline.hpp"

namespace {

using namespace ld;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

struct CommonFlags {
    std::size_t n_hops = 2;
    double alpha = 1.0;
    std::size_t epochs_ne = 200;
    std::size_t epochs_gnn = 400;
    std::size_t batch_size = 64;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::string filter = "poly:2";
    bool warm_start_head = false;
    std::string loss = "auto";
    std::size_t feature_dim = 16;
    std::vector<std::size_t> encoder_hidden;
    std::vector<std::size_t> head_hidden;
    bool encoder_no_bias = false;
    bool use_targets = false;
    double lr = 1e-2;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--n-hops", f.n_hops, "Label deconvolution depth N")
        ->capture_default_str();
    cmd->add_option("--alpha", f.alpha, "Mixing weight for normalized inverse labels")
        ->capture_default_str();
    cmd->add_option("--epochs-ne", f.epochs_ne, "Encoder-phase epochs")->capture_default_str();
    cmd->add_option("--epochs-gnn", f.epochs_gnn, "GNN-phase epochs")->capture_default_str();
    cmd->add_option("--batch-size", f.batch_size, "Mini-batch size for the encoder phase")
        ->capture_default_str();
    cmd->add_option("--seed", f.seed, "RNG seed; equal seeds give identical results")
        ->capture_default_str();
    cmd->add_option("--threads", f.threads, "Worker cap; never changes results")
        ->capture_default_str();
    cmd->add_option("--filter", f.filter, "Spectral filter: gcn:N (fixed) or poly:N (learnable)")
        ->capture_default_str();
    cmd->add_flag("--warm-start-head", f.warm_start_head,
                  "Seed the GNN head from the encoder-phase head");
    cmd->add_option("--loss", f.loss, "Loss: auto (per task), ce, bce, or mse")
        ->capture_default_str();
    cmd->add_option("--feature-dim", f.feature_dim, "Encoder output dimension")
        ->capture_default_str();
    cmd->add_option("--encoder-hidden", f.encoder_hidden, "Encoder hidden sizes")
        ->delimiter(',');
    cmd->add_option("--head-hidden", f.head_hidden, "Head hidden sizes")->delimiter(',');
    cmd->add_flag("--encoder-no-bias", f.encoder_no_bias, "Drop encoder bias terms");
    cmd->add_flag("--use-targets", f.use_targets,
                  "Train on continuous generator targets instead of one-hot labels");
    cmd->add_option("--lr", f.lr, "Adam learning rate")->capture_default_str();
}

TrainConfig to_config(const CommonFlags& f, TaskKind task) {
    TrainConfig cfg;
    cfg.n_hops = f.n_hops;
    cfg.alpha = f.alpha;
    cfg.ne_epochs = f.epochs_ne;
    cfg.gnn_epochs = f.epochs_gnn;
    cfg.batch_size = f.batch_size;
    cfg.seed = f.seed;
    cfg.task = task;
    if (f.loss == "auto") {
        cfg.loss = task == TaskKind::MultiClass ? LossKind::SoftCrossEntropy
                                                : LossKind::BinaryCrossEntropy;
    } else if (f.loss == "ce") {
        cfg.loss = LossKind::SoftCrossEntropy;
    } else if (f.loss == "bce") {
        cfg.loss = LossKind::BinaryCrossEntropy;
    } else if (f.loss == "mse") {
        cfg.loss = LossKind::MeanSquared;
    } else {
        throw ConfigError("unknown loss '" + f.loss + "'");
    }
    cfg.optim.lr = f.lr;
    cfg.filter = parse_filter_spec(f.filter);
    cfg.warm_start_head = f.warm_start_head;
    cfg.feature_dim = f.feature_dim;
    cfg.encoder_hidden = f.encoder_hidden;
    cfg.head_hidden = f.head_hidden;
    cfg.encoder_bias = !f.encoder_no_bias;
    cfg.use_continuous_targets = f.use_targets;
    validate(cfg);
    return cfg;
}

void print_matrix(const Matrix& m, const std::string& label) {
    std::printf("%s:\n", label.c_str());
    for (std::size_t i = 0; i < m.rows; ++i) {
        std::printf("  [");
        for (std::size_t j = 0; j < m.cols; ++j)
            std::printf("%s%8.4f", j ? ", " : "", m.at(i, j));
        std::printf("]\n");
    }
}

int cmd_gen(const std::string& kind, std::size_t num_nodes, std::size_t num_pairs,
            std::size_t num_classes, std::size_t attr_dim, std::size_t filter_hops,
            double train_frac, double val_frac, std::uint64_t seed, const std::string& out) {
    GeneratedDataset ds;
    if (kind == "motivating") {
        ds = build_motivating_example();
    } else if (kind == "counterexample") {
        ds = build_counterexample_family(num_pairs, num_classes, seed);
    } else if (kind == "assumption1") {
        SynthConfig cfg;
        cfg.num_nodes = num_nodes;
        cfg.attr_dim = attr_dim;
        cfg.num_classes = num_classes;
        cfg.filter_hops = filter_hops;
        cfg.train_frac = train_frac;
        cfg.val_frac = val_frac;
        cfg.seed = seed;
        ds = generate_assumption1(cfg);
    } else {
        throw ConfigError("unknown dataset kind '" + kind + "'");
    }
    save_bundle(ds, out);
    std::printf("wrote %s bundle: %zu nodes, %zu edges, %zu classes -> %s\n", ds.name.c_str(),
                ds.graph.num_nodes, ds.graph.num_edges(), ds.labels.values.cols, out.c_str());
    return kExitOk;
}

int cmd_preprocess(const std::string& bundle_dir, std::size_t n_hops, bool symmetrize,
                   const std::string& out) {
    GeneratedDataset ds = load_bundle(bundle_dir);
    CsrGraph graph = ds.graph;
    if (symmetrize) {
        std::vector<Edge> edges;
        for (std::size_t u = 0; u < graph.num_nodes; ++u)
            for (NodeId v : graph.neighbors(static_cast<NodeId>(u)))
                edges.emplace_back(static_cast<NodeId>(u), v);
        graph = build_csr(symmetrized(edges), graph.num_nodes);
    }
    const NormalizedAdjacency adj = row_normalize(graph);
    const HopLabelStack stack = precompute_hop_labels(adj, ds.labels.values, n_hops);
    save_hop_stack(out, stack);
    std::printf("wrote hop-label stack: N=%zu, %zu nodes, %zu classes -> %s\n", stack.n_hops(),
                stack.num_nodes(), stack.dim(), out.c_str());
    return kExitOk;
}

int cmd_train(const std::string& bundle_dir, const std::string& method_text,
              const CommonFlags& flags, const std::string& out) {
    const GeneratedDataset ds = load_bundle(bundle_dir);
    const Method method = parse_method(method_text);
    TrainConfig cfg = to_config(flags, ds.labels.task);
    if (cfg.use_continuous_targets && ds.targets.empty())
        throw DataError("bundle has no continuous targets (regenerate with a synthetic kind)");
    const ExperimentReport report = run_experiment(ds, method, cfg);
    save_report(out, report);
    std::printf("%s on %s: train=%.4f val=%.4f test=%.4f -> %s\n", report.method.c_str(),
                ds.name.c_str(), report.metrics.at("train"), report.metrics.at("val"),
                report.metrics.at("test"), out.c_str());
    return kExitOk;
}

int cmd_motivating(double alpha, std::uint64_t seed, std::size_t epochs) {
    const MotivatingResult res = run_motivating_example(alpha, seed, epochs);
    const GeneratedDataset ds = build_motivating_example();
    print_matrix(ds.labels.values, "Y");
    print_matrix(ds.attrs, "X");
    print_matrix(res.f_glem, "F (label-only baseline)");
    print_matrix(res.pred_glem, "A_hat F (label-only baseline)");
    print_matrix(res.f_ld, "F (label deconvolution)");
    print_matrix(res.pred_ld, "A_hat F (label deconvolution)");
    print_matrix(res.beta_glem, "beta (label-only baseline)");
    std::printf("gamma: [");
    for (std::size_t i = 0; i < res.gamma.size(); ++i)
        std::printf("%s%.6f", i ? ", " : "", res.gamma[i]);
    std::printf("]\n");
    std::printf("accuracy: label deconvolution %.0f%%, label-only baseline %.0f%%\n",
                100.0 * res.acc_ld, 100.0 * res.acc_glem);
    if (res.acc_ld == 1.0 && res.acc_glem == 0.0) return kExitOk;
    std::printf("MISMATCH: expected 100%% / 0%%\n");
    return kExitCheckFailed;
}

struct OracleCheck {
    std::string name;
    double residual = 0.0;
    double bound = 0.0;
    bool pass = false;
    std::string note;
};

int cmd_oracle_check(std::size_t n, std::size_t instances, std::uint64_t seed,
                     const std::string& graph_kind) {
    std::vector<OracleCheck> checks;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    const auto random_matrix = [&](std::size_t rows, std::size_t cols) {
        Matrix m(rows, cols);
        for (double& v : m.data) v = normal(rng);
        return m;
    };

    if (graph_kind == "two-disjoint-edges") {
        // Spectrum {1, 1, -1, -1}: the repeated-eigenvalue rejection case.
        Matrix a(4, 4);
        a.at(0, 1) = a.at(1, 0) = a.at(2, 3) = a.at(3, 2) = 1.0;
        const Matrix adj = oracle::sym_normalize_dense(a);
        const Matrix f = random_matrix(4, 3);
        std::vector<double> target(4, 1.0);
        try {
            oracle::universality_fit(adj, f, target, seed);
            std::printf("universality: unexpectedly accepted a repeated-eigenvalue graph\n");
            return kExitCheckFailed;
        } catch (const oracle::PreconditionError& e) {
            std::printf("universality precondition-failure (expected): %s\n", e.which.c_str());
            return kExitOk;
        }
    }

    // Lemma: Cayley-Hamilton inverse vs direct factorization.
    {
        double worst = 0.0;
        for (std::size_t k = 0; k < instances; ++k) {
            Matrix m = random_matrix(n, n);
            for (std::size_t i = 0; i < n; ++i) m.at(i, i) += 3.0;  // keep well conditioned
            const Matrix inv = oracle::inverse_via_cayley(m);
            worst = std::max(worst, max_abs_diff(inv, oracle::dense_inverse(m)));
        }
        checks.push_back({"cayley_inverse_vs_lu", worst, 1e-8, worst < 1e-8, ""});
    }

    // Proposition: phi(A)^-1 as a short polynomial in A.
    {
        double worst = 0.0;
        for (std::size_t k = 0; k < instances; ++k) {
            Matrix a = random_matrix(n, n);
            scale(a, 0.3);
            FilterCoeffs filter;
            filter.coeffs = {1.0, 0.4, 0.2};
            const auto gamma = oracle::polynomial_inverse_coeffs(filter, a);
            const Matrix lhs = oracle::apply_matrix_poly(gamma, a);
            const Matrix rhs = oracle::dense_inverse(oracle::apply_matrix_poly(filter.coeffs, a));
            worst = std::max(worst, frobenius_norm([&] {
                                 Matrix d = lhs;
                                 axpy(d, -1.0, rhs);
                                 return d;
                             }()));
        }
        checks.push_back({"polynomial_inverse_residual", worst, 1e-8, worst < 1e-8, ""});
    }

    // Universality on random symmetric graphs that pass the preconditions.
    {
        double worst = 0.0;
        std::size_t tried = 0, accepted = 0;
        while (accepted < instances && tried < instances * 50) {
            ++tried;
            Matrix a(n, n);
            std::uniform_real_distribution<double> coin(0.0, 1.0);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j)
                    if (coin(rng) < 0.45) a.at(i, j) = a.at(j, i) = 1.0;
            const Matrix adj = oracle::sym_normalize_dense(a);
            const Matrix f = random_matrix(n, 3);
            std::vector<double> target(n);
            for (double& v : target) v = normal(rng);
            try {
                const auto fit = oracle::universality_fit(adj, f, target, seed + tried);
                worst = std::max(worst, fit.residual);
                ++accepted;
            } catch (const oracle::PreconditionError&) {
                continue;
            }
        }
        checks.push_back({"universality_residual", worst, 1e-6,
                          accepted == instances && worst < 1e-6,
                          "accepted " + std::to_string(accepted) + "/" +
                              std::to_string(instances)});
    }

    // Least squares reproduces the analytic solution of the 4-node example.
    {
        const GeneratedDataset ds = build_motivating_example();
        const Matrix beta = oracle::least_squares(ds.attrs, ds.labels.values);
        Matrix expected(3, 3);
        expected.at(0, 1) = 1.0;
        expected.at(1, 0) = 0.5;
        expected.at(1, 2) = 0.5;
        expected.at(2, 1) = 1.0;
        const double err = max_abs_diff(beta, expected);
        checks.push_back({"least_squares_4node", err, 1e-10, err < 1e-10, ""});

        const NormalizedAdjacency adj = row_normalize(ds.graph);
        FilterCoeffs hat;
        hat.coeffs = {0.0, 1.0};
        const Matrix deconv =
            oracle::exact_inverse_labels(hat, to_dense(adj), ds.labels.values);
        const double err2 = max_abs_diff(deconv, ds.attrs);
        checks.push_back({"exact_inverse_labels_4node", err2, 1e-10, err2 < 1e-10, ""});
    }

    bool all_pass = true;
    for (const OracleCheck& c : checks) {
        std::printf("%-32s residual %.3e (bound %.0e) %s%s%s\n", c.name.c_str(), c.residual,
                    c.bound, c.pass ? "PASS" : "FAIL", c.note.empty() ? "" : "  ",
                    c.note.c_str());
        all_pass = all_pass && c.pass;
    }
    return all_pass ? kExitOk : kExitCheckFailed;
}

int cmd_report(const std::string& path, const std::string& curves_prefix) {
    const ExperimentReport report = load_report(path);
    std::printf("method: %s\n", report.method.c_str());
    for (const auto& [split, value] : report.metrics)
        std::printf("  %-6s %.4f\n", split.c_str(), value);
    std::printf("  timing_ms: preprocess=%.1f ne=%.1f gnn=%.1f\n", report.preprocess_ms,
                report.ne_ms, report.gnn_ms);
    if (!curves_prefix.empty()) {
        emit_curves(report, curves_prefix);
        std::printf("curves written with prefix %s\n", curves_prefix.c_str());
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Label deconvolution trainer: two-phase separate training for attributed "
                 "graphs, with baselines and dense algebra checks"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "Generate a dataset bundle");
    std::string gen_kind = "assumption1";
    std::size_t gen_nodes = 200, gen_pairs = 2, gen_classes = 3, gen_attr_dim = 8, gen_hops = 2;
    double gen_train = 1.0, gen_val = 0.0;
    std::uint64_t gen_seed = 0;
    std::string gen_out = "bundle";
    gen->add_option("--kind", gen_kind, "motivating, counterexample, or assumption1")
        ->capture_default_str();
    gen->add_option("--num-nodes", gen_nodes, "Node count (assumption1)")->capture_default_str();
    gen->add_option("--num-pairs", gen_pairs, "Pair count (counterexample)")
        ->capture_default_str();
    gen->add_option("--num-classes", gen_classes, "Class count")->capture_default_str();
    gen->add_option("--attr-dim", gen_attr_dim, "Attribute dimension (assumption1)")
        ->capture_default_str();
    gen->add_option("--filter-hops", gen_hops, "Generator filter depth N*")
        ->capture_default_str();
    gen->add_option("--train-frac", gen_train, "Training fraction")->capture_default_str();
    gen->add_option("--val-frac", gen_val, "Validation fraction")->capture_default_str();
    gen->add_option("--seed", gen_seed, "Generator seed")->capture_default_str();
    gen->add_option("--out", gen_out, "Output bundle directory")->capture_default_str();

    // preprocess
    auto* pre = app.add_subcommand("preprocess", "Precompute and store hop labels");
    std::string pre_bundle, pre_out = "hop_stack.bin";
    std::size_t pre_hops = 2;
    bool pre_sym = false;
    pre->add_option("--bundle", pre_bundle, "Bundle directory")->required();
    pre->add_option("--n-hops", pre_hops, "Hop depth N")->capture_default_str();
    pre->add_flag("--symmetrize", pre_sym, "Add reverse edges before normalizing");
    pre->add_option("--out", pre_out, "Output stack file")->capture_default_str();

    // train / baseline
    auto* train = app.add_subcommand("train", "Run the two-phase pipeline on a bundle");
    std::string train_bundle, train_method = "ld", train_out = "report.json";
    CommonFlags train_flags;
    train->add_option("--bundle", train_bundle, "Bundle directory")->required();
    train->add_option("--method", train_method, "ld, glem, joint, or frozen")
        ->capture_default_str();
    add_common_flags(train, train_flags);
    train->add_option("--out", train_out, "Report JSON path")->capture_default_str();

    auto* baseline = app.add_subcommand("baseline", "Run a baseline method on a bundle");
    std::string base_bundle, base_method = "glem", base_out = "report.json";
    CommonFlags base_flags;
    baseline->add_option("--bundle", base_bundle, "Bundle directory")->required();
    baseline->add_option("--method", base_method, "glem, joint, or frozen")
        ->capture_default_str();
    add_common_flags(baseline, base_flags);
    baseline->add_option("--out", base_out, "Report JSON path")->capture_default_str();

    // oracle-check
    auto* oracle_cmd = app.add_subcommand("oracle-check", "Run the dense algebra checks");
    std::size_t on = 8, oinstances = 10;
    std::uint64_t oseed = 0;
    std::string ograph = "random";
    oracle_cmd->add_option("--n", on, "Matrix/graph size")->capture_default_str();
    oracle_cmd->add_option("--instances", oinstances, "Random instances per check")
        ->capture_default_str();
    oracle_cmd->add_option("--seed", oseed, "RNG seed")->capture_default_str();
    oracle_cmd->add_option("--graph", ograph, "random or two-disjoint-edges")
        ->capture_default_str();

    // motivating-example
    auto* motiv = app.add_subcommand("motivating-example", "Reproduce the analytic 4-node table");
    double malpha = 1.0;
    std::uint64_t mseed = 0;
    std::size_t mepochs = 4000;
    motiv->add_option("--alpha", malpha, "Mixing weight")->capture_default_str();
    motiv->add_option("--seed", mseed, "RNG seed")->capture_default_str();
    motiv->add_option("--epochs-ne", mepochs, "Encoder-phase epochs")->capture_default_str();

    // report
    auto* rep = app.add_subcommand("report", "Pretty-print a report and emit curves");
    std::string rep_in, rep_curves;
    rep->add_option("--in", rep_in, "Report JSON path")->required();
    rep->add_option("--curves", rep_curves, "Prefix for CSV curve files");

    unsigned threads = 1;
    app.add_option("--threads", threads, "Worker cap; never changes results")
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);
    ld::set_thread_count(threads);

    try {
        if (*gen)
            return cmd_gen(gen_kind, gen_nodes, gen_pairs, gen_classes, gen_attr_dim, gen_hops,
                           gen_train, gen_val, gen_seed, gen_out);
        if (*pre) return cmd_preprocess(pre_bundle, pre_hops, pre_sym, pre_out);
        if (*train) {
            ld::set_thread_count(train_flags.threads);
            return cmd_train(train_bundle, train_method, train_flags, train_out);
        }
        if (*baseline) {
            ld::set_thread_count(base_flags.threads);
            return cmd_train(base_bundle, base_method, base_flags, base_out);
        }
        if (*oracle_cmd) return cmd_oracle_check(on, oinstances, oseed, ograph);
        if (*motiv) return cmd_motivating(malpha, mseed, mepochs);
        if (*rep) return cmd_report(rep_in, rep_curves);
    } catch (const ld::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ld::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const ld::NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitCheckFailed;
    }
    return kExitOk;
}
