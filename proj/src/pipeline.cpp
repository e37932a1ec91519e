#include "ld/pipeline.hpp"

#include "ld/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>

#include <nlohmann/json.hpp>

namespace ld {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::vector<NodeId> iota_nodes(std::size_t n) {
    std::vector<NodeId> ids(n);
    std::iota(ids.begin(), ids.end(), 0u);
    return ids;
}

void check_finite_loss(double loss) {
    if (!std::isfinite(loss)) throw NumericError("training diverged: loss is not finite");
}

/// Target and gamma'-gradient plumbing for one mini-batch. For cross-entropy
/// style losses the target is the Eq.-style mix with a normalized inverse
/// label; for mean-squared runs the raw inverse labels are mixed in directly.
struct BatchTarget {
    Matrix target;
    Matrix yinv;  // kept for the backward pass
};

BatchTarget make_batch_target(const Matrix& yb, const HopLabelStack& stack,
                              std::span<const NodeId> batch, const DeconvWeights& w,
                              const TrainConfig& cfg) {
    BatchTarget out;
    out.yinv = inverse_labels(stack, batch, w);
    if (cfg.loss == LossKind::MeanSquared) {
        out.target = lincomb(yb, out.yinv, cfg.alpha);
    } else {
        out.target = mixed_target(yb, out.yinv, cfg.alpha, cfg.task);
    }
    return out;
}

std::vector<double> gamma_grad(const BatchTarget& bt, const Matrix& target_grad,
                               const HopLabelStack& stack, std::span<const NodeId> batch,
                               const DeconvWeights& w, const TrainConfig& cfg) {
    Matrix dyinv = target_grad;
    scale(dyinv, cfg.alpha);
    if (cfg.loss != LossKind::MeanSquared)
        dyinv = normalize_target_backward(bt.yinv, cfg.task, dyinv);
    return inverse_labels_grad(stack, batch, w, dyinv);
}

}  // namespace

FilterCoeffs make_filter(const FilterSpec& spec) {
    return spec.kind == FilterSpec::Kind::GcnPower ? gcn_power_filter(spec.hops)
                                                   : learnable_poly_filter(spec.hops);
}

FilterSpec parse_filter_spec(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos)
        throw ConfigError("filter spec '" + text + "' is not of the form gcn:N or poly:N");
    const std::string kind = text.substr(0, colon);
    std::size_t hops = 0;
    try {
        hops = std::stoul(text.substr(colon + 1));
    } catch (const std::exception&) {
        throw ConfigError("filter spec '" + text + "' has a malformed hop count");
    }
    if (kind == "gcn") return {FilterSpec::Kind::GcnPower, hops};
    if (kind == "poly") return {FilterSpec::Kind::LearnablePoly, hops};
    throw ConfigError("filter spec '" + text + "' has unknown kind '" + kind + "'");
}

std::string filter_spec_string(const FilterSpec& spec) {
    return (spec.kind == FilterSpec::Kind::GcnPower ? "gcn:" : "poly:") +
           std::to_string(spec.hops);
}

void validate(const TrainConfig& cfg) {
    if (cfg.alpha < 0.0 || cfg.alpha > 1.0)
        throw ConfigError("alpha = " + std::to_string(cfg.alpha) + " outside [0, 1]");
    if (cfg.batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (cfg.loss == LossKind::SoftCrossEntropy && cfg.task != TaskKind::MultiClass)
        throw ConfigError("soft cross entropy requires the multi-class task");
    if (cfg.loss == LossKind::BinaryCrossEntropy && cfg.task != TaskKind::MultiLabelBinary)
        throw ConfigError("binary cross entropy requires the multi-label task");
    if (cfg.optim.lr <= 0.0) throw ConfigError("learning rate must be positive");
}

PhaseResult train_ne_phase(const Matrix& attrs, Mlp& encoder, Mlp& head,
                           const HopLabelStack& stack, DeconvWeights& w,
                           const TrainConfig& cfg) {
    validate(cfg);
    const std::size_t n = stack.num_nodes();
    if (attrs.rows != n) throw Error("train_ne_phase: attrs rows do not match the stack");
    if (w.raw.size() != stack.hops.size())
        throw Error("train_ne_phase: deconv weights do not match the stack");

    MlpAdam enc_opt(encoder), head_opt(head);
    AdamState gamma_opt = make_adam_state(w.raw.size());
    std::mt19937_64 rng(cfg.seed);
    std::vector<NodeId> perm = iota_nodes(n);

    PhaseResult res;
    const auto start = Clock::now();
    for (std::size_t epoch = 0; epoch < cfg.ne_epochs; ++epoch) {
        std::shuffle(perm.begin(), perm.end(), rng);
        double epoch_loss = 0.0;
        std::size_t batches = 0;
        for (std::size_t lo = 0; lo < n; lo += cfg.batch_size) {
            const std::size_t hi = std::min(n, lo + cfg.batch_size);
            const std::span<const NodeId> batch(perm.data() + lo, hi - lo);

            const Matrix xb = gather_rows(attrs, batch);
            const Matrix yb = gather_rows(stack.hops.front(), batch);
            MlpCache enc_cache, head_cache;
            const Matrix fb = mlp_forward(encoder, xb, &enc_cache);
            const Matrix hb = mlp_forward(head, fb, &head_cache);

            const BatchTarget bt = make_batch_target(yb, stack, batch, w, cfg);
            const LossResult loss = loss_and_grad(cfg.loss, hb, bt.target, true);
            check_finite_loss(loss.value);

            const std::vector<double> graw =
                gamma_grad(bt, loss.target_grad, stack, batch, w, cfg);
            const MlpGrads head_grads = mlp_backward(head, head_cache, loss.logit_grad);
            const MlpGrads enc_grads = mlp_backward(encoder, enc_cache, head_grads.input);

            enc_opt.step(encoder, enc_grads, cfg.optim);
            head_opt.step(head, head_grads, cfg.optim);
            adam_step(gamma_opt, w.raw, graw, cfg.optim);

            epoch_loss += loss.value;
            ++batches;
            ++res.steps;
        }
        res.loss_curve.push_back(epoch_loss / static_cast<double>(batches));
        res.gamma_curve.push_back(deconv_coeffs(w));
    }
    res.elapsed_ms = ms_since(start);
    return res;
}

Matrix infer_features(const Matrix& attrs, const Mlp& encoder, std::size_t batch_size) {
    if (encoder.layers.empty()) return attrs;
    if (batch_size == 0) batch_size = attrs.rows;
    Matrix out(attrs.rows, encoder.out_dim());
    std::vector<NodeId> ids(batch_size);
    for (std::size_t lo = 0; lo < attrs.rows; lo += batch_size) {
        const std::size_t hi = std::min(attrs.rows, lo + batch_size);
        ids.resize(hi - lo);
        std::iota(ids.begin(), ids.end(), static_cast<NodeId>(lo));
        const Matrix fb = mlp_forward(encoder, gather_rows(attrs, ids));
        for (std::size_t r = 0; r < fb.rows; ++r)
            for (std::size_t j = 0; j < fb.cols; ++j) out.at(lo + r, j) = fb.at(r, j);
    }
    return out;
}

PhaseResult train_gnn_phase(const Matrix& features, const NormalizedAdjacency& adj,
                            SpectralGnnParams& p, const Matrix& targets, const NodeSplit& split,
                            const TrainConfig& cfg) {
    validate(cfg);
    if (features.rows != adj.num_nodes) throw Error("train_gnn_phase: feature rows mismatch");
    const std::vector<NodeId> all = iota_nodes(adj.num_nodes);
    const std::span<const NodeId> mask =
        split.train.empty() ? std::span<const NodeId>(all) : std::span<const NodeId>(split.train);

    const SparseRowMatrix adj_t = transposed(adj);
    MlpAdam head_opt(p.head);
    AdamState filter_opt = make_adam_state(p.filter.coeffs.size());

    PhaseResult res;
    const auto start = Clock::now();
    for (std::size_t epoch = 0; epoch < cfg.gnn_epochs; ++epoch) {
        GnnCache cache;
        const Matrix h = gnn_forward(features, adj, p, &cache);
        const LossResult loss = loss_and_grad(cfg.loss, h, targets, mask, false);
        check_finite_loss(loss.value);
        const GnnGrads grads = gnn_backward(adj_t, p, cache, loss.logit_grad);
        head_opt.step(p.head, grads.head, cfg.optim);
        if (p.filter.learnable) adam_step(filter_opt, p.filter.coeffs, grads.filter, cfg.optim);
        res.loss_curve.push_back(loss.value);
        ++res.steps;
    }
    res.elapsed_ms = ms_since(start);
    return res;
}

PhaseResult train_glem_baseline(const Matrix& attrs, Mlp& encoder, Mlp& head, const Matrix& y,
                                const TrainConfig& cfg) {
    validate(cfg);
    const std::size_t n = attrs.rows;
    if (y.rows != n) throw Error("train_glem_baseline: label rows mismatch");

    MlpAdam enc_opt(encoder), head_opt(head);
    std::mt19937_64 rng(cfg.seed);
    std::vector<NodeId> perm = iota_nodes(n);

    PhaseResult res;
    const auto start = Clock::now();
    for (std::size_t epoch = 0; epoch < cfg.ne_epochs; ++epoch) {
        std::shuffle(perm.begin(), perm.end(), rng);
        double epoch_loss = 0.0;
        std::size_t batches = 0;
        for (std::size_t lo = 0; lo < n; lo += cfg.batch_size) {
            const std::size_t hi = std::min(n, lo + cfg.batch_size);
            const std::span<const NodeId> batch(perm.data() + lo, hi - lo);

            const Matrix xb = gather_rows(attrs, batch);
            const Matrix yb = gather_rows(y, batch);
            MlpCache enc_cache, head_cache;
            const Matrix fb = mlp_forward(encoder, xb, &enc_cache);
            const Matrix hb = mlp_forward(head, fb, &head_cache);

            const LossResult loss = loss_and_grad(cfg.loss, hb, yb, false);
            check_finite_loss(loss.value);
            const MlpGrads head_grads = mlp_backward(head, head_cache, loss.logit_grad);
            const MlpGrads enc_grads = mlp_backward(encoder, enc_cache, head_grads.input);
            enc_opt.step(encoder, enc_grads, cfg.optim);
            head_opt.step(head, head_grads, cfg.optim);

            epoch_loss += loss.value;
            ++batches;
            ++res.steps;
        }
        res.loss_curve.push_back(epoch_loss / static_cast<double>(batches));
    }
    res.elapsed_ms = ms_since(start);
    return res;
}

PhaseResult train_joint_fullbatch(const Matrix& attrs, Mlp& encoder,
                                  const NormalizedAdjacency& adj, SpectralGnnParams& gnn,
                                  const Matrix& targets, const NodeSplit& split,
                                  const TrainConfig& cfg) {
    validate(cfg);
    if (adj.num_nodes > cfg.joint_cap) {
        throw ConfigError("train_joint_fullbatch: graph has " + std::to_string(adj.num_nodes) +
                          " nodes, above the cap of " + std::to_string(cfg.joint_cap) +
                          "; joint training is a small-graph reference (raise joint_cap to "
                          "override)");
    }
    const std::vector<NodeId> all = iota_nodes(adj.num_nodes);
    const std::span<const NodeId> mask =
        split.train.empty() ? std::span<const NodeId>(all) : std::span<const NodeId>(split.train);

    const SparseRowMatrix adj_t = transposed(adj);
    MlpAdam enc_opt(encoder), head_opt(gnn.head);
    AdamState filter_opt = make_adam_state(gnn.filter.coeffs.size());

    PhaseResult res;
    const auto start = Clock::now();
    for (std::size_t epoch = 0; epoch < cfg.gnn_epochs; ++epoch) {
        MlpCache enc_cache;
        GnnCache gnn_cache;
        const Matrix f = mlp_forward(encoder, attrs, &enc_cache);
        const Matrix h = gnn_forward(f, adj, gnn, &gnn_cache);
        const LossResult loss = loss_and_grad(cfg.loss, h, targets, mask, false);
        check_finite_loss(loss.value);
        const GnnGrads ggrads = gnn_backward(adj_t, gnn, gnn_cache, loss.logit_grad);
        const MlpGrads egrads = mlp_backward(encoder, enc_cache, ggrads.head.input);
        enc_opt.step(encoder, egrads, cfg.optim);
        head_opt.step(gnn.head, ggrads.head, cfg.optim);
        if (gnn.filter.learnable)
            adam_step(filter_opt, gnn.filter.coeffs, ggrads.filter, cfg.optim);
        res.loss_curve.push_back(loss.value);
        ++res.steps;
    }
    res.elapsed_ms = ms_since(start);
    return res;
}

LabelMatrix generate_pseudo_labels(const NormalizedAdjacency& adj, const Matrix& frozen_features,
                                   const LabelMatrix& y, const NodeSplit& split,
                                   const TrainConfig& cfg) {
    const std::size_t d = y.values.cols;
    TrainConfig inner = cfg;
    inner.loss = (y.task == TaskKind::MultiClass) ? LossKind::SoftCrossEntropy
                                                  : LossKind::BinaryCrossEntropy;
    inner.task = y.task;

    SpectralGnnParams gnn;
    gnn.filter = make_filter(cfg.filter);
    std::vector<std::size_t> dims;
    dims.push_back(frozen_features.cols);
    dims.insert(dims.end(), cfg.head_hidden.begin(), cfg.head_hidden.end());
    dims.push_back(d);
    gnn.head = make_mlp(dims, Activation::ReLU, derive_seed(cfg.seed, 11));

    train_gnn_phase(frozen_features, adj, gnn, y.values, split, inner);
    const Matrix h = gnn_forward(frozen_features, adj, gnn);
    const Matrix probs = (y.task == TaskKind::MultiClass) ? softmax_rows(h) : sigmoid(h);

    LabelMatrix out = y;
    for (const auto* part : {&split.val, &split.test})
        for (NodeId r : *part)
            for (std::size_t j = 0; j < d; ++j) out.values.at(r, j) = probs.at(r, j);
    return out;
}

Method parse_method(const std::string& text) {
    if (text == "ld") return Method::LD;
    if (text == "glem") return Method::GLEM;
    if (text == "joint") return Method::Joint;
    if (text == "frozen") return Method::FrozenFeatures;
    throw ConfigError("unknown method '" + text + "' (expected ld, glem, joint, or frozen)");
}

std::string method_name(Method m) {
    switch (m) {
        case Method::LD: return "ld";
        case Method::GLEM: return "glem";
        case Method::Joint: return "joint";
        case Method::FrozenFeatures: return "frozen";
    }
    return "?";
}

namespace {

Mlp make_encoder(const GeneratedDataset& ds, const TrainConfig& cfg, std::uint64_t salt) {
    std::vector<std::size_t> dims;
    dims.push_back(ds.attrs.cols);
    dims.insert(dims.end(), cfg.encoder_hidden.begin(), cfg.encoder_hidden.end());
    dims.push_back(cfg.feature_dim);
    return make_mlp(dims, Activation::ReLU, derive_seed(cfg.seed, salt), cfg.encoder_bias);
}

Mlp make_head(std::size_t in_dim, std::size_t out_dim, const TrainConfig& cfg,
              std::uint64_t salt) {
    std::vector<std::size_t> dims;
    dims.push_back(in_dim);
    dims.insert(dims.end(), cfg.head_hidden.begin(), cfg.head_hidden.end());
    dims.push_back(out_dim);
    return make_mlp(dims, Activation::ReLU, derive_seed(cfg.seed, salt));
}

double eval_metric(const Matrix& pred, const GeneratedDataset& ds,
                   std::span<const NodeId> mask) {
    if (ds.labels.task == TaskKind::MultiClass) return accuracy(pred, ds.labels, mask).value;
    return roc_auc(pred, ds.labels, mask).value;
}

}  // namespace

ExperimentReport run_experiment(const GeneratedDataset& ds, Method method,
                                const TrainConfig& cfg) {
    validate(cfg);
    ExperimentReport report;
    report.method = method_name(method);
    report.config = cfg;

    const NormalizedAdjacency adj = row_normalize(ds.graph);
    const std::size_t d = ds.labels.values.cols;
    const Matrix& gnn_targets = cfg.use_continuous_targets ? ds.targets : ds.labels.values;

    const bool classification = !cfg.use_continuous_targets;
    const bool has_eval_rows = !ds.split.val.empty() || !ds.split.test.empty();

    Matrix features;
    SpectralGnnParams gnn;
    gnn.filter = make_filter(cfg.filter);

    if (method == Method::Joint) {
        Mlp encoder = make_encoder(ds, cfg, 1);
        gnn.head = make_head(cfg.feature_dim, d, cfg, 2);
        PhaseResult joint =
            train_joint_fullbatch(ds.attrs, encoder, adj, gnn, gnn_targets, ds.split, cfg);
        report.gnn_loss = joint.loss_curve;
        report.gnn_ms = joint.elapsed_ms;
        features = infer_features(ds.attrs, encoder);
    } else if (method == Method::FrozenFeatures) {
        const auto t0 = Clock::now();
        const Mlp encoder = make_encoder(ds, cfg, 1);
        features = infer_features(ds.attrs, encoder);
        report.preprocess_ms = ms_since(t0);
        gnn.head = make_head(cfg.feature_dim, d, cfg, 2);
        PhaseResult res = train_gnn_phase(features, adj, gnn, gnn_targets, ds.split, cfg);
        report.gnn_loss = res.loss_curve;
        report.gnn_ms = res.elapsed_ms;
    } else {
        // Separate training: preprocessing, NE phase, then the GNN phase.
        const auto t0 = Clock::now();
        LabelMatrix y_work = ds.labels;
        if (classification && has_eval_rows) {
            const Mlp pne_encoder = make_encoder(ds, cfg, 7);
            const Matrix pne_features = infer_features(ds.attrs, pne_encoder);
            y_work = generate_pseudo_labels(adj, pne_features, ds.labels, ds.split, cfg);
        }
        const Matrix& ne_targets = cfg.use_continuous_targets ? ds.targets : y_work.values;
        HopLabelStack stack;
        if (method == Method::LD) stack = precompute_hop_labels(adj, ne_targets, cfg.n_hops);
        report.preprocess_ms = ms_since(t0);

        Mlp encoder = make_encoder(ds, cfg, 1);
        Mlp ne_head = make_head(cfg.feature_dim, d, cfg, 2);
        PhaseResult ne;
        if (method == Method::LD) {
            DeconvWeights w = deconv_init(cfg.n_hops);
            ne = train_ne_phase(ds.attrs, encoder, ne_head, stack, w, cfg);
            report.gamma = ne.gamma_curve;
        } else {
            ne = train_glem_baseline(ds.attrs, encoder, ne_head, ne_targets, cfg);
        }
        report.ne_loss = ne.loss_curve;
        report.ne_ms = ne.elapsed_ms;

        features = infer_features(ds.attrs, encoder);
        gnn.head = cfg.warm_start_head ? ne_head : make_head(cfg.feature_dim, d, cfg, 3);
        PhaseResult res = train_gnn_phase(features, adj, gnn, gnn_targets, ds.split, cfg);
        report.gnn_loss = res.loss_curve;
        report.gnn_ms = res.elapsed_ms;
    }

    const Matrix pred = gnn_forward(features, adj, gnn);
    const std::vector<NodeId> all = iota_nodes(ds.graph.num_nodes);
    const auto pick = [&](const std::vector<NodeId>& part) {
        return part.empty() ? std::span<const NodeId>(all) : std::span<const NodeId>(part);
    };
    report.metrics["train"] = eval_metric(pred, ds, pick(ds.split.train));
    report.metrics["val"] = eval_metric(pred, ds, pick(ds.split.val));
    report.metrics["test"] = eval_metric(pred, ds, pick(ds.split.test));
    return report;
}

namespace {

using nlohmann::json;

json config_to_json(const TrainConfig& cfg) {
    return json{{"n_hops", cfg.n_hops},
                {"alpha", cfg.alpha},
                {"ne_epochs", cfg.ne_epochs},
                {"gnn_epochs", cfg.gnn_epochs},
                {"batch_size", cfg.batch_size},
                {"seed", cfg.seed},
                {"task", cfg.task == TaskKind::MultiClass ? "multiclass" : "multilabel"},
                {"loss", cfg.loss == LossKind::SoftCrossEntropy
                             ? "ce"
                             : (cfg.loss == LossKind::BinaryCrossEntropy ? "bce" : "mse")},
                {"lr", cfg.optim.lr},
                {"beta1", cfg.optim.beta1},
                {"beta2", cfg.optim.beta2},
                {"eps", cfg.optim.eps},
                {"filter", filter_spec_string(cfg.filter)},
                {"warm_start_head", cfg.warm_start_head},
                {"feature_dim", cfg.feature_dim},
                {"encoder_hidden", cfg.encoder_hidden},
                {"head_hidden", cfg.head_hidden},
                {"encoder_bias", cfg.encoder_bias},
                {"use_continuous_targets", cfg.use_continuous_targets},
                {"joint_cap", cfg.joint_cap}};
}

TrainConfig config_from_json(const json& j) {
    TrainConfig cfg;
    cfg.n_hops = j.at("n_hops").get<std::size_t>();
    cfg.alpha = j.at("alpha").get<double>();
    cfg.ne_epochs = j.at("ne_epochs").get<std::size_t>();
    cfg.gnn_epochs = j.at("gnn_epochs").get<std::size_t>();
    cfg.batch_size = j.at("batch_size").get<std::size_t>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.task = j.at("task").get<std::string>() == "multilabel" ? TaskKind::MultiLabelBinary
                                                               : TaskKind::MultiClass;
    const std::string loss = j.at("loss").get<std::string>();
    cfg.loss = loss == "ce" ? LossKind::SoftCrossEntropy
                            : (loss == "bce" ? LossKind::BinaryCrossEntropy
                                             : LossKind::MeanSquared);
    cfg.optim.lr = j.at("lr").get<double>();
    cfg.optim.beta1 = j.at("beta1").get<double>();
    cfg.optim.beta2 = j.at("beta2").get<double>();
    cfg.optim.eps = j.at("eps").get<double>();
    cfg.filter = parse_filter_spec(j.at("filter").get<std::string>());
    cfg.warm_start_head = j.at("warm_start_head").get<bool>();
    cfg.feature_dim = j.at("feature_dim").get<std::size_t>();
    cfg.encoder_hidden = j.at("encoder_hidden").get<std::vector<std::size_t>>();
    cfg.head_hidden = j.at("head_hidden").get<std::vector<std::size_t>>();
    cfg.encoder_bias = j.at("encoder_bias").get<bool>();
    cfg.use_continuous_targets = j.at("use_continuous_targets").get<bool>();
    cfg.joint_cap = j.at("joint_cap").get<std::size_t>();
    return cfg;
}

}  // namespace

std::string report_to_json(const ExperimentReport& report) {
    json j;
    j["method"] = report.method;
    j["config"] = config_to_json(report.config);
    j["metrics"] = json{{"train", report.metrics.count("train") ? report.metrics.at("train") : 0.0},
                        {"val", report.metrics.count("val") ? report.metrics.at("val") : 0.0},
                        {"test", report.metrics.count("test") ? report.metrics.at("test") : 0.0}};
    j["curves"] = json{{"ne_loss", report.ne_loss},
                       {"gnn_loss", report.gnn_loss},
                       {"gamma", report.gamma}};
    j["timing_ms"] = json{{"preprocess", report.preprocess_ms},
                          {"ne", report.ne_ms},
                          {"gnn", report.gnn_ms}};
    return j.dump(2) + "\n";
}

ExperimentReport report_from_json(const std::string& text) {
    const json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw DataError("report_from_json: invalid JSON");
    ExperimentReport report;
    report.method = j.at("method").get<std::string>();
    report.config = config_from_json(j.at("config"));
    for (const auto& [key, value] : j.at("metrics").items())
        report.metrics[key] = value.get<double>();
    report.ne_loss = j.at("curves").at("ne_loss").get<std::vector<double>>();
    report.gnn_loss = j.at("curves").at("gnn_loss").get<std::vector<double>>();
    report.gamma = j.at("curves").at("gamma").get<std::vector<std::vector<double>>>();
    report.preprocess_ms = j.at("timing_ms").at("preprocess").get<double>();
    report.ne_ms = j.at("timing_ms").at("ne").get<double>();
    report.gnn_ms = j.at("timing_ms").at("gnn").get<double>();
    return report;
}

void save_report(const std::string& path, const ExperimentReport& report) {
    std::ofstream out(path);
    if (!out) throw DataError("save_report: cannot open " + path);
    out << report_to_json(report);
    if (!out) throw DataError("save_report: write failed for " + path);
}

ExperimentReport load_report(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("load_report: cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return report_from_json(text);
}

namespace {

void write_csv(const std::string& path, const std::string& header,
               const std::function<void(std::FILE*)>& body) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw DataError("emit_curves: cannot open " + path);
    std::fprintf(f, "%s\n", header.c_str());
    body(f);
    std::fclose(f);
}

}  // namespace

MotivatingResult run_motivating_example(double alpha, std::uint64_t seed, std::size_t epochs) {
    const GeneratedDataset ds = build_motivating_example();
    const NormalizedAdjacency adj = row_normalize(ds.graph);
    const HopLabelStack stack = precompute_hop_labels(adj, ds.labels.values, 1);

    TrainConfig cfg;
    cfg.n_hops = 1;
    cfg.alpha = alpha;
    cfg.ne_epochs = epochs;
    cfg.batch_size = ds.graph.num_nodes;  // full batch
    cfg.seed = seed;
    cfg.loss = LossKind::MeanSquared;
    cfg.filter = {FilterSpec::Kind::GcnPower, 1};
    cfg.feature_dim = 3;
    cfg.encoder_bias = false;
    validate(cfg);

    const std::vector<std::size_t> dims{3, 3};
    MotivatingResult out;

    Mlp enc_ld = make_mlp(dims, Activation::Identity, derive_seed(seed, 1), false);
    Mlp head_ld;  // identity
    DeconvWeights w = deconv_init(cfg.n_hops);
    train_ne_phase(ds.attrs, enc_ld, head_ld, stack, w, cfg);
    out.f_ld = infer_features(ds.attrs, enc_ld);
    out.pred_ld = spmm(adj, out.f_ld);
    out.gamma = deconv_coeffs(w);

    Mlp enc_glem = make_mlp(dims, Activation::Identity, derive_seed(seed, 1), false);
    Mlp head_glem;
    train_glem_baseline(ds.attrs, enc_glem, head_glem, ds.labels.values, cfg);
    out.f_glem = infer_features(ds.attrs, enc_glem);
    out.pred_glem = spmm(adj, out.f_glem);
    out.beta_glem = enc_glem.layers.front().weight;

    out.acc_ld = accuracy(out.pred_ld, ds.labels, ds.split.train).value;
    out.acc_glem = accuracy(out.pred_glem, ds.labels, ds.split.train).value;
    return out;
}

void emit_curves(const ExperimentReport& report, const std::string& prefix) {
    write_csv(prefix + "ne_loss.csv", "epoch,value", [&](std::FILE* f) {
        for (std::size_t e = 0; e < report.ne_loss.size(); ++e)
            std::fprintf(f, "%zu,%.17g\n", e, report.ne_loss[e]);
    });
    write_csv(prefix + "gnn_loss.csv", "epoch,value", [&](std::FILE* f) {
        for (std::size_t e = 0; e < report.gnn_loss.size(); ++e)
            std::fprintf(f, "%zu,%.17g\n", e, report.gnn_loss[e]);
    });
    std::string header = "epoch";
    const std::size_t width = report.gamma.empty() ? 0 : report.gamma.front().size();
    for (std::size_t i = 0; i < width; ++i) header += ",g" + std::to_string(i);
    write_csv(prefix + "gamma.csv", header, [&](std::FILE* f) {
        for (std::size_t e = 0; e < report.gamma.size(); ++e) {
            std::fprintf(f, "%zu", e);
            for (double g : report.gamma[e]) std::fprintf(f, ",%.17g", g);
            std::fprintf(f, "\n");
        }
    });
}

}  // namespace ld
