#include "ld/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "ld/oracle.hpp"

namespace ld {

namespace {

Matrix one_hot_rows(std::span<const std::size_t> classes, std::size_t num_classes) {
    Matrix m(classes.size(), num_classes);
    for (std::size_t i = 0; i < classes.size(); ++i) m.at(i, classes[i]) = 1.0;
    return m;
}

std::vector<std::size_t> argmax_rows(const Matrix& m) {
    std::vector<std::size_t> out(m.rows, 0);
    for (std::size_t r = 0; r < m.rows; ++r) {
        std::size_t best = 0;
        for (std::size_t j = 1; j < m.cols; ++j)
            if (m.at(r, j) > m.at(r, best)) best = j;  // ties keep the lowest index
        out[r] = best;
    }
    return out;
}

NodeSplit make_split(std::size_t n, double train_frac, double val_frac, std::mt19937_64& rng) {
    std::vector<NodeId> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::shuffle(order.begin(), order.end(), rng);
    const auto n_train = static_cast<std::size_t>(std::llround(train_frac * n));
    const auto n_val = static_cast<std::size_t>(std::llround(val_frac * n));
    NodeSplit split;
    for (std::size_t i = 0; i < n; ++i) {
        if (i < n_train)
            split.train.push_back(order[i]);
        else if (i < n_train + n_val)
            split.val.push_back(order[i]);
        else
            split.test.push_back(order[i]);
    }
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.val.begin(), split.val.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

}  // namespace

GeneratedDataset build_motivating_example() {
    GeneratedDataset ds;
    ds.name = "motivating";
    const std::vector<Edge> edges{{0, 1}, {1, 0}, {2, 3}, {3, 2}};
    ds.graph = build_csr(edges, 4);
    const std::vector<std::size_t> attr_classes{0, 1, 1, 2};
    const std::vector<std::size_t> label_classes{1, 0, 2, 1};
    ds.attrs = one_hot_rows(attr_classes, 3);
    ds.labels = LabelMatrix{one_hot_rows(label_classes, 3), TaskKind::MultiClass};
    ds.targets = ds.labels.values;
    ds.split.train.assign({0, 1, 2, 3});
    ds.alpha_star = {0.0, 1.0};
    ds.fstar = ds.attrs;
    ds.provenance = R"({"generator":"motivating","alpha_star":[0.0,1.0],"psi_star":"identity"})";
    return ds;
}

GeneratedDataset build_counterexample_family(std::size_t num_pairs, std::size_t num_classes,
                                             std::uint64_t seed) {
    if (num_pairs < 2) throw ConfigError("build_counterexample_family: need num_pairs >= 2");
    if (num_pairs % 2 != 0)
        throw ConfigError("build_counterexample_family: num_pairs must be even (two pairs form "
                          "one gadget)");
    const std::size_t gadgets = num_pairs / 2;
    if (num_classes < 3 * gadgets) {
        throw ConfigError("build_counterexample_family: need num_classes >= " +
                          std::to_string(3 * gadgets) + " for " + std::to_string(gadgets) +
                          " gadgets, got " + std::to_string(num_classes));
    }

    std::vector<std::size_t> class_pool(num_classes);
    std::iota(class_pool.begin(), class_pool.end(), 0u);
    std::mt19937_64 rng(seed);
    if (seed != 0) std::shuffle(class_pool.begin(), class_pool.end(), rng);

    const std::size_t n = 2 * num_pairs;
    std::vector<Edge> edges;
    std::vector<std::size_t> attr_classes(n), label_classes(n);
    for (std::size_t g = 0; g < gadgets; ++g) {
        const std::size_t a = class_pool[3 * g];
        const std::size_t m = class_pool[3 * g + 1];
        const std::size_t b = class_pool[3 * g + 2];
        const NodeId base = static_cast<NodeId>(4 * g);
        // pair 1: attrs (a, m), pair 2: attrs (m, b); labels = partner attrs
        edges.push_back({base, base + 1});
        edges.push_back({base + 1, base});
        edges.push_back({base + 2, base + 3});
        edges.push_back({base + 3, base + 2});
        attr_classes[base] = a;
        attr_classes[base + 1] = m;
        attr_classes[base + 2] = m;
        attr_classes[base + 3] = b;
        label_classes[base] = m;
        label_classes[base + 1] = a;
        label_classes[base + 2] = b;
        label_classes[base + 3] = m;
    }

    GeneratedDataset ds;
    ds.name = "counterexample";
    ds.graph = build_csr(edges, n);
    ds.attrs = one_hot_rows(attr_classes, num_classes);
    ds.labels = LabelMatrix{one_hot_rows(label_classes, num_classes), TaskKind::MultiClass};
    ds.targets = ds.labels.values;
    ds.split.train.resize(n);
    std::iota(ds.split.train.begin(), ds.split.train.end(), 0u);
    ds.alpha_star = {0.0, 1.0};
    ds.fstar = ds.attrs;
    std::ostringstream prov;
    prov << R"({"generator":"counterexample","num_pairs":)" << num_pairs
         << R"(,"num_classes":)" << num_classes << R"(,"seed":)" << seed << "}";
    ds.provenance = prov.str();
    return ds;
}

namespace {

/// Ring per component plus a random in-component matching, then global noise
/// edges; keeps every node connected so A_hat stays well conditioned.
std::vector<Edge> sample_graph_edges(std::size_t n, std::size_t component_size,
                                     double noise_fraction, std::mt19937_64& rng) {
    std::vector<Edge> edges;
    const std::size_t comp = std::max<std::size_t>(3, component_size);
    for (std::size_t start = 0; start < n; start += comp) {
        const std::size_t end = std::min(n, start + comp);
        const std::size_t size = end - start;
        if (size == 1) {
            if (start > 0) edges.push_back({static_cast<NodeId>(start), 0});
            continue;
        }
        for (std::size_t i = 0; i < size; ++i) {
            const NodeId u = static_cast<NodeId>(start + i);
            const NodeId v = static_cast<NodeId>(start + (i + 1) % size);
            edges.push_back({u, v});
        }
        std::vector<NodeId> members(size);
        std::iota(members.begin(), members.end(), static_cast<NodeId>(start));
        std::shuffle(members.begin(), members.end(), rng);
        for (std::size_t i = 0; i + 1 < size; i += 2)
            edges.push_back({members[i], members[i + 1]});
    }
    const auto noise = static_cast<std::size_t>(std::llround(noise_fraction * n));
    std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(n - 1));
    for (std::size_t i = 0; i < noise; ++i) {
        const NodeId u = pick(rng), v = pick(rng);
        if (u != v) edges.push_back({u, v});
    }
    return symmetrized(edges);
}

std::vector<double> sample_filter(std::size_t hops, std::mt19937_64& rng) {
    // alpha_0 = 1 and sum_{i>=1} |alpha_i| = 0.8 keeps phi(A_hat) diagonally
    // dominant for row-stochastic A_hat, hence invertible.
    std::vector<double> alpha(hops + 1, 0.0);
    alpha[0] = 1.0;
    if (hops == 0) return alpha;
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    double mass = 0.0;
    for (std::size_t i = 1; i <= hops; ++i) {
        alpha[i] = dist(rng);
        mass += std::abs(alpha[i]);
    }
    if (mass > 0.0)
        for (std::size_t i = 1; i <= hops; ++i) alpha[i] *= 0.8 / mass;
    return alpha;
}

}  // namespace

GeneratedDataset generate_assumption1(const SynthConfig& cfg) {
    if (cfg.num_nodes == 0 || cfg.attr_dim == 0 || cfg.num_classes == 0)
        throw ConfigError("generate_assumption1: zero-sized dimension");
    if (cfg.num_nodes > 512)
        throw ConfigError("generate_assumption1: n = " + std::to_string(cfg.num_nodes) +
                          " exceeds the dense-oracle guard (n <= 512)");
    std::mt19937_64 rng(cfg.seed);

    const std::vector<Edge> edges =
        sample_graph_edges(cfg.num_nodes, cfg.component_size, cfg.noise_edge_fraction, rng);
    GeneratedDataset ds;
    ds.name = "assumption1";
    ds.graph = build_csr(edges, cfg.num_nodes);
    const NormalizedAdjacency adj = row_normalize(ds.graph);
    const Matrix adj_dense = to_dense(adj);

    ds.fstar = Matrix(cfg.num_nodes, cfg.attr_dim);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (double& v : ds.fstar.data) v = normal(rng);
    if (cfg.planted_duplicates > 0) {
        std::uniform_int_distribution<std::size_t> pick(0, cfg.num_nodes - 1);
        for (std::size_t k = 0; k < cfg.planted_duplicates; ++k) {
            const std::size_t src = pick(rng);
            std::size_t dst = pick(rng);
            if (dst == src) dst = (dst + 1) % cfg.num_nodes;
            for (std::size_t j = 0; j < cfg.attr_dim; ++j)
                ds.fstar.at(dst, j) = ds.fstar.at(src, j);
        }
    }
    ds.attrs = ds.fstar;

    std::vector<std::size_t> dims;
    dims.push_back(cfg.attr_dim);
    dims.insert(dims.end(), cfg.psi_hidden.begin(), cfg.psi_hidden.end());
    dims.push_back(cfg.num_classes);
    ds.psi_star = make_mlp(dims, Activation::ReLU, rng());

    if (!cfg.alpha_star.empty()) {
        ds.alpha_star = cfg.alpha_star;
        if (!oracle::is_invertible(oracle::apply_matrix_poly(ds.alpha_star, adj_dense)))
            throw Error("generate_assumption1: the provided alpha_star makes phi(A_hat) singular");
    } else {
        bool ok = false;
        for (std::size_t attempt = 0; attempt < cfg.max_regen && !ok; ++attempt) {
            ds.alpha_star = sample_filter(cfg.filter_hops, rng);
            ok = oracle::is_invertible(oracle::apply_matrix_poly(ds.alpha_star, adj_dense));
        }
        if (!ok)
            throw Error("generate_assumption1: could not sample an invertible filter after " +
                        std::to_string(cfg.max_regen) + " attempts");
    }

    const Matrix psi_out = mlp_forward(ds.psi_star, ds.fstar);
    ds.targets = matmul(oracle::apply_matrix_poly(ds.alpha_star, adj_dense), psi_out);
    const std::vector<std::size_t> hot = argmax_rows(ds.targets);
    ds.labels = LabelMatrix{one_hot_rows(hot, cfg.num_classes), TaskKind::MultiClass};
    ds.split = make_split(cfg.num_nodes, cfg.train_frac, cfg.val_frac, rng);

    std::ostringstream prov;
    prov << R"({"generator":"assumption1","seed":)" << cfg.seed << R"(,"num_nodes":)"
         << cfg.num_nodes << R"(,"attr_dim":)" << cfg.attr_dim << R"(,"num_classes":)"
         << cfg.num_classes << R"(,"fstar_distribution":"iid standard normal","alpha_star":[)";
    for (std::size_t i = 0; i < ds.alpha_star.size(); ++i)
        prov << (i ? "," : "") << ds.alpha_star[i];
    prov << "]}";
    ds.provenance = prov.str();
    return ds;
}

}  // namespace ld
