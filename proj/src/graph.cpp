#include "ld/graph.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <fstream>
#include <sstream>

namespace ld {

CsrGraph build_csr(std::span<const Edge> edges, std::size_t num_nodes) {
    for (const Edge& e : edges) {
        if (e.first >= num_nodes || e.second >= num_nodes) {
            throw DataError("build_csr: edge (" + std::to_string(e.first) + ", " +
                            std::to_string(e.second) + ") out of range for " +
                            std::to_string(num_nodes) + " nodes");
        }
    }
    std::vector<Edge> sorted(edges.begin(), edges.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

    CsrGraph g;
    g.num_nodes = num_nodes;
    g.row_ptr.assign(num_nodes + 1, 0);
    g.col_idx.reserve(sorted.size());
    for (const Edge& e : sorted) ++g.row_ptr[e.first + 1];
    for (std::size_t i = 0; i < num_nodes; ++i) g.row_ptr[i + 1] += g.row_ptr[i];
    for (const Edge& e : sorted) g.col_idx.push_back(e.second);
    return g;
}

std::vector<Edge> symmetrized(std::span<const Edge> edges) {
    std::vector<Edge> out(edges.begin(), edges.end());
    out.reserve(edges.size() * 2);
    for (const Edge& e : edges)
        if (e.first != e.second) out.emplace_back(e.second, e.first);
    return out;
}

NormalizedAdjacency row_normalize(const CsrGraph& g, IsolatedPolicy) {
    NormalizedAdjacency adj;
    adj.num_nodes = g.num_nodes;
    adj.row_ptr.assign(g.num_nodes + 1, 0);
    for (std::size_t u = 0; u < g.num_nodes; ++u) {
        const std::size_t deg = g.degree(static_cast<NodeId>(u));
        adj.row_ptr[u + 1] = adj.row_ptr[u] + (deg == 0 ? 1 : deg);
    }
    adj.col_idx.resize(adj.row_ptr.back());
    adj.values.resize(adj.row_ptr.back());
    for (std::size_t u = 0; u < g.num_nodes; ++u) {
        const std::size_t deg = g.degree(static_cast<NodeId>(u));
        std::size_t at = adj.row_ptr[u];
        if (deg == 0) {
            adj.col_idx[at] = static_cast<NodeId>(u);
            adj.values[at] = 1.0;
            continue;
        }
        const double w = 1.0 / static_cast<double>(deg);
        for (NodeId v : g.neighbors(static_cast<NodeId>(u))) {
            adj.col_idx[at] = v;
            adj.values[at] = w;
            ++at;
        }
    }
    return adj;
}

namespace {

template <typename Csr>
Matrix spmm_impl(const Csr& a, std::size_t out_rows, std::size_t in_rows, const Matrix& m) {
    if (m.rows != in_rows) {
        throw Error("spmm: matrix has " + std::to_string(m.rows) + " rows, adjacency expects " +
                    std::to_string(in_rows));
    }
    Matrix out(out_rows, m.cols);
    parallel_for(out_rows, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            double* dst = out.data.data() + i * out.cols;
            for (std::size_t e = a.row_ptr[i]; e < a.row_ptr[i + 1]; ++e) {
                const double w = a.values[e];
                const double* src = m.data.data() + static_cast<std::size_t>(a.col_idx[e]) * m.cols;
                for (std::size_t j = 0; j < m.cols; ++j) dst[j] += w * src[j];
            }
        }
    });
    return out;
}

}  // namespace

Matrix spmm(const NormalizedAdjacency& adj, const Matrix& m) {
    return spmm_impl(adj, adj.num_nodes, adj.num_nodes, m);
}

Matrix spmm(const SparseRowMatrix& a, const Matrix& m) {
    return spmm_impl(a, a.rows, a.cols, m);
}

SparseRowMatrix transposed(const NormalizedAdjacency& adj) {
    SparseRowMatrix t;
    t.rows = adj.num_nodes;
    t.cols = adj.num_nodes;
    t.row_ptr.assign(adj.num_nodes + 1, 0);
    for (NodeId c : adj.col_idx) ++t.row_ptr[c + 1];
    for (std::size_t i = 0; i < adj.num_nodes; ++i) t.row_ptr[i + 1] += t.row_ptr[i];
    t.col_idx.resize(adj.col_idx.size());
    t.values.resize(adj.values.size());
    std::vector<std::size_t> cursor(t.row_ptr.begin(), t.row_ptr.end() - 1);
    for (std::size_t u = 0; u < adj.num_nodes; ++u) {
        for (std::size_t e = adj.row_ptr[u]; e < adj.row_ptr[u + 1]; ++e) {
            const std::size_t at = cursor[adj.col_idx[e]]++;
            t.col_idx[at] = static_cast<NodeId>(u);
            t.values[at] = adj.values[e];
        }
    }
    return t;
}

Matrix to_dense(const NormalizedAdjacency& adj) {
    Matrix d(adj.num_nodes, adj.num_nodes);
    for (std::size_t u = 0; u < adj.num_nodes; ++u)
        for (std::size_t e = adj.row_ptr[u]; e < adj.row_ptr[u + 1]; ++e)
            d.at(u, adj.col_idx[e]) += adj.values[e];
    return d;
}

Matrix to_dense(const CsrGraph& g) {
    Matrix d(g.num_nodes, g.num_nodes);
    for (std::size_t u = 0; u < g.num_nodes; ++u)
        for (NodeId v : g.neighbors(static_cast<NodeId>(u))) d.at(u, v) = 1.0;
    return d;
}

SubgraphResult k_hop_subgraph(const CsrGraph& g, std::span<const NodeId> seeds,
                              std::size_t depth) {
    if (seeds.empty()) throw Error("k_hop_subgraph: seed set is empty");
    SubgraphResult res;
    res.old_to_new.assign(g.num_nodes, kNoNode);

    std::deque<std::pair<NodeId, std::size_t>> frontier;  // node, hops used
    for (NodeId s : seeds) {
        if (s >= g.num_nodes)
            throw Error("k_hop_subgraph: seed " + std::to_string(s) + " out of range");
        if (res.old_to_new[s] != kNoNode) continue;  // duplicate seed
        res.old_to_new[s] = static_cast<NodeId>(res.new_to_old.size());
        res.new_to_old.push_back(s);
        frontier.emplace_back(s, 0);
    }
    while (!frontier.empty()) {
        auto [u, used] = frontier.front();
        frontier.pop_front();
        if (used == depth) continue;
        for (NodeId v : g.neighbors(u)) {
            if (res.old_to_new[v] != kNoNode) continue;
            res.old_to_new[v] = static_cast<NodeId>(res.new_to_old.size());
            res.new_to_old.push_back(v);
            frontier.emplace_back(v, used + 1);
        }
    }

    std::vector<Edge> local_edges;
    for (std::size_t nu = 0; nu < res.new_to_old.size(); ++nu) {
        for (NodeId v : g.neighbors(res.new_to_old[nu])) {
            const NodeId nv = res.old_to_new[v];
            if (nv != kNoNode) local_edges.emplace_back(static_cast<NodeId>(nu), nv);
        }
    }
    res.graph = build_csr(local_edges, res.new_to_old.size());
    return res;
}

std::vector<Edge> load_edge_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("load_edge_list: cannot open " + path);
    std::vector<Edge> edges;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        unsigned long long u, v;
        if (!(ls >> u)) continue;  // blank or comment-only line
        if (!(ls >> v)) {
            throw DataError("load_edge_list: " + path + ":" + std::to_string(lineno) +
                            ": expected 'src dst'");
        }
        edges.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
    }
    return edges;
}

void save_edge_list(const std::string& path, std::span<const Edge> edges) {
    std::ofstream out(path);
    if (!out) throw DataError("save_edge_list: cannot open " + path);
    for (const Edge& e : edges) out << e.first << ' ' << e.second << '\n';
    if (!out) throw DataError("save_edge_list: write failed for " + path);
}

}  // namespace ld
