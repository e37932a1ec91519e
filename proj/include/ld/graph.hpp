#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ld/core.hpp"

namespace ld {

using NodeId = std::uint32_t;
using Edge = std::pair<NodeId, NodeId>;

inline constexpr NodeId kNoNode = static_cast<NodeId>(-1);

/// Unweighted graph in CSR form. Within each row col_idx is strictly
/// increasing (no duplicate edges). Edges are directed; callers symmetrize
/// explicitly when an undirected graph is meant.
struct CsrGraph {
    std::size_t num_nodes = 0;
    std::vector<std::size_t> row_ptr;  // length num_nodes + 1
    std::vector<NodeId> col_idx;

    std::size_t num_edges() const { return col_idx.size(); }
    std::size_t degree(NodeId u) const { return row_ptr[u + 1] - row_ptr[u]; }
    std::span<const NodeId> neighbors(NodeId u) const {
        return {col_idx.data() + row_ptr[u], degree(u)};
    }
};

/// General weighted CSR matrix (rows x cols).
struct SparseRowMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::size_t> row_ptr;
    std::vector<NodeId> col_idx;
    std::vector<double> values;
};

/// Row-stochastic adjacency A_hat = D^-1 A. Every row with at least one edge
/// sums to 1; rows of isolated nodes hold exactly one unit self-loop.
struct NormalizedAdjacency {
    std::size_t num_nodes = 0;
    std::vector<std::size_t> row_ptr;
    std::vector<NodeId> col_idx;
    std::vector<double> values;

    std::size_t num_entries() const { return col_idx.size(); }
};

enum class IsolatedPolicy { SelfLoop };

/// Disjoint train/val/test node index sets.
struct NodeSplit {
    std::vector<NodeId> train;
    std::vector<NodeId> val;
    std::vector<NodeId> test;
};

/// Builds a sorted, deduplicated CSR graph. Self-loops are preserved when
/// present in the input. Throws DataError naming the offending edge if an
/// endpoint is out of range.
CsrGraph build_csr(std::span<const Edge> edges, std::size_t num_nodes);

/// Returns the edge list with every reverse edge added (dedup via build_csr).
std::vector<Edge> symmetrized(std::span<const Edge> edges);

NormalizedAdjacency row_normalize(const CsrGraph& g,
                                  IsolatedPolicy policy = IsolatedPolicy::SelfLoop);

/// Sparse-dense product A_hat * m. Summation order within each output row is
/// fixed (CSR order), so results are independent of the worker count.
Matrix spmm(const NormalizedAdjacency& adj, const Matrix& m);
Matrix spmm(const SparseRowMatrix& a, const Matrix& m);

/// Explicit transpose, used for backward passes (A_hat^T products).
SparseRowMatrix transposed(const NormalizedAdjacency& adj);

Matrix to_dense(const NormalizedAdjacency& adj);
Matrix to_dense(const CsrGraph& g);

struct SubgraphResult {
    CsrGraph graph;
    std::vector<NodeId> new_to_old;  // new index -> original node
    std::vector<NodeId> old_to_new;  // kNoNode where absent
};

/// All nodes reachable from seeds within `depth` hops plus induced edges.
/// Seeds occupy the first |seeds| new indices (in the given order).
SubgraphResult k_hop_subgraph(const CsrGraph& g, std::span<const NodeId> seeds,
                              std::size_t depth);

/// Edge-list file: one "src dst" pair per line, '#' starts a comment.
std::vector<Edge> load_edge_list(const std::string& path);
void save_edge_list(const std::string& path, std::span<const Edge> edges);

}  // namespace ld
