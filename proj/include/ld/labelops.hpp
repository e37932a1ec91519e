#pragma once

#include <span>
#include <string>
#include <vector>

#include "ld/core.hpp"
#include "ld/graph.hpp"

namespace ld {

enum class TaskKind { MultiClass, MultiLabelBinary };

/// Label matrix Y (num_nodes x num_classes). Multi-class rows are one-hot or
/// probability rows (pseudo labels); multi-label entries live in [0, 1].
struct LabelMatrix {
    Matrix values;
    TaskKind task = TaskKind::MultiClass;
};

/// Precomputed hop labels K_i = A_hat^i * Y, i = 0..N. K_0 is Y itself.
/// Immutable after preprocessing; shared read-only across workers.
struct HopLabelStack {
    std::vector<Matrix> hops;

    std::size_t n_hops() const { return hops.empty() ? 0 : hops.size() - 1; }
    std::size_t num_nodes() const { return hops.empty() ? 0 : hops.front().rows; }
    std::size_t dim() const { return hops.empty() ? 0 : hops.front().cols; }
};

/// Raw deconvolution logits; softmax(raw) are the per-hop mixing weights.
struct DeconvWeights {
    std::vector<double> raw;
};

HopLabelStack precompute_hop_labels(const NormalizedAdjacency& adj, const Matrix& y,
                                    std::size_t n_hops);

/// Uniform initialization: all logits equal, so every hop weight is 1/(N+1).
DeconvWeights deconv_init(std::size_t n_hops);

/// softmax(raw); entries are positive and sum to 1.
std::vector<double> deconv_coeffs(const DeconvWeights& w);

/// Row b of the result is sum_i softmax(w)_i * K_i[batch[b]]. Touches only
/// the requested rows; cost O(|batch| * (N+1) * d), no graph access.
Matrix inverse_labels(const HopLabelStack& stack, std::span<const NodeId> batch,
                      const DeconvWeights& w);

/// Gradient of sum(upstream .* inverse_labels(...)) w.r.t. the raw logits.
std::vector<double> inverse_labels_grad(const HopLabelStack& stack,
                                        std::span<const NodeId> batch, const DeconvWeights& w,
                                        const Matrix& upstream);

/// Multi-class: divide each row by its sum (error on a non-positive sum).
/// Multi-label: clamp entries into [0, 1].
Matrix normalize_target(const Matrix& t, TaskKind task);

/// Backward of normalize_target: gradient w.r.t. the raw input t.
Matrix normalize_target_backward(const Matrix& t, TaskKind task, const Matrix& upstream);

/// (1 - alpha) * y + alpha * normalize_target(yinv, task).
Matrix mixed_target(const Matrix& y_rows, const Matrix& yinv, double alpha, TaskKind task);

/// Binary stack file: magic, version, N, num_nodes, d, element width, then
/// the hop blocks in order, all little-endian.
void save_hop_stack(const std::string& path, const HopLabelStack& stack);
HopLabelStack load_hop_stack(const std::string& path);

}  // namespace ld
