#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ld/core.hpp"
#include "ld/graph.hpp"

namespace ld {

enum class Activation : std::uint8_t { Identity = 0, ReLU = 1 };

struct Layer {
    Matrix weight;             // fan_in x fan_out
    std::vector<double> bias;  // fan_out, empty when has_bias is false
    Activation act = Activation::Identity;
    bool has_bias = true;
};

/// Plain MLP. An empty layer list is the identity map.
struct Mlp {
    std::vector<Layer> layers;

    std::size_t in_dim() const { return layers.empty() ? 0 : layers.front().weight.rows; }
    std::size_t out_dim() const { return layers.empty() ? 0 : layers.back().weight.cols; }
    std::size_t param_count() const;
};

/// Layers sized dims[0] -> dims[1] -> ... -> dims.back(); hidden layers use
/// `hidden_act`, the last layer is linear. Weights are uniform in
/// +-sqrt(6 / (fan_in + fan_out)), biases start at zero.
Mlp make_mlp(std::span<const std::size_t> dims, Activation hidden_act, std::uint64_t seed,
             bool bias = true);

struct MlpCache {
    Matrix input;
    std::vector<Matrix> pre;   // preactivation per layer
    std::vector<Matrix> post;  // activation output per layer
};

Matrix mlp_forward(const Mlp& p, const Matrix& x, MlpCache* cache = nullptr);

struct MlpGrads {
    std::vector<Matrix> weight;
    std::vector<std::vector<double>> bias;
    Matrix input;  // gradient w.r.t. the forward input
};

MlpGrads mlp_backward(const Mlp& p, const MlpCache& cache, const Matrix& upstream);

enum class LossKind { SoftCrossEntropy, BinaryCrossEntropy, MeanSquared };

struct LossResult {
    double value = 0.0;
    Matrix logit_grad;
    Matrix target_grad;  // filled only when requested
};

/// Mean over masked rows; per-row loss sums over columns. SoftCrossEntropy
/// expects row-stochastic targets, BinaryCrossEntropy targets in [0, 1].
/// Gradients are zero outside the mask. Throws on an empty mask.
LossResult loss_and_grad(LossKind kind, const Matrix& logits, const Matrix& target,
                         std::span<const NodeId> mask, bool want_target_grad = false);

/// Convenience overload over all rows.
LossResult loss_and_grad(LossKind kind, const Matrix& logits, const Matrix& target,
                         bool want_target_grad = false);

struct AdamConfig {
    double lr = 1e-2;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    std::size_t t = 0;
};

AdamState make_adam_state(std::size_t dim);

/// Bias-corrected adaptive-moment update, in place on params.
void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads,
               const AdamConfig& cfg);

/// Per-layer optimizer states for a whole MLP.
struct MlpAdam {
    std::vector<AdamState> w;
    std::vector<AdamState> b;

    explicit MlpAdam(const Mlp& p);
    void step(Mlp& p, const MlpGrads& g, const AdamConfig& cfg);
};

/// Checkpoint: binary header plus flat little-endian arrays in layer order.
void save_mlp(const std::string& path, const Mlp& p);
Mlp load_mlp(const std::string& path);

Matrix sigmoid(const Matrix& logits);
Matrix softmax_rows(const Matrix& logits);

}  // namespace ld
