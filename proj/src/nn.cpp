#include "ld/nn.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include "bytes.hpp"

namespace ld {

std::size_t Mlp::param_count() const {
    std::size_t n = 0;
    for (const Layer& l : layers) n += l.weight.data.size() + l.bias.size();
    return n;
}

Mlp make_mlp(std::span<const std::size_t> dims, Activation hidden_act, std::uint64_t seed,
             bool bias) {
    if (dims.size() < 2) throw ConfigError("make_mlp: need at least input and output dims");
    std::mt19937_64 rng(seed);
    Mlp p;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        Layer layer;
        layer.weight = Matrix(dims[l], dims[l + 1]);
        const double bound = std::sqrt(6.0 / static_cast<double>(dims[l] + dims[l + 1]));
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (double& w : layer.weight.data) w = dist(rng);
        layer.has_bias = bias;
        if (bias) layer.bias.assign(dims[l + 1], 0.0);
        layer.act = (l + 2 < dims.size()) ? hidden_act : Activation::Identity;
        p.layers.push_back(std::move(layer));
    }
    return p;
}

Matrix mlp_forward(const Mlp& p, const Matrix& x, MlpCache* cache) {
    if (!p.layers.empty() && x.cols != p.in_dim()) {
        throw Error("mlp_forward: input dim " + std::to_string(x.cols) + " does not match " +
                    std::to_string(p.in_dim()));
    }
    if (cache) {
        cache->input = x;
        cache->pre.clear();
        cache->post.clear();
    }
    Matrix h = x;
    for (const Layer& layer : p.layers) {
        Matrix pre = matmul(h, layer.weight);
        if (layer.has_bias) {
            for (std::size_t r = 0; r < pre.rows; ++r)
                for (std::size_t j = 0; j < pre.cols; ++j) pre.at(r, j) += layer.bias[j];
        }
        Matrix post = pre;
        if (layer.act == Activation::ReLU) {
            for (double& v : post.data) v = v > 0.0 ? v : 0.0;
        }
        if (cache) {
            cache->pre.push_back(std::move(pre));
            cache->post.push_back(post);
        }
        h = std::move(post);
    }
    return h;
}

MlpGrads mlp_backward(const Mlp& p, const MlpCache& cache, const Matrix& upstream) {
    MlpGrads g;
    g.weight.resize(p.layers.size());
    g.bias.resize(p.layers.size());
    Matrix delta = upstream;
    for (std::size_t li = p.layers.size(); li-- > 0;) {
        const Layer& layer = p.layers[li];
        if (layer.act == Activation::ReLU) {
            const Matrix& pre = cache.pre[li];
            for (std::size_t i = 0; i < delta.data.size(); ++i)
                if (pre.data[i] <= 0.0) delta.data[i] = 0.0;
        }
        const Matrix& input = (li == 0) ? cache.input : cache.post[li - 1];
        g.weight[li] = matmul_tn(input, delta);
        if (layer.has_bias) {
            g.bias[li].assign(layer.bias.size(), 0.0);
            for (std::size_t r = 0; r < delta.rows; ++r)
                for (std::size_t j = 0; j < delta.cols; ++j) g.bias[li][j] += delta.at(r, j);
        }
        delta = matmul_nt(delta, layer.weight);
    }
    g.input = std::move(delta);
    return g;
}

namespace {

double softplus(double x) { return std::log1p(std::exp(-std::abs(x))) + std::max(x, 0.0); }

std::vector<NodeId> all_rows(std::size_t n) {
    std::vector<NodeId> rows(n);
    std::iota(rows.begin(), rows.end(), 0u);
    return rows;
}

}  // namespace

LossResult loss_and_grad(LossKind kind, const Matrix& logits, const Matrix& target,
                         std::span<const NodeId> mask, bool want_target_grad) {
    if (!logits.same_shape(target)) throw Error("loss_and_grad: shape mismatch");
    if (mask.empty()) throw Error("loss_and_grad: empty mask");
    LossResult res;
    res.logit_grad = Matrix(logits.rows, logits.cols);
    if (want_target_grad) res.target_grad = Matrix(logits.rows, logits.cols);
    const double inv_m = 1.0 / static_cast<double>(mask.size());
    const std::size_t d = logits.cols;
    double total = 0.0;

    for (NodeId r : mask) {
        if (r >= logits.rows) throw Error("loss_and_grad: mask row out of range");
        const double* h = logits.data.data() + static_cast<std::size_t>(r) * d;
        const double* t = target.data.data() + static_cast<std::size_t>(r) * d;
        double* gh = res.logit_grad.data.data() + static_cast<std::size_t>(r) * d;
        double* gt = want_target_grad
                         ? res.target_grad.data.data() + static_cast<std::size_t>(r) * d
                         : nullptr;
        switch (kind) {
            case LossKind::SoftCrossEntropy: {
                double hi = h[0];
                for (std::size_t j = 1; j < d; ++j) hi = std::max(hi, h[j]);
                double z = 0.0;
                for (std::size_t j = 0; j < d; ++j) z += std::exp(h[j] - hi);
                const double lse = hi + std::log(z);
                double tsum = 0.0;
                for (std::size_t j = 0; j < d; ++j) {
                    const double logp = h[j] - lse;
                    total -= t[j] * logp;
                    tsum += t[j];
                    if (gt) gt[j] = -logp * inv_m;
                }
                for (std::size_t j = 0; j < d; ++j)
                    gh[j] = (tsum * std::exp(h[j] - lse) - t[j]) * inv_m;
                break;
            }
            case LossKind::BinaryCrossEntropy: {
                for (std::size_t j = 0; j < d; ++j) {
                    // -[t log s + (1-t) log(1-s)] = softplus(h) - t*h
                    total += softplus(h[j]) - t[j] * h[j];
                    const double s = 1.0 / (1.0 + std::exp(-h[j]));
                    gh[j] = (s - t[j]) * inv_m;
                    if (gt) gt[j] = -h[j] * inv_m;
                }
                break;
            }
            case LossKind::MeanSquared: {
                for (std::size_t j = 0; j < d; ++j) {
                    const double diff = h[j] - t[j];
                    total += diff * diff;
                    gh[j] = 2.0 * diff * inv_m;
                    if (gt) gt[j] = -2.0 * diff * inv_m;
                }
                break;
            }
        }
    }
    res.value = total * inv_m;
    return res;
}

LossResult loss_and_grad(LossKind kind, const Matrix& logits, const Matrix& target,
                         bool want_target_grad) {
    const std::vector<NodeId> mask = all_rows(logits.rows);
    return loss_and_grad(kind, logits, target, mask, want_target_grad);
}

AdamState make_adam_state(std::size_t dim) {
    return AdamState{std::vector<double>(dim, 0.0), std::vector<double>(dim, 0.0), 0};
}

void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads,
               const AdamConfig& cfg) {
    if (params.size() != grads.size() || params.size() != state.m.size())
        throw Error("adam_step: size mismatch");
    state.t += 1;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * grads[i];
        state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * grads[i] * grads[i];
        const double mhat = state.m[i] / bc1;
        const double vhat = state.v[i] / bc2;
        params[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
}

MlpAdam::MlpAdam(const Mlp& p) {
    for (const Layer& l : p.layers) {
        w.push_back(make_adam_state(l.weight.data.size()));
        b.push_back(make_adam_state(l.bias.size()));
    }
}

void MlpAdam::step(Mlp& p, const MlpGrads& g, const AdamConfig& cfg) {
    for (std::size_t li = 0; li < p.layers.size(); ++li) {
        adam_step(w[li], p.layers[li].weight.data, g.weight[li].data, cfg);
        if (p.layers[li].has_bias) adam_step(b[li], p.layers[li].bias, g.bias[li], cfg);
    }
}

namespace {
constexpr char kCkptMagic[5] = "LDCK";
constexpr std::uint32_t kCkptVersion = 1;
}  // namespace

void save_mlp(const std::string& path, const Mlp& p) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("save_mlp: cannot open " + path);
    bytes::write_magic(out, kCkptMagic);
    bytes::write_le<std::uint32_t>(out, kCkptVersion);
    bytes::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(p.layers.size()));
    for (const Layer& l : p.layers) {
        bytes::write_le<std::uint64_t>(out, l.weight.rows);
        bytes::write_le<std::uint64_t>(out, l.weight.cols);
        bytes::write_le<std::uint8_t>(out, static_cast<std::uint8_t>(l.act));
        bytes::write_le<std::uint8_t>(out, l.has_bias ? 1 : 0);
        bytes::write_array_le<double>(out, std::span<const double>(l.weight.data));
        if (l.has_bias) bytes::write_array_le<double>(out, std::span<const double>(l.bias));
    }
    if (!out) throw DataError("save_mlp: write failed for " + path);
}

Mlp load_mlp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("load_mlp: cannot open " + path);
    bytes::expect_magic(in, kCkptMagic, "load_mlp");
    const auto version = bytes::read_le<std::uint32_t>(in, "version");
    if (version != kCkptVersion)
        throw DataError("load_mlp: version " + std::to_string(version) + " unsupported");
    const auto n_layers = bytes::read_le<std::uint32_t>(in, "layer count");
    Mlp p;
    for (std::uint32_t li = 0; li < n_layers; ++li) {
        Layer l;
        const auto rows = bytes::read_le<std::uint64_t>(in, "rows");
        const auto cols = bytes::read_le<std::uint64_t>(in, "cols");
        l.act = static_cast<Activation>(bytes::read_le<std::uint8_t>(in, "activation"));
        l.has_bias = bytes::read_le<std::uint8_t>(in, "has_bias") != 0;
        l.weight = Matrix(rows, cols);
        l.weight.data = bytes::read_array_le<double>(in, rows * cols, "weights");
        if (l.has_bias) l.bias = bytes::read_array_le<double>(in, cols, "bias");
        p.layers.push_back(std::move(l));
    }
    return p;
}

Matrix sigmoid(const Matrix& logits) {
    Matrix out = logits;
    for (double& v : out.data) v = 1.0 / (1.0 + std::exp(-v));
    return out;
}

Matrix softmax_rows(const Matrix& logits) {
    Matrix out(logits.rows, logits.cols);
    for (std::size_t r = 0; r < logits.rows; ++r) {
        const std::vector<double> p = softmax(logits.row(r));
        for (std::size_t j = 0; j < logits.cols; ++j) out.at(r, j) = p[j];
    }
    return out;
}

}  // namespace ld
