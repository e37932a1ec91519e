#include "ld/labelops.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "bytes.hpp"

namespace ld {

HopLabelStack precompute_hop_labels(const NormalizedAdjacency& adj, const Matrix& y,
                                    std::size_t n_hops) {
    if (y.rows != adj.num_nodes) {
        throw Error("precompute_hop_labels: labels have " + std::to_string(y.rows) +
                    " rows, graph has " + std::to_string(adj.num_nodes) + " nodes");
    }
    HopLabelStack stack;
    stack.hops.reserve(n_hops + 1);
    stack.hops.push_back(y);
    for (std::size_t i = 0; i < n_hops; ++i) stack.hops.push_back(spmm(adj, stack.hops.back()));
    return stack;
}

DeconvWeights deconv_init(std::size_t n_hops) {
    return DeconvWeights{std::vector<double>(n_hops + 1, 0.0)};
}

std::vector<double> deconv_coeffs(const DeconvWeights& w) { return softmax(w.raw); }

Matrix inverse_labels(const HopLabelStack& stack, std::span<const NodeId> batch,
                      const DeconvWeights& w) {
    if (w.raw.size() != stack.hops.size())
        throw Error("inverse_labels: weight count does not match hop count");
    const std::vector<double> g = softmax(w.raw);
    const std::size_t d = stack.dim();
    Matrix out(batch.size(), d);
    for (std::size_t b = 0; b < batch.size(); ++b) {
        const NodeId node = batch[b];
        if (node >= stack.num_nodes())
            throw Error("inverse_labels: node " + std::to_string(node) + " out of range");
        double* dst = out.data.data() + b * d;
        for (std::size_t i = 0; i < stack.hops.size(); ++i) {
            const double* src = stack.hops[i].data.data() + static_cast<std::size_t>(node) * d;
            const double gi = g[i];
            for (std::size_t j = 0; j < d; ++j) dst[j] += gi * src[j];
        }
    }
    return out;
}

std::vector<double> inverse_labels_grad(const HopLabelStack& stack,
                                        std::span<const NodeId> batch, const DeconvWeights& w,
                                        const Matrix& upstream) {
    if (upstream.rows != batch.size() || upstream.cols != stack.dim())
        throw Error("inverse_labels_grad: upstream shape mismatch");
    const std::vector<double> g = softmax(w.raw);
    const std::size_t d = stack.dim();
    std::vector<double> dg(g.size(), 0.0);
    for (std::size_t i = 0; i < stack.hops.size(); ++i) {
        double acc = 0.0;
        for (std::size_t b = 0; b < batch.size(); ++b) {
            const double* k = stack.hops[i].data.data() + static_cast<std::size_t>(batch[b]) * d;
            const double* u = upstream.data.data() + b * d;
            for (std::size_t j = 0; j < d; ++j) acc += k[j] * u[j];
        }
        dg[i] = acc;
    }
    // Softmax backward: draw_i = g_i * (dg_i - sum_j g_j dg_j).
    double dot = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) dot += g[i] * dg[i];
    std::vector<double> draw(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) draw[i] = g[i] * (dg[i] - dot);
    return draw;
}

Matrix normalize_target(const Matrix& t, TaskKind task) {
    Matrix out = t;
    if (task == TaskKind::MultiLabelBinary) {
        for (double& v : out.data) v = std::clamp(v, 0.0, 1.0);
        return out;
    }
    for (std::size_t r = 0; r < t.rows; ++r) {
        double sum = 0.0;
        for (double v : t.row(r)) sum += v;
        if (!(sum > 0.0)) {
            throw Error("normalize_target: row " + std::to_string(r) + " sums to " +
                        std::to_string(sum) + "; labels are corrupt");
        }
        for (double& v : out.row(r)) v /= sum;
    }
    return out;
}

Matrix normalize_target_backward(const Matrix& t, TaskKind task, const Matrix& upstream) {
    if (!t.same_shape(upstream)) throw Error("normalize_target_backward: shape mismatch");
    Matrix grad(t.rows, t.cols);
    if (task == TaskKind::MultiLabelBinary) {
        for (std::size_t i = 0; i < t.data.size(); ++i)
            grad.data[i] = (t.data[i] >= 0.0 && t.data[i] <= 1.0) ? upstream.data[i] : 0.0;
        return grad;
    }
    for (std::size_t r = 0; r < t.rows; ++r) {
        double sum = 0.0, updot = 0.0;
        for (std::size_t j = 0; j < t.cols; ++j) sum += t.at(r, j);
        for (std::size_t j = 0; j < t.cols; ++j) updot += upstream.at(r, j) * t.at(r, j);
        // d(v_j / s)/dv_k = delta_jk / s - v_j / s^2
        for (std::size_t j = 0; j < t.cols; ++j)
            grad.at(r, j) = (upstream.at(r, j) - updot / sum) / sum;
    }
    return grad;
}

Matrix mixed_target(const Matrix& y_rows, const Matrix& yinv, double alpha, TaskKind task) {
    if (alpha < 0.0 || alpha > 1.0)
        throw ConfigError("mixed_target: alpha = " + std::to_string(alpha) + " outside [0, 1]");
    if (!y_rows.same_shape(yinv)) throw Error("mixed_target: shape mismatch");
    return lincomb(y_rows, normalize_target(yinv, task), alpha);
}

namespace {
constexpr char kStackMagic[5] = "LDHS";
constexpr std::uint32_t kStackVersion = 1;
}  // namespace

void save_hop_stack(const std::string& path, const HopLabelStack& stack) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("save_hop_stack: cannot open " + path);
    bytes::write_magic(out, kStackMagic);
    bytes::write_le<std::uint32_t>(out, kStackVersion);
    bytes::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(stack.n_hops()));
    bytes::write_le<std::uint64_t>(out, stack.num_nodes());
    bytes::write_le<std::uint64_t>(out, stack.dim());
    bytes::write_le<std::uint8_t>(out, sizeof(double));
    for (const Matrix& block : stack.hops)
        bytes::write_array_le<double>(out, std::span<const double>(block.data));
    if (!out) throw DataError("save_hop_stack: write failed for " + path);
}

HopLabelStack load_hop_stack(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("load_hop_stack: cannot open " + path);
    bytes::expect_magic(in, kStackMagic, "load_hop_stack");
    const auto version = bytes::read_le<std::uint32_t>(in, "version");
    if (version != kStackVersion) {
        throw DataError("load_hop_stack: version " + std::to_string(version) +
                        " unsupported (expected " + std::to_string(kStackVersion) + ")");
    }
    const auto n_hops = bytes::read_le<std::uint32_t>(in, "n_hops");
    const auto num_nodes = bytes::read_le<std::uint64_t>(in, "num_nodes");
    const auto dim = bytes::read_le<std::uint64_t>(in, "dim");
    const auto width = bytes::read_le<std::uint8_t>(in, "element width");
    if (width != sizeof(double))
        throw DataError("load_hop_stack: unsupported element width " + std::to_string(width));
    HopLabelStack stack;
    for (std::uint32_t i = 0; i <= n_hops; ++i) {
        Matrix block(num_nodes, dim);
        block.data = bytes::read_array_le<double>(in, num_nodes * dim, "hop block");
        stack.hops.push_back(std::move(block));
    }
    return stack;
}

}  // namespace ld
