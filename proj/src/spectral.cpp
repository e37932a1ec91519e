#include "ld/spectral.hpp"

#include <fstream>

#include "bytes.hpp"

namespace ld {

FilterCoeffs gcn_power_filter(std::size_t n) {
    FilterCoeffs c;
    c.coeffs.assign(n + 1, 0.0);
    c.coeffs[n] = 1.0;
    c.learnable = false;
    return c;
}

FilterCoeffs learnable_poly_filter(std::size_t n) {
    FilterCoeffs c;
    c.coeffs.assign(n + 1, 1.0 / static_cast<double>(n + 1));
    c.learnable = true;
    return c;
}

Matrix filter_apply(const NormalizedAdjacency& adj, const FilterCoeffs& c, const Matrix& m,
                    FilterCache* cache) {
    if (c.coeffs.empty()) throw Error("filter_apply: empty coefficient list");
    if (m.rows != adj.num_nodes)
        throw Error("filter_apply: matrix rows " + std::to_string(m.rows) +
                    " != num_nodes " + std::to_string(adj.num_nodes));
    if (cache) cache->powers.clear();
    Matrix acc(m.rows, m.cols);
    Matrix power = m;  // A_hat^0 m
    for (std::size_t i = 0; i < c.coeffs.size(); ++i) {
        if (i > 0) power = spmm(adj, power);
        if (c.coeffs[i] != 0.0) axpy(acc, c.coeffs[i], power);
        if (cache) cache->powers.push_back(power);
    }
    return acc;
}

Matrix gnn_forward(const Matrix& f, const NormalizedAdjacency& adj, const SpectralGnnParams& p,
                   GnnCache* cache) {
    Matrix z = mlp_forward(p.head, f, cache ? &cache->head : nullptr);
    return filter_apply(adj, p.filter, z, cache ? &cache->filter : nullptr);
}

GnnGrads gnn_backward(const SparseRowMatrix& adj_t, const SpectralGnnParams& p,
                      const GnnCache& cache, const Matrix& upstream) {
    const std::size_t n_coeffs = p.filter.coeffs.size();
    if (cache.filter.powers.size() != n_coeffs)
        throw Error("gnn_backward: cache does not match the filter");
    GnnGrads g;
    // d/dc_i = <A_hat^i psi(F), upstream>
    g.filter.assign(n_coeffs, 0.0);
    for (std::size_t i = 0; i < n_coeffs; ++i) {
        const Matrix& power = cache.filter.powers[i];
        double acc = 0.0;
        for (std::size_t k = 0; k < power.data.size(); ++k)
            acc += power.data[k] * upstream.data[k];
        g.filter[i] = acc;
    }
    // d/d psi(F) = sum_i c_i (A_hat^T)^i upstream
    Matrix dz(upstream.rows, upstream.cols);
    Matrix t = upstream;
    for (std::size_t i = 0; i < n_coeffs; ++i) {
        if (i > 0) t = spmm(adj_t, t);
        if (p.filter.coeffs[i] != 0.0) axpy(dz, p.filter.coeffs[i], t);
    }
    g.head = mlp_backward(p.head, cache.head, dz);
    return g;
}

namespace {
constexpr char kGnnMagic[5] = "LDGN";
constexpr std::uint32_t kGnnVersion = 1;
}  // namespace

void save_gnn_params(const std::string& path, const SpectralGnnParams& p) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("save_gnn_params: cannot open " + path);
    bytes::write_magic(out, kGnnMagic);
    bytes::write_le<std::uint32_t>(out, kGnnVersion);
    bytes::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(p.filter.coeffs.size()));
    bytes::write_le<std::uint8_t>(out, p.filter.learnable ? 1 : 0);
    bytes::write_array_le<double>(out, std::span<const double>(p.filter.coeffs));
    bytes::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(p.head.layers.size()));
    for (const Layer& l : p.head.layers) {
        bytes::write_le<std::uint64_t>(out, l.weight.rows);
        bytes::write_le<std::uint64_t>(out, l.weight.cols);
        bytes::write_le<std::uint8_t>(out, static_cast<std::uint8_t>(l.act));
        bytes::write_le<std::uint8_t>(out, l.has_bias ? 1 : 0);
        bytes::write_array_le<double>(out, std::span<const double>(l.weight.data));
        if (l.has_bias) bytes::write_array_le<double>(out, std::span<const double>(l.bias));
    }
    if (!out) throw DataError("save_gnn_params: write failed for " + path);
}

SpectralGnnParams load_gnn_params(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("load_gnn_params: cannot open " + path);
    bytes::expect_magic(in, kGnnMagic, "load_gnn_params");
    const auto version = bytes::read_le<std::uint32_t>(in, "version");
    if (version != kGnnVersion)
        throw DataError("load_gnn_params: version " + std::to_string(version) + " unsupported");
    SpectralGnnParams p;
    const auto n_coeffs = bytes::read_le<std::uint32_t>(in, "coeff count");
    p.filter.learnable = bytes::read_le<std::uint8_t>(in, "learnable") != 0;
    p.filter.coeffs = bytes::read_array_le<double>(in, n_coeffs, "coeffs");
    const auto n_layers = bytes::read_le<std::uint32_t>(in, "layer count");
    for (std::uint32_t li = 0; li < n_layers; ++li) {
        Layer l;
        const auto rows = bytes::read_le<std::uint64_t>(in, "rows");
        const auto cols = bytes::read_le<std::uint64_t>(in, "cols");
        l.act = static_cast<Activation>(bytes::read_le<std::uint8_t>(in, "activation"));
        l.has_bias = bytes::read_le<std::uint8_t>(in, "has_bias") != 0;
        l.weight = Matrix(rows, cols);
        l.weight.data = bytes::read_array_le<double>(in, rows * cols, "weights");
        if (l.has_bias) l.bias = bytes::read_array_le<double>(in, cols, "bias");
        p.head.layers.push_back(std::move(l));
    }
    return p;
}

}  // namespace ld
