#pragma once

#include <vector>

#include "ld/core.hpp"
#include "ld/graph.hpp"
#include "ld/nn.hpp"

namespace ld {

/// Polynomial filter coefficients; phi(A_hat) = sum_i coeffs[i] * A_hat^i.
struct FilterCoeffs {
    std::vector<double> coeffs;
    bool learnable = false;

    std::size_t hops() const { return coeffs.empty() ? 0 : coeffs.size() - 1; }
};

/// coeffs = e_N, fixed (an N-layer convolution with no skip terms).
FilterCoeffs gcn_power_filter(std::size_t n);

/// coeffs = 1/(N+1) everywhere, learnable and unconstrained.
FilterCoeffs learnable_poly_filter(std::size_t n);

struct SpectralGnnParams {
    FilterCoeffs filter;
    Mlp head;  // psi; empty = identity
};

struct FilterCache {
    std::vector<Matrix> powers;  // powers[i] = A_hat^i * m
};

/// sum_i c_i A_hat^i m via iterated spmm; A_hat^i is never materialized.
Matrix filter_apply(const NormalizedAdjacency& adj, const FilterCoeffs& c, const Matrix& m,
                    FilterCache* cache = nullptr);

struct GnnCache {
    MlpCache head;
    FilterCache filter;
};

/// H = phi(A_hat) psi(F).
Matrix gnn_forward(const Matrix& f, const NormalizedAdjacency& adj, const SpectralGnnParams& p,
                   GnnCache* cache = nullptr);

struct GnnGrads {
    std::vector<double> filter;  // d/d c_i, always computed
    MlpGrads head;               // head.input is the gradient w.r.t. F
};

/// Exact gradients of gnn_forward. adj_t must be transposed(adj).
GnnGrads gnn_backward(const SparseRowMatrix& adj_t, const SpectralGnnParams& p,
                      const GnnCache& cache, const Matrix& upstream);

void save_gnn_params(const std::string& path, const SpectralGnnParams& p);
SpectralGnnParams load_gnn_params(const std::string& path);

}  // namespace ld
