#include "ld/oracle.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>

namespace ld::oracle {

namespace {

using EMat = Eigen::MatrixXd;
using EVec = Eigen::VectorXd;

EMat to_eigen(const Matrix& m) {
    EMat e(m.rows, m.cols);
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = 0; j < m.cols; ++j) e(i, j) = m.at(i, j);
    return e;
}

Matrix from_eigen(const EMat& e) {
    Matrix m(e.rows(), e.cols());
    for (Eigen::Index i = 0; i < e.rows(); ++i)
        for (Eigen::Index j = 0; j < e.cols(); ++j) m.at(i, j) = e(i, j);
    return m;
}

void require_square(const Matrix& m, const char* what) {
    if (m.rows != m.cols)
        throw Error(std::string(what) + ": matrix is " + std::to_string(m.rows) + "x" +
                    std::to_string(m.cols) + ", expected square");
}

}  // namespace

CharPoly char_poly(const Matrix& m) {
    require_square(m, "char_poly");
    const std::size_t n = m.rows;
    if (n > 64) throw Error("char_poly: n = " + std::to_string(n) + " exceeds the n <= 64 guard");
    const EMat a = to_eigen(m);
    CharPoly p;
    p.coeffs.assign(n + 1, 0.0);
    p.coeffs[n] = 1.0;
    // A_1 = A, c_{n-1} = -tr(A_1); A_k = A (A_{k-1} + c_{n-k+1} I), c_{n-k} = -tr(A_k)/k.
    EMat ak = a;
    for (std::size_t k = 1; k <= n; ++k) {
        if (k > 1) ak = a * (ak + p.coeffs[n - k + 1] * EMat::Identity(n, n));
        p.coeffs[n - k] = -ak.trace() / static_cast<double>(k);
    }
    return p;
}

Matrix inverse_via_cayley(const Matrix& m) {
    require_square(m, "inverse_via_cayley");
    const std::size_t n = m.rows;
    const CharPoly p = char_poly(m);
    const double p0 = p.coeffs[0];
    if (std::abs(p0) <= 1e-12) {
        throw PreconditionError("near-singular", "inverse_via_cayley: |p0| = " +
                                                     std::to_string(std::abs(p0)) +
                                                     ", matrix is (near-)singular");
    }
    const EMat a = to_eigen(m);
    // Horner over p_n M^{n-1} + ... + p_1 I.
    EMat acc = p.coeffs[n] * EMat::Identity(n, n);
    for (std::size_t k = n - 1; k >= 1; --k)
        acc = a * acc + p.coeffs[k] * EMat::Identity(n, n);
    return from_eigen(EMat(-acc / p0));
}

Matrix apply_matrix_poly(std::span<const double> coeffs, const Matrix& a) {
    require_square(a, "apply_matrix_poly");
    if (coeffs.empty()) throw Error("apply_matrix_poly: empty coefficient list");
    const std::size_t n = a.rows;
    const EMat ea = to_eigen(a);
    EMat acc = coeffs[coeffs.size() - 1] * EMat::Identity(n, n);
    for (std::size_t i = coeffs.size() - 1; i-- > 0;)
        acc = ea * acc + coeffs[i] * EMat::Identity(n, n);
    return from_eigen(acc);
}

Matrix dense_inverse(const Matrix& a) {
    require_square(a, "dense_inverse");
    Eigen::FullPivLU<EMat> lu(to_eigen(a));
    if (!lu.isInvertible()) throw PreconditionError("singular", "dense_inverse: singular matrix");
    return from_eigen(lu.inverse());
}

Matrix dense_solve(const Matrix& a, const Matrix& b) {
    require_square(a, "dense_solve");
    if (b.rows != a.rows) throw Error("dense_solve: rhs rows mismatch");
    Eigen::FullPivLU<EMat> lu(to_eigen(a));
    if (!lu.isInvertible()) throw PreconditionError("singular", "dense_solve: singular matrix");
    return from_eigen(lu.solve(to_eigen(b)));
}

bool is_invertible(const Matrix& a) {
    if (a.rows != a.cols) return false;
    Eigen::FullPivLU<EMat> lu(to_eigen(a));
    return lu.isInvertible();
}

std::vector<double> polynomial_inverse_coeffs(const FilterCoeffs& filter,
                                              const Matrix& adj_dense) {
    require_square(adj_dense, "polynomial_inverse_coeffs");
    const std::size_t n = adj_dense.rows;
    const Matrix phi = apply_matrix_poly(filter.coeffs, adj_dense);
    const Matrix phi_inv = dense_inverse(phi);  // throws on singular phi

    // Least squares over vec(A^i), i = 0..n-1 (Krylov basis).
    EMat basis(n * n, n);
    const EMat ea = to_eigen(adj_dense);
    EMat power = EMat::Identity(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) power = ea * power;
        basis.col(i) = Eigen::Map<const EVec>(power.data(), n * n);
    }
    const EMat target_mat = to_eigen(phi_inv);
    const EVec target = Eigen::Map<const EVec>(target_mat.data(), n * n);
    const EVec gamma = basis.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(target);
    return std::vector<double>(gamma.data(), gamma.data() + n);
}

Matrix exact_inverse_labels(const FilterCoeffs& filter, const Matrix& adj_dense,
                            const Matrix& y) {
    const Matrix phi = apply_matrix_poly(filter.coeffs, adj_dense);
    return dense_solve(phi, y);
}

UniversalityFit universality_fit(const Matrix& adj_sym, const Matrix& features,
                                 std::span<const double> target, std::uint64_t seed) {
    require_square(adj_sym, "universality_fit");
    const std::size_t n = adj_sym.rows;
    if (features.rows != n || target.size() != n)
        throw Error("universality_fit: features/target size mismatch");
    const EMat a = to_eigen(adj_sym);
    if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw Error("universality_fit: adjacency is not symmetric");

    Eigen::SelfAdjointEigenSolver<EMat> eig(a);
    const EVec lambda = eig.eigenvalues();
    const EMat u = eig.eigenvectors();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double gap = lambda(i + 1) - lambda(i);
        if (gap <= 1e-8) {
            throw PreconditionError(
                "multiple eigenvalues",
                "universality_fit: eigenvalues " + std::to_string(i) + " and " +
                    std::to_string(i + 1) + " differ by " + std::to_string(gap));
        }
    }
    const EMat f = to_eigen(features);
    const EMat ft = u.transpose() * f;  // frequency components of the features
    for (std::size_t i = 0; i < n; ++i) {
        if (ft.row(i).norm() <= 1e-10) {
            throw PreconditionError("missing frequency",
                                    "universality_fit: features contain no component along "
                                    "eigenvector " +
                                        std::to_string(i));
        }
    }

    // W* outside the union of the null hyperplanes {W : (ft W)_i = 0}.
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    EVec w(features.cols);
    EVec fw;
    bool found = false;
    for (int attempt = 0; attempt < 64 && !found; ++attempt) {
        for (Eigen::Index j = 0; j < w.size(); ++j) w(j) = dist(rng);
        fw = ft * w;
        found = (fw.cwiseAbs().minCoeff() > 1e-10);
    }
    if (!found) throw Error("universality_fit: failed to sample W* clear of null hyperplanes");

    const EVec y = Eigen::Map<const EVec>(target.data(), n);
    const EVec r = (u.transpose() * y).cwiseQuotient(fw);

    // Newton interpolation through (lambda_i, r_i), then expand to monomials.
    std::vector<double> divided(r.data(), r.data() + n);
    for (std::size_t level = 1; level < n; ++level)
        for (std::size_t i = n - 1; i >= level; --i)
            divided[i] = (divided[i] - divided[i - 1]) / (lambda(i) - lambda(i - level));
    std::vector<double> theta(n, 0.0);
    std::vector<double> newton_basis(n, 0.0);  // coefficients of prod (x - lambda_j)
    newton_basis[0] = 1.0;
    std::size_t basis_degree = 0;
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t j = 0; j <= basis_degree; ++j) theta[j] += divided[k] * newton_basis[j];
        if (k + 1 < n) {
            // newton_basis *= (x - lambda_k)
            for (std::size_t j = basis_degree + 1; j-- > 0;) {
                const double keep = newton_basis[j];
                newton_basis[j] = -lambda(k) * keep + (j > 0 ? newton_basis[j - 1] : 0.0);
                if (j == basis_degree) newton_basis[j + 1] = keep;
            }
            ++basis_degree;
        }
    }

    UniversalityFit fit;
    fit.theta = theta;
    fit.head.assign(w.data(), w.data() + w.size());
    const Matrix h = apply_matrix_poly(fit.theta, adj_sym);
    const EVec pred = to_eigen(h) * (f * w);
    fit.residual = (pred - y).norm();
    return fit;
}

Matrix least_squares(const Matrix& a, const Matrix& b) {
    if (a.rows != b.rows) throw Error("least_squares: row counts differ");
    const EMat sol =
        to_eigen(a).bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(to_eigen(b));
    return from_eigen(sol);
}

Matrix sym_normalize_dense(const Matrix& adjacency) {
    require_square(adjacency, "sym_normalize_dense");
    const std::size_t n = adjacency.rows;
    std::vector<double> dinv_sqrt(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double deg = 0.0;
        for (std::size_t j = 0; j < n; ++j) deg += adjacency.at(i, j);
        dinv_sqrt[i] = deg > 0.0 ? 1.0 / std::sqrt(deg) : 0.0;
    }
    Matrix out(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            out.at(i, j) = dinv_sqrt[i] * adjacency.at(i, j) * dinv_sqrt[j];
    return out;
}

}  // namespace ld::oracle
