#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ld/core.hpp"
#include "ld/spectral.hpp"

namespace ld::oracle {

/// Thrown when a stated assumption of an oracle routine fails on the given
/// input (as opposed to a usage error). `which` names the failed assumption.
class PreconditionError : public Error {
public:
    PreconditionError(std::string which_, const std::string& msg)
        : Error(msg), which(std::move(which_)) {}
    std::string which;
};

/// Monic characteristic polynomial of det(lambda I - M):
/// coeffs[i] multiplies lambda^i, coeffs[n] = 1.
struct CharPoly {
    std::vector<double> coeffs;
};

/// Faddeev-LeVerrier trace recurrence. Guarded to n <= 64.
CharPoly char_poly(const Matrix& m);

/// M^-1 = -(1/p0) (p_n M^{n-1} + ... + p_2 M + p_1 I).
/// Throws PreconditionError("near-singular") reporting |p0| when tiny.
Matrix inverse_via_cayley(const Matrix& m);

/// Coefficients gamma (length n) with sum_i gamma_i A^i ~= phi(A)^-1,
/// solved by least squares in the Krylov basis {I, A, ..., A^{n-1}}.
std::vector<double> polynomial_inverse_coeffs(const FilterCoeffs& filter, const Matrix& adj_dense);

/// Solves phi(A) X = Y by dense factorization.
Matrix exact_inverse_labels(const FilterCoeffs& filter, const Matrix& adj_dense, const Matrix& y);

struct UniversalityFit {
    std::vector<double> theta;  // polynomial filter coefficients, degree < n
    std::vector<double> head;   // linear head W*
    double residual = 0.0;      // ||H - target||_2 with H rebuilt from theta
};

/// Fits filter coefficients and a linear head so the spectral model
/// reproduces an arbitrary one-dimensional target. Requires a symmetric
/// adjacency with distinct eigenvalues (min gap > 1e-8) and no missing
/// frequency; throws PreconditionError("multiple eigenvalues") or
/// PreconditionError("missing frequency") otherwise.
UniversalityFit universality_fit(const Matrix& adj_sym, const Matrix& features,
                                 std::span<const double> target, std::uint64_t seed = 0);

/// Minimum-norm least-squares solution of min ||a x - b||_F.
Matrix least_squares(const Matrix& a, const Matrix& b);

// Dense helpers shared with tests and the synthetic generator.
Matrix apply_matrix_poly(std::span<const double> coeffs, const Matrix& a);
Matrix dense_inverse(const Matrix& a);
Matrix dense_solve(const Matrix& a, const Matrix& b);
bool is_invertible(const Matrix& a);

/// Symmetric normalization D^-1/2 A D^-1/2 of a 0/1 adjacency.
Matrix sym_normalize_dense(const Matrix& adjacency);

}  // namespace ld::oracle
