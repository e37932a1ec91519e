#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ld {

/// Base error for all structured failures in this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid configuration (CLI maps this to exit code 2).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Missing or malformed input data (exit code 3).
class DataError : public Error {
public:
    using Error::Error;
};

/// Non-finite values detected during computation (exit code 4).
class NumericError : public Error {
public:
    using Error::Error;
};

/// Dense row-major matrix of doubles.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
    std::span<const double> row(std::size_t r) const {
        return {data.data() + r * cols, cols};
    }

    bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
    bool empty() const { return rows == 0 || cols == 0; }

    static Matrix identity(std::size_t n);
};

Matrix matmul(const Matrix& a, const Matrix& b);     // a * b
Matrix matmul_tn(const Matrix& a, const Matrix& b);  // a^T * b
Matrix matmul_nt(const Matrix& a, const Matrix& b);  // a * b^T
Matrix transpose(const Matrix& m);

/// y += alpha * x (shapes must match).
void axpy(Matrix& y, double alpha, const Matrix& x);
void scale(Matrix& m, double alpha);

/// out = (1 - alpha) * a + alpha * b.
Matrix lincomb(const Matrix& a, const Matrix& b, double alpha);

double frobenius_norm(const Matrix& m);
double max_abs_diff(const Matrix& a, const Matrix& b);
bool all_finite(const Matrix& m);
bool bitwise_equal(const Matrix& a, const Matrix& b);

/// Gathers the given rows of m into a new |rows| x cols matrix.
Matrix gather_rows(const Matrix& m, std::span<const std::uint32_t> rows);

std::vector<double> softmax(std::span<const double> logits);

/// Worker cap for row-parallel kernels. Results never depend on it; rows are
/// statically partitioned and each output row is owned by exactly one worker.
void set_thread_count(unsigned n);
unsigned thread_count();

/// Runs fn(begin, end) over a static partition of [0, n).
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace ld
