#include "ld/core.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <thread>

namespace ld {

namespace {
std::atomic<unsigned> g_threads{1};

void check_mul(std::size_t inner_a, std::size_t inner_b, const char* what) {
    if (inner_a != inner_b) {
        throw Error(std::string(what) + ": inner dimensions " + std::to_string(inner_a) +
                    " and " + std::to_string(inner_b) + " do not match");
    }
}
}  // namespace

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
}

void set_thread_count(unsigned n) { g_threads.store(n == 0 ? 1 : n); }

unsigned thread_count() { return g_threads.load(); }

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
    const unsigned want = thread_count();
    if (want <= 1 || n < 1024) {
        fn(0, n);
        return;
    }
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(want, n));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned t = 0; t < workers; ++t) {
        const std::size_t lo = t * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
    }
    for (auto& th : pool) th.join();
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    check_mul(a.cols, b.rows, "matmul");
    Matrix c(a.rows, b.cols);
    parallel_for(a.rows, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            double* out = c.data.data() + i * c.cols;
            const double* arow = a.data.data() + i * a.cols;
            for (std::size_t k = 0; k < a.cols; ++k) {
                const double aik = arow[k];
                if (aik == 0.0) continue;
                const double* brow = b.data.data() + k * b.cols;
                for (std::size_t j = 0; j < b.cols; ++j) out[j] += aik * brow[j];
            }
        }
    });
    return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
    check_mul(a.rows, b.rows, "matmul_tn");
    Matrix c(a.cols, b.cols);
    parallel_for(a.cols, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            double* out = c.data.data() + i * c.cols;
            for (std::size_t k = 0; k < a.rows; ++k) {
                const double aki = a.at(k, i);
                if (aki == 0.0) continue;
                const double* brow = b.data.data() + k * b.cols;
                for (std::size_t j = 0; j < b.cols; ++j) out[j] += aki * brow[j];
            }
        }
    });
    return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
    check_mul(a.cols, b.cols, "matmul_nt");
    Matrix c(a.rows, b.rows);
    parallel_for(a.rows, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const double* arow = a.data.data() + i * a.cols;
            for (std::size_t j = 0; j < b.rows; ++j) {
                const double* brow = b.data.data() + j * b.cols;
                double acc = 0.0;
                for (std::size_t k = 0; k < a.cols; ++k) acc += arow[k] * brow[k];
                c.at(i, j) = acc;
            }
        }
    });
    return c;
}

Matrix transpose(const Matrix& m) {
    Matrix t(m.cols, m.rows);
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = 0; j < m.cols; ++j) t.at(j, i) = m.at(i, j);
    return t;
}

void axpy(Matrix& y, double alpha, const Matrix& x) {
    if (!y.same_shape(x)) throw Error("axpy: shape mismatch");
    for (std::size_t i = 0; i < y.data.size(); ++i) y.data[i] += alpha * x.data[i];
}

void scale(Matrix& m, double alpha) {
    for (double& v : m.data) v *= alpha;
}

Matrix lincomb(const Matrix& a, const Matrix& b, double alpha) {
    if (!a.same_shape(b)) throw Error("lincomb: shape mismatch");
    Matrix out(a.rows, a.cols);
    for (std::size_t i = 0; i < out.data.size(); ++i)
        out.data[i] = (1.0 - alpha) * a.data[i] + alpha * b.data[i];
    return out;
}

double frobenius_norm(const Matrix& m) {
    double acc = 0.0;
    for (double v : m.data) acc += v * v;
    return std::sqrt(acc);
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) throw Error("max_abs_diff: shape mismatch");
    double worst = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i)
        worst = std::max(worst, std::abs(a.data[i] - b.data[i]));
    return worst;
}

bool all_finite(const Matrix& m) {
    for (double v : m.data)
        if (!std::isfinite(v)) return false;
    return true;
}

bool bitwise_equal(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) return false;
    return std::memcmp(a.data.data(), b.data.data(), a.data.size() * sizeof(double)) == 0;
}

Matrix gather_rows(const Matrix& m, std::span<const std::uint32_t> rows) {
    Matrix out(rows.size(), m.cols);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r] >= m.rows)
            throw Error("gather_rows: index " + std::to_string(rows[r]) + " out of range");
        std::memcpy(out.data.data() + r * m.cols, m.data.data() + rows[r] * m.cols,
                    m.cols * sizeof(double));
    }
    return out;
}

std::vector<double> softmax(std::span<const double> logits) {
    std::vector<double> out(logits.size());
    if (logits.empty()) return out;
    double hi = logits[0];
    for (double v : logits) hi = std::max(hi, v);
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out[i] = std::exp(logits[i] - hi);
        sum += out[i];
    }
    for (double& v : out) v /= sum;
    return out;
}

}  // namespace ld
