#include "srrc/kernels.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace srrc::kernels {

namespace {

// Fixed decomposition of [0, n) into kReduceBlocks contiguous blocks.
// Partial sums are computed per block and combined in block order, so the
// result is the same no matter how many threads run the blocks.
template <typename BlockFn>
double blocked_reduce(std::size_t n, BlockFn&& block_fn) {
    if (n == 0) return 0.0;
    const std::size_t nb = std::min<std::size_t>(kReduceBlocks, n);
    std::vector<double> partial(nb, 0.0);
#pragma omp parallel for schedule(static) if (n >= kParallelGrain)
    for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nb); ++b) {
        const std::size_t lo = n * static_cast<std::size_t>(b) / nb;
        const std::size_t hi = n * (static_cast<std::size_t>(b) + 1) / nb;
        partial[static_cast<std::size_t>(b)] = block_fn(lo, hi);
    }
    double s = 0.0;
    for (double p : partial) s += p;
    return s;
}

} // namespace

void dense_matvec_serial(std::span<const double> A, std::span<const double> x,
                         std::span<double> y, std::size_t rows, std::size_t cols) {
    assert(A.size() == rows * cols && x.size() == cols && y.size() == rows);
    for (std::size_t i = 0; i < rows; ++i) {
        const double* row = A.data() + i * cols;
        double acc = 0.0;
        for (std::size_t j = 0; j < cols; ++j) acc += row[j] * x[j];
        y[i] = acc;
    }
}

void dense_matvec(std::span<const double> A, std::span<const double> x,
                  std::span<double> y, std::size_t rows, std::size_t cols) {
    assert(A.size() == rows * cols && x.size() == cols && y.size() == rows);
#pragma omp parallel for schedule(static) if (rows * cols >= kParallelGrain)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(rows); ++i) {
        const double* row = A.data() + static_cast<std::size_t>(i) * cols;
        double acc = 0.0;
        for (std::size_t j = 0; j < cols; ++j) acc += row[j] * x[j];
        y[static_cast<std::size_t>(i)] = acc;
    }
}

CsrMatrix CsrMatrix::from_dense(std::span<const double> A, std::size_t rows,
                                std::size_t cols) {
    assert(A.size() == rows * cols);
    CsrMatrix m;
    m.rows = rows;
    m.cols = cols;
    m.row_ptr.resize(rows + 1, 0);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            if (A[i * cols + j] != 0.0) {
                m.col_idx.push_back(j);
                m.values.push_back(A[i * cols + j]);
            }
        }
        m.row_ptr[i + 1] = m.values.size();
    }
    return m;
}

double CsrMatrix::density() const {
    if (rows == 0 || cols == 0) return 0.0;
    return static_cast<double>(values.size()) /
           (static_cast<double>(rows) * static_cast<double>(cols));
}

void csr_matvec_serial(const CsrMatrix& A, std::span<const double> x,
                       std::span<double> y) {
    assert(x.size() == A.cols && y.size() == A.rows);
    for (std::size_t i = 0; i < A.rows; ++i) {
        double acc = 0.0;
        for (std::size_t p = A.row_ptr[i]; p < A.row_ptr[i + 1]; ++p)
            acc += A.values[p] * x[A.col_idx[p]];
        y[i] = acc;
    }
}

void csr_matvec(const CsrMatrix& A, std::span<const double> x, std::span<double> y) {
    assert(x.size() == A.cols && y.size() == A.rows);
#pragma omp parallel for schedule(static) if (A.values.size() >= kParallelGrain)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(A.rows); ++i) {
        const std::size_t ii = static_cast<std::size_t>(i);
        double acc = 0.0;
        for (std::size_t p = A.row_ptr[ii]; p < A.row_ptr[ii + 1]; ++p)
            acc += A.values[p] * x[A.col_idx[p]];
        y[ii] = acc;
    }
}

void leaky_tanh_step_serial(std::span<const double> x_prev,
                            std::span<const double> pre, double alpha,
                            std::span<double> x_out) {
    assert(x_prev.size() == pre.size() && pre.size() == x_out.size());
    const double keep = 1.0 - alpha;
    for (std::size_t i = 0; i < pre.size(); ++i)
        x_out[i] = keep * x_prev[i] + alpha * std::tanh(pre[i]);
}

void leaky_tanh_step(std::span<const double> x_prev, std::span<const double> pre,
                     double alpha, std::span<double> x_out) {
    assert(x_prev.size() == pre.size() && pre.size() == x_out.size());
    const double keep = 1.0 - alpha;
    const std::size_t n = pre.size();
#pragma omp parallel for schedule(static) if (n >= kParallelGrain)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
        const std::size_t ii = static_cast<std::size_t>(i);
        x_out[ii] = keep * x_prev[ii] + alpha * std::tanh(pre[ii]);
    }
}

void linear_margins_serial(std::span<const double> X, std::size_t n_rows,
                           std::size_t dim, std::span<const double> w, double b,
                           std::span<double> z) {
    assert(X.size() == n_rows * dim && w.size() == dim && z.size() == n_rows);
    for (std::size_t t = 0; t < n_rows; ++t) {
        const double* row = X.data() + t * dim;
        double acc = b;
        for (std::size_t j = 0; j < dim; ++j) acc += w[j] * row[j];
        z[t] = acc;
    }
}

void linear_margins(std::span<const double> X, std::size_t n_rows, std::size_t dim,
                    std::span<const double> w, double b, std::span<double> z) {
    assert(X.size() == n_rows * dim && w.size() == dim && z.size() == n_rows);
#pragma omp parallel for schedule(static) if (n_rows * dim >= kParallelGrain)
    for (std::ptrdiff_t t = 0; t < static_cast<std::ptrdiff_t>(n_rows); ++t) {
        const double* row = X.data() + static_cast<std::size_t>(t) * dim;
        double acc = b;
        for (std::size_t j = 0; j < dim; ++j) acc += w[j] * row[j];
        z[static_cast<std::size_t>(t)] = acc;
    }
}

double block_sum_serial(std::span<const double> v) {
    const std::size_t n = v.size();
    if (n == 0) return 0.0;
    const std::size_t nb = std::min<std::size_t>(kReduceBlocks, n);
    double s = 0.0;
    for (std::size_t b = 0; b < nb; ++b) {
        const std::size_t lo = n * b / nb;
        const std::size_t hi = n * (b + 1) / nb;
        double p = 0.0;
        for (std::size_t i = lo; i < hi; ++i) p += v[i];
        s += p;
    }
    return s;
}

double block_sum(std::span<const double> v) {
    return blocked_reduce(v.size(), [&](std::size_t lo, std::size_t hi) {
        double p = 0.0;
        for (std::size_t i = lo; i < hi; ++i) p += v[i];
        return p;
    });
}

void weighted_feature_sum_serial(std::span<const double> X, std::size_t n_rows,
                                 std::size_t dim, std::span<const double> r,
                                 std::span<double> g) {
    assert(X.size() == n_rows * dim && r.size() == n_rows && g.size() == dim);
    if (n_rows == 0) return;
    const std::size_t nb = std::min<std::size_t>(kReduceBlocks, n_rows);
    std::vector<double> partial(nb * dim, 0.0);
    for (std::size_t b = 0; b < nb; ++b) {
        const std::size_t lo = n_rows * b / nb;
        const std::size_t hi = n_rows * (b + 1) / nb;
        double* gp = partial.data() + b * dim;
        for (std::size_t t = lo; t < hi; ++t) {
            const double* row = X.data() + t * dim;
            const double rt = r[t];
            for (std::size_t j = 0; j < dim; ++j) gp[j] += rt * row[j];
        }
    }
    for (std::size_t b = 0; b < nb; ++b) {
        const double* gp = partial.data() + b * dim;
        for (std::size_t j = 0; j < dim; ++j) g[j] += gp[j];
    }
}

void weighted_feature_sum(std::span<const double> X, std::size_t n_rows,
                          std::size_t dim, std::span<const double> r,
                          std::span<double> g) {
    assert(X.size() == n_rows * dim && r.size() == n_rows && g.size() == dim);
    if (n_rows == 0) return;
    const std::size_t nb = std::min<std::size_t>(kReduceBlocks, n_rows);
    std::vector<double> partial(nb * dim, 0.0);
#pragma omp parallel for schedule(static) if (n_rows * dim >= kParallelGrain)
    for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nb); ++b) {
        const std::size_t bb = static_cast<std::size_t>(b);
        const std::size_t lo = n_rows * bb / nb;
        const std::size_t hi = n_rows * (bb + 1) / nb;
        double* gp = partial.data() + bb * dim;
        for (std::size_t t = lo; t < hi; ++t) {
            const double* row = X.data() + t * dim;
            const double rt = r[t];
            for (std::size_t j = 0; j < dim; ++j) gp[j] += rt * row[j];
        }
    }
    for (std::size_t b = 0; b < nb; ++b) {
        const double* gp = partial.data() + b * dim;
        for (std::size_t j = 0; j < dim; ++j) g[j] += gp[j];
    }
}

std::vector<double> moving_average_replicate(std::span<const double> v,
                                             std::size_t q) {
    if (q == 0) throw std::invalid_argument("moving_average_replicate: q must be >= 1");
    const std::size_t n = v.size();
    if (n == 0) return {};
    q = std::min(q, n);
    // window [i - (q-1)/2, i + q/2], indices clamped to [0, n-1]
    const std::ptrdiff_t left = static_cast<std::ptrdiff_t>((q - 1) / 2);
    const std::ptrdiff_t right = static_cast<std::ptrdiff_t>(q / 2);
    std::vector<double> out(n);
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
        double acc = 0.0;
        for (std::ptrdiff_t k = i - left; k <= i + right; ++k) {
            const std::ptrdiff_t idx =
                std::clamp<std::ptrdiff_t>(k, 0, static_cast<std::ptrdiff_t>(n) - 1);
            acc += v[static_cast<std::size_t>(idx)];
        }
        out[static_cast<std::size_t>(i)] = acc / static_cast<double>(q);
    }
    return out;
}

} // namespace srrc::kernels
