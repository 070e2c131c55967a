#pragma once

#include <cstddef>
#include <span>
#include <vector>

// Data-parallel inner loops used by the saliency, reservoir, and readout
// stages. Each kernel has an OpenMP version (the production path) and a
// plain serial reference kept for testing and benchmarking.
//
// Determinism contract: the parallel versions produce bitwise-identical
// results to their reference for any thread count. Elementwise kernels get
// this for free (one thread owns each output element); reductions use a
// fixed block decomposition that does not depend on the thread count, so
// their summation order is frozen. block_sum/grad kernels therefore differ
// from a naive left-to-right sum in the last ulps but never between runs.

namespace srrc::kernels {

inline constexpr std::size_t kParallelGrain = 1u << 15;
inline constexpr std::size_t kReduceBlocks = 64;

/// y = A * x for row-major dense A (rows x cols).
void dense_matvec(std::span<const double> A, std::span<const double> x,
                  std::span<double> y, std::size_t rows, std::size_t cols);
void dense_matvec_serial(std::span<const double> A, std::span<const double> x,
                         std::span<double> y, std::size_t rows, std::size_t cols);

/// Compressed sparse row matrix, used for sparse recurrent weights.
struct CsrMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::size_t> row_ptr;
    std::vector<std::size_t> col_idx;
    std::vector<double> values;

    static CsrMatrix from_dense(std::span<const double> A, std::size_t rows,
                                std::size_t cols);
    double density() const;
};

void csr_matvec(const CsrMatrix& A, std::span<const double> x, std::span<double> y);
void csr_matvec_serial(const CsrMatrix& A, std::span<const double> x,
                       std::span<double> y);

/// x_out = (1 - alpha) * x_prev + alpha * tanh(pre).
void leaky_tanh_step(std::span<const double> x_prev, std::span<const double> pre,
                     double alpha, std::span<double> x_out);
void leaky_tanh_step_serial(std::span<const double> x_prev,
                            std::span<const double> pre, double alpha,
                            std::span<double> x_out);

/// z_t = w . x_t + b over a row-major feature matrix (n_rows x dim).
void linear_margins(std::span<const double> X, std::size_t n_rows, std::size_t dim,
                    std::span<const double> w, double b, std::span<double> z);
void linear_margins_serial(std::span<const double> X, std::size_t n_rows,
                           std::size_t dim, std::span<const double> w, double b,
                           std::span<double> z);

/// Fixed-block deterministic sum (order independent of thread count).
double block_sum(std::span<const double> v);
double block_sum_serial(std::span<const double> v);

/// g_j += sum_t r_t * X_tj, accumulated with the fixed block decomposition.
/// g must be zero-initialized by the caller.
void weighted_feature_sum(std::span<const double> X, std::size_t n_rows,
                          std::size_t dim, std::span<const double> r,
                          std::span<double> g);
void weighted_feature_sum_serial(std::span<const double> X, std::size_t n_rows,
                                 std::size_t dim, std::span<const double> r,
                                 std::span<double> g);

/// Same-length moving average with replicate edge padding. For even q the
/// kernel extends one tap further to the right. q > len(v) is truncated.
std::vector<double> moving_average_replicate(std::span<const double> v, std::size_t q);

} // namespace srrc::kernels
