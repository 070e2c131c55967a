#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "srrc/saliency.hpp"
#include "srrc/series.hpp"

namespace srrc {

/// Echo-state hyperparameters. The random matrices they generate are fully
/// determined by `seed`.
struct ReservoirParams {
    std::size_t size = 100;            // N
    double leak_rate = 0.3;            // alpha in [0, 1]
    double sparsity = 0.1;             // beta in (0, 1], fraction of nonzero entries
    double spectral_radius = 0.9;      // gamma > 0
    double input_scale_series = 1.0;   // a_in
    double input_scale_saliency = 1.0; // a_S
    std::uint64_t seed = 0;

    void validate() const;
};

/// Frozen random weights: recurrent N x N matrix scaled to the requested
/// spectral radius plus the two input coupling vectors.
struct ReservoirWeights {
    std::size_t size = 0;
    std::vector<double> recurrent;      // row-major N x N
    std::vector<double> input_series;   // W_in, length N
    std::vector<double> input_saliency; // W_S, length N
    ReservoirParams params;             // provenance, including seed
};

/// Row-per-timestep state matrix (T x N, row-major).
struct StateTrajectory {
    std::size_t steps = 0;
    std::size_t size = 0;
    std::vector<double> states;

    const double* row(std::size_t t) const { return states.data() + t * size; }
};

/// Largest eigenvalue modulus of a row-major square matrix. The matrix is
/// first condensed to the strongly connected blocks of its exact-zero
/// pattern, so a structurally nilpotent matrix (acyclic pattern) yields
/// exactly zero. Each block uses dense eigendecomposition for small N; for
/// large N a restarted Arnoldi iteration with a residual certificate and a
/// dense fallback when it cannot certify.
double spectral_radius(const std::vector<double>& matrix, std::size_t n);

/// Draws W0 ~ U[-1,1]^{NxN}, zeroes entries with probability 1 - sparsity,
/// rescales to the requested spectral radius, and draws the input vectors
/// from U[-a_in, a_in] and U[-a_S, a_S]. A draw whose sparsified matrix has
/// zero spectral radius is retried with an advanced seed (at most 100 times).
ReservoirWeights init_weights(const ReservoirParams& params);

/// x_t = (1-alpha) x_{t-1} + alpha tanh(W_in u_t + W x_{t-1}), x before the
/// first input is the zero vector.
StateTrajectory run_rc(const LabeledSeries& series, const ReservoirWeights& w,
                       const ReservoirParams& params);

/// As run_rc with the saliency input channel W_S S_t replacing W_in u_t.
StateTrajectory run_sr_rc(const SaliencyMap& saliency, const ReservoirWeights& w,
                          const ReservoirParams& params);

/// Both input channels: x_t = (1-alpha) x_{t-1} + alpha tanh(W_in u_t +
/// W_S S_t + W x_{t-1}).
StateTrajectory run_multi_sr_rc(const LabeledSeries& series, const SaliencyMap& saliency,
                                const ReservoirWeights& w, const ReservoirParams& params);

/// CSV snapshot: params + seed header, then W row-major, then W_in, W_S.
void save_weights_csv(const ReservoirWeights& w, const std::string& path);
ReservoirWeights load_weights_csv(const std::string& path);

} // namespace srrc
