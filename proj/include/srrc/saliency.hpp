#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "srrc/series.hpp"

namespace srrc {

/// Sliding-window spectral-residual parameters.
struct SaliencyConfig {
    std::size_t window_size = 128;   // tau
    double overlap_ratio = 0.5;     // r in [0, 1)
    std::size_t avg_kernel_size = 3; // q
    double log_floor = 1e-8;        // amplitude floor before log

    std::size_t step() const;        // s = floor(tau * (1 - r)), >= 1
    void validate() const;
};

/// Window decomposition of a length-T series: starts t_k = s*k, full
/// length tau except a truncated tail window.
struct WindowPlan {
    std::vector<std::size_t> starts;
    std::vector<std::size_t> lengths;
    std::vector<std::size_t> truncations; // tau - length
    std::size_t count() const { return starts.size(); }
};

/// Amplitude/phase/residual spectra of one window, exposed for inspection
/// and testing.
struct WindowSpectrum {
    std::vector<std::complex<double>> coefficients;
    std::vector<double> amplitude;
    std::vector<double> phase;
    std::vector<double> residual;
};

/// Per-timestep saliency values aligned 1:1 with the source series.
struct SaliencyMap {
    std::vector<double> values;
    std::size_t size() const { return values.size(); }
};

/// K = ceil((T - tau) / s) + 1 windows; a single window of length T when
/// T <= tau. Every index 0..T-1 is covered by at least one window.
WindowPlan plan_windows(std::size_t T, const SaliencyConfig& cfg);

WindowSpectrum window_spectrum(const std::vector<double>& window,
                               const SaliencyConfig& cfg);

/// |IDFT(exp(R_f + i P_f))| for one window; same length as the input.
std::vector<double> spectral_residual_window(const std::vector<double>& window,
                                             const SaliencyConfig& cfg);

/// Full map: per-window saliency averaged over overlapping regions, summed
/// in window order so the result is independent of scheduling.
SaliencyMap build_saliency_map(const LabeledSeries& series, const SaliencyConfig& cfg);

/// Serial reference for build_saliency_map (testing/benchmark only).
SaliencyMap build_saliency_map_serial(const LabeledSeries& series,
                                      const SaliencyConfig& cfg);

/// Two-column CSV export (index,saliency), 17 significant digits.
void save_saliency_csv(const SaliencyMap& map, const std::string& path);

} // namespace srrc
