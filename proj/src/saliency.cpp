#include "srrc/saliency.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "srrc/fft.hpp"
#include "srrc/kernels.hpp"

namespace srrc {

std::size_t SaliencyConfig::step() const {
    return static_cast<std::size_t>(
        std::floor(static_cast<double>(window_size) * (1.0 - overlap_ratio)));
}

void SaliencyConfig::validate() const {
    if (window_size < 1) throw std::invalid_argument("saliency: tau must be >= 1");
    if (avg_kernel_size < 1) throw std::invalid_argument("saliency: q must be >= 1");
    if (avg_kernel_size > window_size)
        throw std::invalid_argument("saliency: q must satisfy q <= tau");
    if (!(overlap_ratio >= 0.0 && overlap_ratio < 1.0))
        throw std::invalid_argument("saliency: overlap_ratio must be in [0, 1)");
    if (step() < 1)
        throw std::invalid_argument("saliency: step floor(tau*(1-r)) must be >= 1");
    if (!(log_floor > 0.0))
        throw std::invalid_argument("saliency: log_floor must be > 0");
}

WindowPlan plan_windows(std::size_t T, const SaliencyConfig& cfg) {
    cfg.validate();
    if (T < 1) throw std::invalid_argument("plan_windows: T must be >= 1");
    const std::size_t tau = cfg.window_size;
    const std::size_t s = cfg.step();
    std::size_t K = 1;
    if (T > tau) K = (T - tau + s - 1) / s + 1;
    WindowPlan plan;
    plan.starts.reserve(K);
    plan.lengths.reserve(K);
    plan.truncations.reserve(K);
    for (std::size_t k = 0; k < K; ++k) {
        const std::size_t start = s * k;
        const std::size_t len = std::min(tau, T - start);
        plan.starts.push_back(start);
        plan.lengths.push_back(len);
        plan.truncations.push_back(tau - len);
    }
    return plan;
}

WindowSpectrum window_spectrum(const std::vector<double>& window,
                               const SaliencyConfig& cfg) {
    if (window.empty())
        throw std::invalid_argument("window_spectrum: empty window");
    const std::size_t L = window.size();
    std::vector<cdouble> x(L);
    for (std::size_t t = 0; t < L; ++t) x[t] = cdouble(window[t], 0.0);

    WindowSpectrum sp;
    sp.coefficients = dft(x);
    sp.amplitude.resize(L);
    sp.phase.resize(L);
    std::vector<double> log_amp(L);
    for (std::size_t f = 0; f < L; ++f) {
        sp.amplitude[f] = std::abs(sp.coefficients[f]);
        sp.phase[f] = std::arg(sp.coefficients[f]);
        log_amp[f] = std::log(std::max(sp.amplitude[f], cfg.log_floor));
    }
    const auto local_avg = kernels::moving_average_replicate(log_amp, cfg.avg_kernel_size);
    sp.residual.resize(L);
    for (std::size_t f = 0; f < L; ++f) sp.residual[f] = log_amp[f] - local_avg[f];
    return sp;
}

std::vector<double> spectral_residual_window(const std::vector<double>& window,
                                             const SaliencyConfig& cfg) {
    const WindowSpectrum sp = window_spectrum(window, cfg);
    const std::size_t L = window.size();
    std::vector<cdouble> spec(L);
    for (std::size_t f = 0; f < L; ++f) {
        const double mag = std::exp(sp.residual[f]);
        spec[f] = cdouble(mag * std::cos(sp.phase[f]), mag * std::sin(sp.phase[f]));
    }
    const auto back = idft(spec);
    std::vector<double> out(L);
    for (std::size_t t = 0; t < L; ++t) out[t] = std::abs(back[t]);
    return out;
}

namespace {

SaliencyMap assemble(const LabeledSeries& series, const SaliencyConfig& cfg,
                     bool parallel) {
    series.validate();
    cfg.validate();
    const std::size_t T = series.size();
    const WindowPlan plan = plan_windows(T, cfg);
    const std::size_t K = plan.count();

    std::vector<std::vector<double>> per_window(K);
#pragma omp parallel for schedule(dynamic) if (parallel && K > 1)
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(K); ++k) {
        const std::size_t kk = static_cast<std::size_t>(k);
        std::vector<double> w(series.values.begin() +
                                  static_cast<std::ptrdiff_t>(plan.starts[kk]),
                              series.values.begin() +
                                  static_cast<std::ptrdiff_t>(plan.starts[kk] +
                                                              plan.lengths[kk]));
        per_window[kk] = spectral_residual_window(w, cfg);
    }

    // overlap average, accumulated in window order
    SaliencyMap map;
    map.values.assign(T, 0.0);
    std::vector<std::uint32_t> cover(T, 0);
    for (std::size_t k = 0; k < K; ++k) {
        const std::size_t start = plan.starts[k];
        const auto& w = per_window[k];
        for (std::size_t i = 0; i < w.size(); ++i) {
            map.values[start + i] += w[i];
            ++cover[start + i];
        }
    }
    for (std::size_t j = 0; j < T; ++j) {
        if (cover[j] == 0)
            throw std::logic_error("build_saliency_map: uncovered index");
        map.values[j] /= static_cast<double>(cover[j]);
    }
    return map;
}

} // namespace

SaliencyMap build_saliency_map(const LabeledSeries& series, const SaliencyConfig& cfg) {
    return assemble(series, cfg, true);
}

SaliencyMap build_saliency_map_serial(const LabeledSeries& series,
                                      const SaliencyConfig& cfg) {
    return assemble(series, cfg, false);
}

void save_saliency_csv(const SaliencyMap& map, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("save_saliency_csv: cannot open '" + path + "'");
    out << "index,saliency\n";
    char buf[40];
    for (std::size_t i = 0; i < map.values.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", map.values[i]);
        out << i << ',' << buf << '\n';
    }
    if (!out) throw std::runtime_error("save_saliency_csv: write failed");
}

} // namespace srrc
