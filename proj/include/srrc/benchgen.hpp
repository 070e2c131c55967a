#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "srrc/series.hpp"

namespace srrc {

/// One sinusoid: amp_sin * sin(2 pi f t + phase) + amp_cos * cos(2 pi f t + phase).
struct SineComponent {
    double amp_sin = 1.0;
    double amp_cos = 0.0;
    double frequency = 0.04;
    double phase = 0.0;
};

struct BaselineSpec {
    std::vector<SineComponent> components;
    double noise_param = 0.05; // variance unless noise_is_std
    bool noise_is_std = false;
    std::size_t length = 3000;

    double noise_std() const;
    void validate() const;
};

BaselineSpec single_sine_preset();
BaselineSpec four_sine_preset();
BaselineSpec irrational_preset();

enum class AnomalyKind { global, contextual, shapelet, seasonal };

std::string to_string(AnomalyKind kind);
AnomalyKind anomaly_kind_from_string(const std::string& name);

struct AnomalySpec {
    AnomalyKind kind = AnomalyKind::global;
    double rate = 0.05;                 // per-timestep occurrence probability
    double magnitude = 3.5;             // deviation multiplier for point outliers
    std::size_t neighborhood = 5;       // half-width for contextual statistics
    std::size_t segment_length = 20;    // pattern segment spans this many extra steps
    std::size_t segment_harmonics = 5;  // square-wave partial count for shapelet
    double segment_amplitude = 1.0;     // base amplitude for shapelet partials
    double frequency_factor = 3.5;      // frequency multiplier for seasonal

    void validate() const;
};

struct BenchmarkSpec {
    BaselineSpec baseline;
    AnomalySpec anomaly;

    void validate() const;
};

std::string benchmark_spec_to_json(const BenchmarkSpec& spec);
BenchmarkSpec benchmark_spec_from_json(const std::string& text);
void save_benchmark_spec(const BenchmarkSpec& spec, const std::string& path);
BenchmarkSpec load_benchmark_spec(const std::string& path);

/// Clean baseline draw: component sum plus i.i.d. gaussian noise, t = 0..T-1.
LabeledSeries generate_baseline(const BaselineSpec& spec, std::uint64_t seed);

/// Independent Bernoulli(rate) coin per timestep; ascending indices.
std::vector<std::size_t> sample_anomaly_points(std::size_t length, double rate,
                                               std::uint64_t seed);

/// Baseline plus injected anomalies of the requested kind; labels mark every
/// replaced sample. Later injections overwrite earlier ones where they overlap.
LabeledSeries generate_benchmark(const BenchmarkSpec& spec, std::uint64_t seed);

} // namespace srrc
