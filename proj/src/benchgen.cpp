#include "srrc/benchgen.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <stdexcept>

#include <json.hpp>

#include "srrc/rng.hpp"

namespace srrc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double component_value(const SineComponent& c, double t) {
    const double arg = kTwoPi * c.frequency * t + c.phase;
    return c.amp_sin * std::sin(arg) + c.amp_cos * std::cos(arg);
}

struct Moments {
    double mean = 0.0;
    double stddev = 0.0; // population form
};

Moments population_moments(const std::vector<double>& v, std::size_t lo, std::size_t hi) {
    Moments m;
    const double n = static_cast<double>(hi - lo + 1);
    for (std::size_t i = lo; i <= hi; ++i) m.mean += v[i];
    m.mean /= n;
    double acc = 0.0;
    for (std::size_t i = lo; i <= hi; ++i) {
        const double d = v[i] - m.mean;
        acc += d * d;
    }
    m.stddev = std::sqrt(acc / n);
    return m;
}

} // namespace

double BaselineSpec::noise_std() const {
    return noise_is_std ? noise_param : std::sqrt(noise_param);
}

void BaselineSpec::validate() const {
    if (length == 0) throw std::invalid_argument("baseline: length must be positive");
    if (!(noise_param >= 0.0))
        throw std::invalid_argument("baseline: noise parameter must be non-negative");
    for (const auto& c : components)
        if (!std::isfinite(c.amp_sin) || !std::isfinite(c.amp_cos) ||
            !std::isfinite(c.frequency) || !std::isfinite(c.phase))
            throw std::invalid_argument("baseline: non-finite component parameter");
}

BaselineSpec single_sine_preset() {
    BaselineSpec spec;
    spec.components = {{1.0, 0.0, 0.04, 0.0}};
    return spec;
}

BaselineSpec four_sine_preset() {
    BaselineSpec spec;
    const double pi = std::numbers::pi;
    spec.components = {{1.0, 0.0, 0.005, 0.0},
                       {1.0, 0.0, 0.015, pi / 8.0},
                       {1.0, 0.0, 0.02, pi / 4.0},
                       {1.0, 0.0, 0.04, pi / 2.0}};
    return spec;
}

BaselineSpec irrational_preset() {
    BaselineSpec spec;
    const double pi = std::numbers::pi;
    spec.components = {{1.0, 0.0, std::sqrt(2.0), 0.0},
                       {1.0, 0.0, std::sqrt(5.0), pi / 8.0},
                       {1.0, 0.0, std::sqrt(7.0), pi / 4.0},
                       {1.0, 0.0, std::sqrt(11.0), pi / 2.0}};
    return spec;
}

std::string to_string(AnomalyKind kind) {
    switch (kind) {
        case AnomalyKind::global: return "global";
        case AnomalyKind::contextual: return "contextual";
        case AnomalyKind::shapelet: return "shapelet";
        case AnomalyKind::seasonal: return "seasonal";
    }
    throw std::logic_error("to_string: unknown anomaly kind");
}

AnomalyKind anomaly_kind_from_string(const std::string& name) {
    if (name == "global") return AnomalyKind::global;
    if (name == "contextual") return AnomalyKind::contextual;
    if (name == "shapelet") return AnomalyKind::shapelet;
    if (name == "seasonal") return AnomalyKind::seasonal;
    throw std::invalid_argument("unknown anomaly kind '" + name + "'");
}

void AnomalySpec::validate() const {
    if (!(rate > 0.0 && rate <= 1.0))
        throw std::invalid_argument("anomaly: rate must lie in (0, 1]");
    if (!(magnitude > 0.0) || !std::isfinite(magnitude))
        throw std::invalid_argument("anomaly: magnitude must be positive");
    if (!(frequency_factor > 0.0) || !std::isfinite(frequency_factor))
        throw std::invalid_argument("anomaly: frequency factor must be positive");
    if (!(segment_amplitude > 0.0) || !std::isfinite(segment_amplitude))
        throw std::invalid_argument("anomaly: segment amplitude must be positive");
    if (segment_harmonics == 0)
        throw std::invalid_argument("anomaly: segment harmonics must be positive");
}

void BenchmarkSpec::validate() const {
    baseline.validate();
    anomaly.validate();
}

std::string benchmark_spec_to_json(const BenchmarkSpec& spec) {
    nlohmann::ordered_json doc;
    auto& base = doc["baseline"];
    base["components"] = nlohmann::ordered_json::array();
    for (const auto& c : spec.baseline.components)
        base["components"].push_back({{"amp_sin", c.amp_sin},
                                      {"amp_cos", c.amp_cos},
                                      {"frequency", c.frequency},
                                      {"phase", c.phase}});
    base["noise_param"] = spec.baseline.noise_param;
    base["noise_is_std"] = spec.baseline.noise_is_std;
    base["length"] = spec.baseline.length;
    auto& an = doc["anomaly"];
    an["kind"] = to_string(spec.anomaly.kind);
    an["rate"] = spec.anomaly.rate;
    an["magnitude"] = spec.anomaly.magnitude;
    an["neighborhood"] = spec.anomaly.neighborhood;
    an["segment_length"] = spec.anomaly.segment_length;
    an["segment_harmonics"] = spec.anomaly.segment_harmonics;
    an["segment_amplitude"] = spec.anomaly.segment_amplitude;
    an["frequency_factor"] = spec.anomaly.frequency_factor;
    return doc.dump(2);
}

BenchmarkSpec benchmark_spec_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("benchmark spec: invalid json: ") + e.what());
    }
    BenchmarkSpec spec;
    if (doc.contains("baseline")) {
        const auto& base = doc["baseline"];
        if (base.contains("components")) {
            spec.baseline.components.clear();
            for (const auto& item : base["components"]) {
                SineComponent c;
                c.amp_sin = item.value("amp_sin", 1.0);
                c.amp_cos = item.value("amp_cos", 0.0);
                c.frequency = item.value("frequency", 0.04);
                c.phase = item.value("phase", 0.0);
                spec.baseline.components.push_back(c);
            }
        }
        spec.baseline.noise_param = base.value("noise_param", spec.baseline.noise_param);
        spec.baseline.noise_is_std = base.value("noise_is_std", spec.baseline.noise_is_std);
        spec.baseline.length = base.value("length", spec.baseline.length);
    }
    if (doc.contains("anomaly")) {
        const auto& an = doc["anomaly"];
        if (an.contains("kind"))
            spec.anomaly.kind = anomaly_kind_from_string(an["kind"].get<std::string>());
        spec.anomaly.rate = an.value("rate", spec.anomaly.rate);
        spec.anomaly.magnitude = an.value("magnitude", spec.anomaly.magnitude);
        spec.anomaly.neighborhood = an.value("neighborhood", spec.anomaly.neighborhood);
        spec.anomaly.segment_length = an.value("segment_length", spec.anomaly.segment_length);
        spec.anomaly.segment_harmonics =
            an.value("segment_harmonics", spec.anomaly.segment_harmonics);
        spec.anomaly.segment_amplitude =
            an.value("segment_amplitude", spec.anomaly.segment_amplitude);
        spec.anomaly.frequency_factor =
            an.value("frequency_factor", spec.anomaly.frequency_factor);
    }
    spec.validate();
    return spec;
}

void save_benchmark_spec(const BenchmarkSpec& spec, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_benchmark_spec: cannot open " + path);
    out << benchmark_spec_to_json(spec) << '\n';
    if (!out) throw std::runtime_error("save_benchmark_spec: write failed for " + path);
}

BenchmarkSpec load_benchmark_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_benchmark_spec: cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return benchmark_spec_from_json(text);
}

LabeledSeries generate_baseline(const BaselineSpec& spec, std::uint64_t seed) {
    spec.validate();
    auto rng = make_rng(derive_seed(seed, "baseline-noise"));
    std::normal_distribution<double> noise(0.0, spec.noise_std());
    LabeledSeries series;
    series.name = "baseline";
    series.values.resize(spec.length);
    for (std::size_t t = 0; t < spec.length; ++t) {
        double v = 0.0;
        for (const auto& c : spec.components) v += component_value(c, static_cast<double>(t));
        if (spec.noise_param > 0.0) v += noise(rng);
        series.values[t] = v;
    }
    return series;
}

std::vector<std::size_t> sample_anomaly_points(std::size_t length, double rate,
                                               std::uint64_t seed) {
    auto rng = make_rng(derive_seed(seed, "placement"));
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::vector<std::size_t> points;
    for (std::size_t t = 0; t < length; ++t)
        if (coin(rng) < rate) points.push_back(t);
    return points;
}

LabeledSeries generate_benchmark(const BenchmarkSpec& spec, std::uint64_t seed) {
    spec.validate();
    LabeledSeries series = generate_baseline(spec.baseline, seed);
    const std::size_t T = series.size();
    const std::vector<double> original = series.values;
    std::vector<std::uint8_t> labels(T, 0);

    const auto points = sample_anomaly_points(T, spec.anomaly.rate, seed);
    auto sign_rng = make_rng(derive_seed(seed, "sign"));
    std::uniform_int_distribution<int> sign_coin(0, 1);
    auto segment_rng = make_rng(derive_seed(seed, "shapelet-noise"));
    std::normal_distribution<double> segment_noise(0.0, 1.0);

    switch (spec.anomaly.kind) {
        case AnomalyKind::global: {
            const Moments m = T > 0 ? population_moments(original, 0, T - 1) : Moments{};
            for (std::size_t i : points) {
                const double sign = sign_coin(sign_rng) == 0 ? 1.0 : -1.0;
                series.values[i] = m.mean + sign * spec.anomaly.magnitude * m.stddev;
                labels[i] = 1;
            }
            break;
        }
        case AnomalyKind::contextual: {
            const std::size_t k = spec.anomaly.neighborhood;
            for (std::size_t i : points) {
                const std::size_t lo = i >= k ? i - k : 0;
                const std::size_t hi = std::min(i + k, T - 1);
                const Moments m = population_moments(original, lo, hi);
                const double sign = sign_coin(sign_rng) == 0 ? 1.0 : -1.0;
                series.values[i] = m.mean + sign * spec.anomaly.magnitude * m.stddev;
                labels[i] = 1;
            }
            break;
        }
        case AnomalyKind::shapelet: {
            for (std::size_t j : points) {
                const std::size_t last = std::min(j + spec.anomaly.segment_length, T - 1);
                for (std::size_t t = j; t <= last; ++t) {
                    double v = 0.0;
                    for (std::size_t h = 0; h < spec.anomaly.segment_harmonics; ++h) {
                        const double order = static_cast<double>(2 * h + 1);
                        v += spec.anomaly.segment_amplitude / order *
                             std::sin(kTwoPi * 0.04 * order * static_cast<double>(t));
                    }
                    series.values[t] = v + segment_noise(segment_rng);
                    labels[t] = 1;
                }
            }
            break;
        }
        case AnomalyKind::seasonal: {
            for (std::size_t j : points) {
                const std::size_t last = std::min(j + spec.anomaly.segment_length, T - 1);
                for (std::size_t t = j; t <= last; ++t) {
                    double v = 0.0;
                    for (const auto& c : spec.baseline.components) {
                        const double arg = kTwoPi * spec.anomaly.frequency_factor *
                                           c.frequency * static_cast<double>(t);
                        v += c.amp_sin * std::sin(arg) + c.amp_cos * std::cos(arg);
                    }
                    series.values[t] = v;
                    labels[t] = 1;
                }
            }
            break;
        }
    }

    series.labels = std::move(labels);
    series.name = "benchmark-" + to_string(spec.anomaly.kind);
    return series;
}

} // namespace srrc
