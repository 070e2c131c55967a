#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "srrc/benchgen.hpp"

namespace {

double clean_value(const srrc::BaselineSpec& spec, std::size_t t) {
    double sum = 0.0;
    for (const auto& c : spec.components) {
        const double arg = 2.0 * std::numbers::pi * c.frequency * static_cast<double>(t) +
                           c.phase;
        sum += c.amp_sin * std::sin(arg) + c.amp_cos * std::cos(arg);
    }
    return sum;
}

struct Moments {
    double mean = 0.0;
    double stddev = 0.0;
};

Moments population_moments(const std::vector<double>& v) {
    Moments m;
    for (double x : v) m.mean += x;
    m.mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - m.mean) * (x - m.mean);
    m.stddev = std::sqrt(var / static_cast<double>(v.size()));
    return m;
}

} // namespace

TEST_CASE("presets define the documented component sets") {
    const auto single = srrc::single_sine_preset();
    REQUIRE(single.components.size() == 1);
    CHECK(single.components[0].frequency == 0.04);
    CHECK(single.components[0].amp_sin == 1.0);
    CHECK(single.components[0].amp_cos == 0.0);
    CHECK(single.components[0].phase == 0.0);

    const auto four = srrc::four_sine_preset();
    REQUIRE(four.components.size() == 4);
    CHECK(four.components[0].frequency == 0.005);
    CHECK(four.components[1].frequency == 0.015);
    CHECK(four.components[2].frequency == 0.02);
    CHECK(four.components[3].frequency == 0.04);
    CHECK(four.components[1].phase == doctest::Approx(std::numbers::pi / 8.0));
    CHECK(four.components[3].phase == doctest::Approx(std::numbers::pi / 2.0));

    const auto irr = srrc::irrational_preset();
    REQUIRE(irr.components.size() == 4);
    CHECK(irr.components[0].frequency == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(irr.components[3].frequency == doctest::Approx(std::sqrt(11.0)).epsilon(1e-15));

    // Frozen value: the noise-free four-sine mixture at t = 0.
    auto quiet = four;
    quiet.noise_param = 0.0;
    CHECK(clean_value(quiet, 0) == doctest::Approx(2.0897902135516374).epsilon(1e-15));
    const auto series = srrc::generate_baseline(quiet, 1);
    CHECK(series.values[0] == doctest::Approx(2.0897902135516374).epsilon(1e-15));
}

TEST_CASE("baseline generation is seed-deterministic with gaussian noise") {
    auto spec = srrc::single_sine_preset();
    spec.length = 4000;
    const auto a = srrc::generate_baseline(spec, 42);
    const auto b = srrc::generate_baseline(spec, 42);
    CHECK(a.values == b.values);
    const auto c = srrc::generate_baseline(spec, 43);
    CHECK(a.values != c.values);
    REQUIRE(a.size() == 4000);

    // The residual around the clean mixture should look like N(0, 0.05).
    std::vector<double> residual(a.size());
    for (std::size_t t = 0; t < a.size(); ++t)
        residual[t] = a.values[t] - clean_value(spec, t);
    const auto m = population_moments(residual);
    CHECK(std::abs(m.mean) < 0.02);
    CHECK(m.stddev == doctest::Approx(std::sqrt(0.05)).epsilon(0.1));

    // noise_param switches from variance to standard deviation on request.
    auto std_spec = spec;
    std_spec.noise_is_std = true;
    const auto d = srrc::generate_baseline(std_spec, 42);
    for (std::size_t t = 0; t < d.size(); ++t)
        residual[t] = d.values[t] - clean_value(std_spec, t);
    CHECK(population_moments(residual).stddev == doctest::Approx(0.05).epsilon(0.15));
}

TEST_CASE("anomaly point sampling is an independent coin per timestep") {
    const auto all = srrc::sample_anomaly_points(50, 1.0, 9);
    REQUIRE(all.size() == 50);
    CHECK(std::is_sorted(all.begin(), all.end()));
    CHECK(all.front() == 0);
    CHECK(all.back() == 49);

    const auto a = srrc::sample_anomaly_points(10000, 0.05, 7);
    const auto b = srrc::sample_anomaly_points(10000, 0.05, 7);
    CHECK(a == b);
    // 4 sigma around the expected 500 hits.
    CHECK(a.size() > 500 - 4 * 22);
    CHECK(a.size() < 500 + 4 * 22);
}

TEST_CASE("global outliers sit a fixed number of deviations from the mean") {
    srrc::BenchmarkSpec spec;
    spec.baseline = srrc::four_sine_preset();
    spec.baseline.length = 600;
    spec.anomaly.kind = srrc::AnomalyKind::global;
    spec.anomaly.rate = 0.05;
    spec.anomaly.magnitude = 3.5;

    const auto series = srrc::generate_benchmark(spec, 11);
    REQUIRE(series.has_labels());
    const auto clean = srrc::generate_baseline(spec.baseline, 11);
    const auto m = population_moments(clean.values);

    std::size_t flagged = 0;
    for (std::size_t t = 0; t < series.size(); ++t) {
        if ((*series.labels)[t] == 1) {
            ++flagged;
            const double hi = m.mean + 3.5 * m.stddev;
            const double lo = m.mean - 3.5 * m.stddev;
            const bool is_hi = std::abs(series.values[t] - hi) < 1e-12;
            const bool is_lo = std::abs(series.values[t] - lo) < 1e-12;
            CHECK((is_hi || is_lo));
        } else {
            CHECK(series.values[t] == clean.values[t]);
        }
    }
    CHECK(flagged > 0);
}

TEST_CASE("contextual outliers use neighborhood statistics") {
    srrc::BenchmarkSpec spec;
    spec.baseline = srrc::single_sine_preset();
    spec.baseline.length = 40;
    spec.anomaly.kind = srrc::AnomalyKind::contextual;
    spec.anomaly.rate = 0.3;
    spec.anomaly.magnitude = 3.5;
    spec.anomaly.neighborhood = 5;

    const auto series = srrc::generate_benchmark(spec, 13);
    const auto clean = srrc::generate_baseline(spec.baseline, 13);

    REQUIRE(series.has_labels());
    std::size_t flagged = 0;
    for (std::size_t t = 0; t < series.size(); ++t) {
        if ((*series.labels)[t] != 1) continue;
        ++flagged;
        // Neighborhood statistics come from the pre-injection series with the
        // window clamped at the edges.
        const std::size_t lo = t >= 5 ? t - 5 : 0;
        const std::size_t hi = std::min(series.size() - 1, t + 5);
        std::vector<double> region(clean.values.begin() + static_cast<std::ptrdiff_t>(lo),
                                   clean.values.begin() + static_cast<std::ptrdiff_t>(hi + 1));
        const auto m = population_moments(region);
        const bool is_hi = std::abs(series.values[t] - (m.mean + 3.5 * m.stddev)) < 1e-12;
        const bool is_lo = std::abs(series.values[t] - (m.mean - 3.5 * m.stddev)) < 1e-12;
        CHECK((is_hi || is_lo));
    }
    CHECK(flagged > 0);
}

TEST_CASE("shapelet segments replace the baseline with a square-wave pattern") {
    srrc::BenchmarkSpec spec;
    spec.baseline = srrc::single_sine_preset();
    spec.baseline.length = 200;
    spec.anomaly.kind = srrc::AnomalyKind::shapelet;
    spec.anomaly.rate = 0.02;
    spec.anomaly.segment_length = 20;

    const auto series = srrc::generate_benchmark(spec, 17);
    const auto again = srrc::generate_benchmark(spec, 17);
    CHECK(series.values == again.values);
    CHECK(series.labels == again.labels);

    REQUIRE(series.has_labels());
    const auto clean = srrc::generate_baseline(spec.baseline, 17);
    std::size_t flagged = 0;
    for (std::size_t t = 0; t < series.size(); ++t) {
        if ((*series.labels)[t] == 1) {
            ++flagged;
            // The replacement carries the five square-wave partials at the
            // absolute timestep plus unit gaussian noise; just check it moved.
            CHECK(series.values[t] != clean.values[t]);
        } else {
            CHECK(series.values[t] == clean.values[t]);
        }
    }
    CHECK(flagged >= 21);

    // Residuals against the noise-free pattern should be standard normal.
    std::vector<double> residuals;
    for (std::size_t t = 0; t < series.size(); ++t) {
        if ((*series.labels)[t] != 1) continue;
        double pattern = 0.0;
        for (std::size_t n = 0; n < 5; ++n) {
            const double k = 2.0 * static_cast<double>(n) + 1.0;
            pattern += (1.0 / k) *
                       std::sin(2.0 * std::numbers::pi * 0.04 * k * static_cast<double>(t));
        }
        residuals.push_back(series.values[t] - pattern);
    }
    const auto m = population_moments(residuals);
    CHECK(std::abs(m.mean) < 0.8);
    CHECK(m.stddev > 0.4);
    CHECK(m.stddev < 1.8);
}

TEST_CASE("shapelet segments clip at the end of the series") {
    srrc::BenchmarkSpec spec;
    spec.baseline = srrc::single_sine_preset();
    spec.baseline.length = 30;
    spec.anomaly.kind = srrc::AnomalyKind::shapelet;
    spec.anomaly.rate = 0.5;
    spec.anomaly.segment_length = 20;

    const auto series = srrc::generate_benchmark(spec, 23);
    REQUIRE(series.size() == 30);
    REQUIRE(series.has_labels());
    // With this rate some segment start lands within 20 steps of the end, so
    // the final sample must be labelled without any out-of-range write.
    CHECK((*series.labels)[29] == 1);
}

TEST_CASE("seasonal segments rescale frequencies without noise or phase") {
    srrc::BenchmarkSpec spec;
    spec.baseline = srrc::four_sine_preset();
    spec.baseline.length = 300;
    spec.anomaly.kind = srrc::AnomalyKind::seasonal;
    spec.anomaly.rate = 0.01;
    spec.anomaly.frequency_factor = 3.5;

    const auto series = srrc::generate_benchmark(spec, 29);
    const auto clean = srrc::generate_baseline(spec.baseline, 29);

    REQUIRE(series.has_labels());
    std::size_t flagged = 0;
    for (std::size_t t = 0; t < series.size(); ++t) {
        if ((*series.labels)[t] != 1) {
            CHECK(series.values[t] == clean.values[t]);
            continue;
        }
        ++flagged;
        double expected = 0.0;
        for (const auto& c : spec.baseline.components) {
            const double arg =
                2.0 * std::numbers::pi * 3.5 * c.frequency * static_cast<double>(t);
            expected += c.amp_sin * std::sin(arg) + c.amp_cos * std::cos(arg);
        }
        CHECK(series.values[t] == doctest::Approx(expected).epsilon(1e-12));
    }
    CHECK(flagged > 0);
}

TEST_CASE("benchmark specs survive a json round trip") {
    srrc::BenchmarkSpec spec;
    spec.baseline = srrc::irrational_preset();
    spec.baseline.length = 1234;
    spec.baseline.noise_param = 0.125;
    spec.baseline.noise_is_std = true;
    spec.anomaly.kind = srrc::AnomalyKind::seasonal;
    spec.anomaly.rate = 0.07;
    spec.anomaly.magnitude = 2.25;
    spec.anomaly.frequency_factor = 1.75;

    const auto text = srrc::benchmark_spec_to_json(spec);
    const auto back = srrc::benchmark_spec_from_json(text);
    CHECK(back.baseline.length == spec.baseline.length);
    CHECK(back.baseline.noise_param == spec.baseline.noise_param);
    CHECK(back.baseline.noise_is_std == spec.baseline.noise_is_std);
    REQUIRE(back.baseline.components.size() == 4);
    CHECK(back.baseline.components[0].frequency == spec.baseline.components[0].frequency);
    CHECK(back.anomaly.kind == spec.anomaly.kind);
    CHECK(back.anomaly.rate == spec.anomaly.rate);
    CHECK(back.anomaly.frequency_factor == spec.anomaly.frequency_factor);

    CHECK(srrc::to_string(srrc::AnomalyKind::contextual) == "contextual");
    CHECK(srrc::anomaly_kind_from_string("shapelet") == srrc::AnomalyKind::shapelet);
    CHECK_THROWS_AS(srrc::anomaly_kind_from_string("nope"), std::invalid_argument);
}

TEST_CASE("invalid benchmark settings are rejected") {
    srrc::BenchmarkSpec spec;
    spec.anomaly.rate = 0.0;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);

    spec = {};
    spec.anomaly.rate = 1.5;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);

    spec = {};
    spec.baseline.length = 0;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);

    spec = {};
    spec.baseline.noise_param = -1.0;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);

    spec = {};
    spec.anomaly.magnitude = 0.0;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);

    spec = {};
    CHECK_NOTHROW(spec.validate());
}
