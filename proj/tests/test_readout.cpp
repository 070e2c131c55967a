#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <vector>

#include "srrc/readout.hpp"

#include "oracles.hpp"

namespace {

srrc::FeatureMatrix make_matrix(std::size_t rows, std::size_t dim,
                                std::vector<double> values,
                                std::vector<std::uint8_t> labels) {
    srrc::FeatureMatrix m;
    m.rows = rows;
    m.dim = dim;
    m.values = std::move(values);
    m.labels = std::move(labels);
    m.validate();
    return m;
}

srrc::FeatureMatrix random_problem(std::size_t rows, std::size_t dim, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> values(rows * dim);
    for (auto& v : values) v = gauss(rng);
    std::vector<std::uint8_t> labels(rows, 0);
    for (std::size_t r = 0; r < rows; ++r) labels[r] = (r % 3 == 0) ? 1 : 0;
    return make_matrix(rows, dim, std::move(values), std::move(labels));
}

oracles::LogisticProblem as_oracle_problem(const srrc::FeatureMatrix& data, bool weighted,
                                           double ridge) {
    oracles::LogisticProblem p;
    p.rows = data.rows;
    p.dim = data.dim;
    p.x = data.values;
    p.y.assign(data.labels.begin(), data.labels.end());
    if (weighted) {
        const auto w = srrc::compute_class_weights(data.labels);
        p.w1 = w.anomaly;
        p.w0 = w.normal;
    }
    p.ridge = ridge;
    return p;
}

} // namespace

TEST_CASE("class weights follow the balanced formula") {
    const auto w = srrc::compute_class_weights(std::vector<std::uint8_t>{
        1, 1, 1, 1, 1, 1, 1, 1, 1, 1, //
        0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0,
        0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0,
        0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0,
        0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0,
        0, 0, 0, 0, 0, 0, 0, 0, 0, 0});
    CHECK(w.anomaly == 5.0);
    CHECK(w.normal == doctest::Approx(100.0 / 180.0).epsilon(1e-15));

    std::vector<std::uint8_t> balanced(10, 0);
    for (std::size_t i = 0; i < 5; ++i) balanced[i] = 1;
    const auto wb = srrc::compute_class_weights(balanced);
    CHECK(wb.anomaly == 1.0);
    CHECK(wb.normal == 1.0);

    CHECK_THROWS_AS(srrc::compute_class_weights(std::vector<std::uint8_t>(4, 0)),
                    std::invalid_argument);
    CHECK_THROWS_AS(srrc::compute_class_weights(std::vector<std::uint8_t>(4, 1)),
                    std::invalid_argument);
}

TEST_CASE("loss at the zero model is the weighted log 2 sum") {
    const auto data = make_matrix(4, 1, {0.5, -0.3, 1.0, 0.1}, {1, 0, 0, 1});
    const std::vector<double> w{0.0};

    // Zero coefficients give p = 0.5 for every row.
    const double unweighted = srrc::logistic_loss(data, w, 0.0, std::nullopt, 0.0);
    CHECK(unweighted == doctest::Approx(4.0 * std::log(2.0)).epsilon(1e-14));

    const srrc::ClassWeights cw{2.0, 0.5};
    const double weighted = srrc::logistic_loss(data, w, 0.0, cw, 0.0);
    CHECK(weighted == doctest::Approx((2.0 + 2.0 + 0.5 + 0.5) * std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("loss and gradient match the independent implementation") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 6; ++trial) {
        const bool weighted = trial % 2 == 1;
        const auto data = random_problem(20 + trial * 7, 1 + trial % 4, 600 + trial);
        const auto oracle = as_oracle_problem(data, weighted, 1e-8);

        std::vector<double> theta(data.dim + 1);
        for (auto& t : theta) t = gauss(rng);
        const std::span<const double> coeffs(theta.data(), data.dim);
        const double bias = theta[data.dim];

        std::optional<srrc::ClassWeights> cw;
        if (weighted) cw = srrc::compute_class_weights(data.labels);

        const double got_loss = srrc::logistic_loss(data, coeffs, bias, cw, 1e-8);
        CHECK(got_loss == doctest::Approx(oracles::logistic_loss(oracle, theta)).epsilon(1e-12));

        std::vector<double> got_grad(data.dim + 1);
        srrc::logistic_gradient(data, coeffs, bias, cw, 1e-8, got_grad);
        const auto want_grad = oracles::logistic_gradient(oracle, theta);
        for (std::size_t j = 0; j <= data.dim; ++j)
            CHECK(got_grad[j] == doctest::Approx(want_grad[j]).epsilon(1e-10));
    }
}

TEST_CASE("gradient agrees with central differences") {
    const auto data = random_problem(25, 3, 909);
    const auto cw = srrc::compute_class_weights(data.labels);
    std::mt19937_64 rng(18);
    std::uniform_real_distribution<double> uni(-2.0, 2.0);

    for (int point = 0; point < 5; ++point) {
        std::vector<double> theta(data.dim + 1);
        for (auto& t : theta) t = uni(rng);

        std::vector<double> grad(data.dim + 1);
        srrc::logistic_gradient(data, std::span<const double>(theta.data(), data.dim),
                                theta[data.dim], cw, 1e-8, grad);

        const double h = 1e-5;
        for (std::size_t j = 0; j <= data.dim; ++j) {
            auto plus = theta;
            auto minus = theta;
            plus[j] += h;
            minus[j] -= h;
            const double fp = srrc::logistic_loss(
                data, std::span<const double>(plus.data(), data.dim), plus[data.dim], cw, 1e-8);
            const double fm = srrc::logistic_loss(
                data, std::span<const double>(minus.data(), data.dim), minus[data.dim], cw, 1e-8);
            const double numeric = (fp - fm) / (2.0 * h);
            CHECK(std::abs(grad[j] - numeric) <=
                  1e-6 * std::max({1.0, std::abs(grad[j]), std::abs(numeric)}));
        }
    }
}

TEST_CASE("training separates a linearly separable problem") {
    srrc::FeatureMatrix data = make_matrix(
        8, 1, {-2.0, -1.5, -1.2, -0.8, 0.9, 1.1, 1.6, 2.2}, {0, 0, 0, 0, 1, 1, 1, 1});

    srrc::ReadoutModel model;
    const auto report = srrc::fit_logistic(data, model, srrc::FitOptions{});
    CHECK(report.converged);

    const auto probs = srrc::predict_proba(data, model);
    const auto predictions = srrc::threshold_predict(probs, model.threshold);
    CHECK(predictions == std::vector<std::uint8_t>{0, 0, 0, 0, 1, 1, 1, 1});
}

TEST_CASE("the optimizer reaches the descent oracle's objective") {
    for (int trial = 0; trial < 3; ++trial) {
        const bool weighted = trial != 1;
        const auto data = random_problem(40, 3, 7000 + trial);
        const auto oracle = as_oracle_problem(data, weighted, 1e-8);

        srrc::ReadoutModel model;
        srrc::FitOptions options;
        options.weighted = weighted;
        srrc::fit_logistic(data, model, options);

        std::vector<double> theta(model.coefficients);
        theta.push_back(model.bias);
        const double got = oracles::logistic_loss(oracle, theta);

        const auto reference = oracles::logistic_descent(oracle, 20000, 1e-8);
        const double want = oracles::logistic_loss(oracle, reference);
        CHECK(got <= want + 1e-6 * std::max(1.0, std::abs(want)));
    }
}

TEST_CASE("balanced data makes weighted and unweighted fits identical") {
    std::vector<double> values;
    std::vector<std::uint8_t> labels;
    std::mt19937_64 rng(55);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int r = 0; r < 30; ++r) {
        const int label = r % 2;
        values.push_back(gauss(rng) + (label != 0 ? 1.0 : -1.0));
        values.push_back(gauss(rng));
        labels.push_back(static_cast<std::uint8_t>(label));
    }
    const auto data = make_matrix(30, 2, std::move(values), std::move(labels));

    srrc::ReadoutModel plain;
    srrc::ReadoutModel weighted;
    srrc::FitOptions options;
    srrc::fit_logistic(data, plain, options);
    options.weighted = true;
    srrc::fit_logistic(data, weighted, options);

    CHECK(plain.coefficients == weighted.coefficients);
    CHECK(plain.bias == weighted.bias);
}

TEST_CASE("thresholding marks probabilities at or above the cut") {
    const std::vector<double> probs{0.4, 0.5, 0.6};
    CHECK(srrc::threshold_predict(probs, 0.5) == std::vector<std::uint8_t>{0, 1, 1});
    CHECK(srrc::threshold_predict(probs, 0.61) == std::vector<std::uint8_t>{0, 0, 0});
    CHECK(srrc::threshold_predict(probs, 0.0) == std::vector<std::uint8_t>{1, 1, 1});
}

TEST_CASE("extreme margins stay finite through clipping") {
    const auto data = make_matrix(2, 1, {1000.0, -1000.0}, {0, 1});
    const std::vector<double> w{5.0};
    const double loss = srrc::logistic_loss(data, w, 0.0, std::nullopt, 0.0);
    CHECK(std::isfinite(loss));
    // Both rows are mispredicted with certainty, so each contributes
    // -log(clip) = -log(1e-12).
    CHECK(loss == doctest::Approx(-2.0 * std::log(1e-12)).epsilon(1e-10));
}

TEST_CASE("feature assembly shapes and interleaving") {
    srrc::StateTrajectory traj;
    traj.steps = 3;
    traj.size = 2;
    traj.states = {1, 2, 3, 4, 5, 6};
    const std::vector<std::uint8_t> labels{0, 1, 0};

    auto m = srrc::features_from_states(traj, labels);
    CHECK(m.rows == 3);
    CHECK(m.dim == 2);
    CHECK(m.values == traj.states);
    CHECK(m.labels == labels);

    srrc::SaliencyMap map;
    map.values = {0.5, 0.25, 0.125};
    m = srrc::features_from_saliency(map, labels);
    CHECK(m.rows == 3);
    CHECK(m.dim == 1);
    CHECK(m.values == map.values);

    srrc::LabeledSeries series;
    series.values = {10.0, 20.0, 30.0};
    m = srrc::features_from_series_and_saliency(series, map, labels);
    CHECK(m.rows == 3);
    CHECK(m.dim == 2);
    CHECK(m.values == std::vector<double>{10.0, 0.5, 20.0, 0.25, 30.0, 0.125});

    const auto tail = srrc::slice_rows(m, 1, 3);
    CHECK(tail.rows == 2);
    CHECK(tail.values == std::vector<double>{20.0, 0.25, 30.0, 0.125});
    CHECK(tail.labels == std::vector<std::uint8_t>{1, 0});
}

TEST_CASE("model files carry coefficients and provenance") {
    srrc::ReadoutModel model;
    model.coefficients = {0.25, -1.75, 3.0};
    model.bias = -0.125;
    model.threshold = 0.35;

    srrc::ModelMetadata meta;
    meta.variant = srrc::ModelVariant::sr_rc;
    meta.weighted_loss = true;
    meta.reservoir_seed = 424242;
    meta.fit.converged = true;
    meta.fit.iterations = 57;
    meta.fit.final_loss = 1.5;
    meta.fit.gradient_norm = 5e-7;

    const auto path =
        (std::filesystem::temp_directory_path() / "srrc_model_test.json").string();
    srrc::save_model_json(model, meta, path);

    srrc::ModelMetadata back_meta;
    const auto back = srrc::load_model_json(path, &back_meta);
    CHECK(back.coefficients == model.coefficients);
    CHECK(back.bias == model.bias);
    CHECK(back.threshold == model.threshold);
    CHECK(back_meta.variant == meta.variant);
    CHECK(back_meta.weighted_loss == meta.weighted_loss);
    CHECK(back_meta.reservoir_seed == meta.reservoir_seed);
    CHECK(back_meta.fit.iterations == meta.fit.iterations);
}
