#include "srrc/readout.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "srrc/kernels.hpp"

namespace srrc {

namespace {

constexpr double kProbClip = 1e-12;

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double clip_prob(double p) {
    return std::clamp(p, kProbClip, 1.0 - kProbClip);
}

} // namespace

void FeatureMatrix::validate() const {
    if (values.size() != rows * dim)
        throw std::invalid_argument("feature matrix: values size does not match rows*dim");
    if (!labels.empty() && labels.size() != rows)
        throw std::invalid_argument("feature matrix: label count does not match rows");
    for (auto v : values)
        if (!std::isfinite(v))
            throw std::invalid_argument("feature matrix: non-finite feature value");
    for (auto l : labels)
        if (l > 1) throw std::invalid_argument("feature matrix: labels must be 0 or 1");
}

ClassWeights compute_class_weights(const std::vector<std::uint8_t>& labels) {
    std::size_t n1 = 0;
    for (auto l : labels) n1 += l;
    const std::size_t n0 = labels.size() - n1;
    if (n1 == 0 || n0 == 0)
        throw std::invalid_argument(
            "compute_class_weights: both classes must be present in the labels");
    ClassWeights w;
    const double total = static_cast<double>(n1 + n0);
    w.anomaly = total / (2.0 * static_cast<double>(n1));
    w.normal = total / (2.0 * static_cast<double>(n0));
    return w;
}

double logistic_loss(const FeatureMatrix& data, std::span<const double> coefficients,
                     double bias, const std::optional<ClassWeights>& weights,
                     double ridge) {
    if (coefficients.size() != data.dim)
        throw std::invalid_argument("logistic_loss: coefficient size mismatch");
    if (data.labels.size() != data.rows)
        throw std::invalid_argument("logistic_loss: labelled rows required");

    std::vector<double> margins(data.rows);
    kernels::linear_margins(data.values, data.rows, data.dim, coefficients, bias, margins);

    std::vector<double> terms(data.rows);
    const double w1 = weights ? weights->anomaly : 1.0;
    const double w0 = weights ? weights->normal : 1.0;
    for (std::size_t t = 0; t < data.rows; ++t) {
        const double z = margins[t];
        if (data.labels[t] == 1)
            terms[t] = -w1 * std::log(clip_prob(sigmoid(z)));
        else
            terms[t] = -w0 * std::log(clip_prob(sigmoid(-z)));
    }
    double loss = kernels::block_sum(terms);
    for (double c : coefficients) loss += ridge * c * c;
    return loss;
}

void logistic_gradient(const FeatureMatrix& data, std::span<const double> coefficients,
                       double bias, const std::optional<ClassWeights>& weights,
                       double ridge, std::span<double> grad) {
    if (grad.size() != data.dim + 1)
        throw std::invalid_argument("logistic_gradient: grad must have dim+1 slots");
    if (data.labels.size() != data.rows)
        throw std::invalid_argument("logistic_gradient: labelled rows required");

    std::vector<double> margins(data.rows);
    kernels::linear_margins(data.values, data.rows, data.dim, coefficients, bias, margins);

    std::vector<double> residuals(data.rows);
    const double w1 = weights ? weights->anomaly : 1.0;
    const double w0 = weights ? weights->normal : 1.0;
    for (std::size_t t = 0; t < data.rows; ++t) {
        const double p = sigmoid(margins[t]);
        const double c = data.labels[t] == 1 ? w1 : w0;
        residuals[t] = c * (p - static_cast<double>(data.labels[t]));
    }

    std::fill(grad.begin(), grad.end(), 0.0);
    kernels::weighted_feature_sum(data.values, data.rows, data.dim, residuals,
                                  grad.subspan(0, data.dim));
    for (std::size_t j = 0; j < data.dim; ++j) grad[j] += 2.0 * ridge * coefficients[j];
    grad[data.dim] = kernels::block_sum(residuals);
}

namespace {

double inf_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

} // namespace

FitReport fit_logistic(const FeatureMatrix& data, ReadoutModel& model,
                       const FitOptions& options) {
    data.validate();
    if (data.labels.size() != data.rows)
        throw std::invalid_argument("fit_logistic: training rows must be labelled");
    if (data.rows == 0) throw std::invalid_argument("fit_logistic: empty training set");

    std::optional<ClassWeights> weights;
    if (options.weighted) weights = compute_class_weights(data.labels);

    const std::size_t dim = data.dim;
    std::vector<double> x(dim + 1, 0.0); // coefficients then bias
    auto eval_loss = [&](std::span<const double> point) {
        return logistic_loss(data, point.subspan(0, dim), point[dim], weights,
                             options.ridge);
    };
    auto eval_grad = [&](std::span<const double> point, std::span<double> g) {
        logistic_gradient(data, point.subspan(0, dim), point[dim], weights, options.ridge,
                          g);
    };

    std::vector<double> grad(dim + 1, 0.0);
    double loss = eval_loss(x);
    eval_grad(x, grad);

    std::deque<std::vector<double>> s_hist;
    std::deque<std::vector<double>> y_hist;
    std::deque<double> rho_hist;

    FitReport report;
    std::vector<double> direction(dim + 1), x_next(dim + 1), grad_next(dim + 1);
    std::size_t iter = 0;
    for (; iter < options.max_iterations; ++iter) {
        report.gradient_norm = inf_norm(grad);
        if (report.gradient_norm < options.tolerance) {
            report.converged = true;
            break;
        }

        // Two-loop recursion for the quasi-Newton direction.
        std::copy(grad.begin(), grad.end(), direction.begin());
        std::vector<double> alpha(s_hist.size());
        for (std::size_t k = s_hist.size(); k-- > 0;) {
            alpha[k] = rho_hist[k] * dot(s_hist[k], direction);
            for (std::size_t i = 0; i <= dim; ++i)
                direction[i] -= alpha[k] * y_hist[k][i];
        }
        if (!s_hist.empty()) {
            const auto& s = s_hist.back();
            const auto& y = y_hist.back();
            const double scale = dot(s, y) / dot(y, y);
            for (auto& d : direction) d *= scale;
        }
        for (std::size_t k = 0; k < s_hist.size(); ++k) {
            const double beta = rho_hist[k] * dot(y_hist[k], direction);
            for (std::size_t i = 0; i <= dim; ++i)
                direction[i] += (alpha[k] - beta) * s_hist[k][i];
        }
        for (auto& d : direction) d = -d;

        double slope = dot(grad, direction);
        if (!(slope < 0.0)) { // not a descent direction; fall back to steepest descent
            for (std::size_t i = 0; i <= dim; ++i) direction[i] = -grad[i];
            slope = dot(grad, direction);
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
        }

        // Armijo backtracking.
        double step = 1.0;
        double loss_next = 0.0;
        bool accepted = false;
        for (int half = 0; half < 60; ++half) {
            for (std::size_t i = 0; i <= dim; ++i) x_next[i] = x[i] + step * direction[i];
            loss_next = eval_loss(x_next);
            if (loss_next <= loss + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break; // line search exhausted; gradient norm reported below

        eval_grad(x_next, grad_next);

        std::vector<double> s(dim + 1), y(dim + 1);
        for (std::size_t i = 0; i <= dim; ++i) {
            s[i] = x_next[i] - x[i];
            y[i] = grad_next[i] - grad[i];
        }
        const double sy = dot(s, y);
        if (sy > 1e-10 * std::sqrt(dot(s, s)) * std::sqrt(dot(y, y))) {
            s_hist.push_back(std::move(s));
            y_hist.push_back(std::move(y));
            rho_hist.push_back(1.0 / sy);
            if (s_hist.size() > options.memory) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }

        x.swap(x_next);
        grad.swap(grad_next);
        loss = loss_next;
    }

    report.iterations = iter;
    report.final_loss = loss;
    report.gradient_norm = inf_norm(grad);
    if (!report.converged) report.converged = report.gradient_norm < options.tolerance;

    model.coefficients.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(dim));
    model.bias = x[dim];
    return report;
}

std::vector<double> predict_proba(const FeatureMatrix& data, const ReadoutModel& model) {
    if (model.coefficients.size() != data.dim)
        throw std::invalid_argument("predict_proba: model dimension mismatch");
    std::vector<double> margins(data.rows);
    kernels::linear_margins(data.values, data.rows, data.dim, model.coefficients,
                            model.bias, margins);
    for (auto& z : margins) z = sigmoid(z);
    return margins;
}

std::vector<std::uint8_t> threshold_predict(const std::vector<double>& probabilities,
                                            double threshold) {
    std::vector<std::uint8_t> labels(probabilities.size());
    for (std::size_t i = 0; i < probabilities.size(); ++i)
        labels[i] = probabilities[i] >= threshold ? 1 : 0;
    return labels;
}

FeatureMatrix features_from_states(const StateTrajectory& trajectory,
                                   const std::vector<std::uint8_t>& labels) {
    if (!labels.empty() && labels.size() != trajectory.steps)
        throw std::invalid_argument("features_from_states: label count mismatch");
    FeatureMatrix out;
    out.rows = trajectory.steps;
    out.dim = trajectory.size;
    out.values = trajectory.states;
    out.labels = labels;
    return out;
}

FeatureMatrix features_from_saliency(const SaliencyMap& saliency,
                                     const std::vector<std::uint8_t>& labels) {
    if (!labels.empty() && labels.size() != saliency.size())
        throw std::invalid_argument("features_from_saliency: label count mismatch");
    FeatureMatrix out;
    out.rows = saliency.size();
    out.dim = 1;
    out.values = saliency.values;
    out.labels = labels;
    return out;
}

FeatureMatrix features_from_series_and_saliency(const LabeledSeries& series,
                                                const SaliencyMap& saliency,
                                                const std::vector<std::uint8_t>& labels) {
    if (series.size() != saliency.size())
        throw std::invalid_argument(
            "features_from_series_and_saliency: series and saliency lengths differ");
    if (!labels.empty() && labels.size() != series.size())
        throw std::invalid_argument("features_from_series_and_saliency: label count mismatch");
    FeatureMatrix out;
    out.rows = series.size();
    out.dim = 2;
    out.values.resize(out.rows * 2);
    for (std::size_t t = 0; t < out.rows; ++t) {
        out.values[2 * t] = series.values[t];
        out.values[2 * t + 1] = saliency.values[t];
    }
    out.labels = labels;
    return out;
}

FeatureMatrix slice_rows(const FeatureMatrix& data, std::size_t begin, std::size_t end) {
    if (begin > end || end > data.rows)
        throw std::invalid_argument("slice_rows: invalid row range");
    FeatureMatrix out;
    out.rows = end - begin;
    out.dim = data.dim;
    out.values.assign(data.values.begin() + static_cast<std::ptrdiff_t>(begin * data.dim),
                      data.values.begin() + static_cast<std::ptrdiff_t>(end * data.dim));
    if (!data.labels.empty())
        out.labels.assign(data.labels.begin() + static_cast<std::ptrdiff_t>(begin),
                          data.labels.begin() + static_cast<std::ptrdiff_t>(end));
    return out;
}

void save_model_json(const ReadoutModel& model, const ModelMetadata& meta,
                     const std::string& path) {
    nlohmann::ordered_json doc;
    doc["variant"] = to_string(meta.variant);
    doc["coefficients"] = model.coefficients;
    doc["bias"] = model.bias;
    doc["threshold"] = model.threshold;
    auto& training = doc["training"];
    training["weighted_loss"] = meta.weighted_loss;
    training["reservoir_seed"] = meta.reservoir_seed;
    training["converged"] = meta.fit.converged;
    training["iterations"] = meta.fit.iterations;
    training["final_loss"] = meta.fit.final_loss;
    training["gradient_norm"] = meta.fit.gradient_norm;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_model_json: cannot open " + path);
    out << doc.dump(2) << '\n';
    if (!out) throw std::runtime_error("save_model_json: write failed for " + path);
}

ReadoutModel load_model_json(const std::string& path, ModelMetadata* meta) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_model_json: cannot open " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw std::runtime_error("load_model_json: " + path + ": " + e.what());
    }
    ReadoutModel model;
    model.coefficients = doc.at("coefficients").get<std::vector<double>>();
    model.bias = doc.at("bias").get<double>();
    model.threshold = doc.at("threshold").get<double>();
    if (meta != nullptr) {
        meta->variant = variant_from_string(doc.at("variant").get<std::string>());
        const auto& training = doc.at("training");
        meta->weighted_loss = training.value("weighted_loss", false);
        meta->reservoir_seed = training.value("reservoir_seed", std::uint64_t{0});
        meta->fit.converged = training.value("converged", false);
        meta->fit.iterations = training.value("iterations", std::size_t{0});
        meta->fit.final_loss = training.value("final_loss", 0.0);
        meta->fit.gradient_norm = training.value("gradient_norm", 0.0);
    }
    return model;
}

} // namespace srrc
