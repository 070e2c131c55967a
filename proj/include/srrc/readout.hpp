#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "srrc/reservoir.hpp"
#include "srrc/saliency.hpp"
#include "srrc/series.hpp"
#include "srrc/variant.hpp"

namespace srrc {

/// Row-major design matrix (rows x dim) with 0/1 targets per row.
struct FeatureMatrix {
    std::size_t rows = 0;
    std::size_t dim = 0;
    std::vector<double> values;
    std::vector<std::uint8_t> labels;

    const double* row(std::size_t t) const { return values.data() + t * dim; }
    void validate() const;
};

/// Balanced reweighting: anomaly weight (n1+n0)/(2 n1), normal weight
/// (n1+n0)/(2 n0). Requires both classes to be present.
struct ClassWeights {
    double anomaly = 1.0;
    double normal = 1.0;
};

ClassWeights compute_class_weights(const std::vector<std::uint8_t>& labels);

/// Linear scoring head: p = sigmoid(coefficients . x + bias), label 1 when
/// p >= threshold.
struct ReadoutModel {
    std::vector<double> coefficients;
    double bias = 0.0;
    double threshold = 0.5;
};

struct FitOptions {
    bool weighted = false;            // use class-balanced loss
    double ridge = 1e-8;              // penalty on coefficients, never the bias
    double tolerance = 1e-6;          // gradient infinity-norm stop
    std::size_t max_iterations = 10000;
    std::size_t memory = 8;           // L-BFGS history length
};

struct FitReport {
    bool converged = false;
    std::size_t iterations = 0;
    double final_loss = 0.0;
    double gradient_norm = 0.0;
};

/// Summed cross-entropy (optionally class-weighted) plus ridge * ||w||^2.
/// Probabilities are clipped to [1e-12, 1 - 1e-12] inside the loss only.
double logistic_loss(const FeatureMatrix& data, std::span<const double> coefficients,
                     double bias, const std::optional<ClassWeights>& weights,
                     double ridge);

/// Gradient of the same objective with respect to (coefficients, bias);
/// grad_bias is written to the extra slot at grad[dim].
void logistic_gradient(const FeatureMatrix& data, std::span<const double> coefficients,
                       double bias, const std::optional<ClassWeights>& weights,
                       double ridge, std::span<double> grad);

/// L-BFGS with Armijo backtracking from the zero vector. Stops when the
/// gradient infinity norm drops below the tolerance or iterations run out.
FitReport fit_logistic(const FeatureMatrix& data, ReadoutModel& model,
                       const FitOptions& options);

std::vector<double> predict_proba(const FeatureMatrix& data, const ReadoutModel& model);
std::vector<std::uint8_t> threshold_predict(const std::vector<double>& probabilities,
                                            double threshold);

/// Feature assembly for the model variants: reservoir state rows, the raw
/// saliency value, or the (series value, saliency value) pair. Labels may be
/// empty for predict-only matrices.
FeatureMatrix features_from_states(const StateTrajectory& trajectory,
                                   const std::vector<std::uint8_t>& labels);
FeatureMatrix features_from_saliency(const SaliencyMap& saliency,
                                     const std::vector<std::uint8_t>& labels);
FeatureMatrix features_from_series_and_saliency(const LabeledSeries& series,
                                                const SaliencyMap& saliency,
                                                const std::vector<std::uint8_t>& labels);

/// Rows [begin, end) as an independent matrix.
FeatureMatrix slice_rows(const FeatureMatrix& data, std::size_t begin, std::size_t end);

/// Provenance stored next to the coefficients so a model file is
/// self-describing.
struct ModelMetadata {
    ModelVariant variant = ModelVariant::multi_sr_rc;
    bool weighted_loss = false;
    std::uint64_t reservoir_seed = 0;
    FitReport fit;
};

void save_model_json(const ReadoutModel& model, const ModelMetadata& meta,
                     const std::string& path);
ReadoutModel load_model_json(const std::string& path, ModelMetadata* meta = nullptr);

} // namespace srrc
