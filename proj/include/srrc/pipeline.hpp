#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "srrc/benchgen.hpp"
#include "srrc/eval.hpp"
#include "srrc/hypersearch.hpp"
#include "srrc/readout.hpp"
#include "srrc/reservoir.hpp"
#include "srrc/saliency.hpp"
#include "srrc/series.hpp"
#include "srrc/variant.hpp"

namespace srrc {

/// Everything a reproducible experiment needs: the variant, stage
/// parameters, the data source (generator spec or CSV path), and seeding.
struct ExperimentConfig {
    ModelVariant variant = ModelVariant::multi_sr_rc;
    SaliencyConfig saliency;
    ReservoirParams reservoir;
    double threshold = 0.5;
    bool weighted_loss = false;
    std::size_t washout = 0;
    BenchmarkSpec benchmark;
    std::string dataset_path; // non-empty: load CSV instead of generating
    CsvSchema schema;
    bool normalize = false;
    std::string normalize_stats = "full"; // "full" or "train"
    bool regenerate_per_run = true;       // fresh benchmark draw per run
    std::size_t run_count = 10;
    double train_fraction = 0.49;
    double validation_fraction = 0.21;
    std::uint64_t master_seed = 0;

    void validate() const;
};

std::string config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig load_config(const std::string& path);

struct Dataset {
    LabeledSeries series;
    std::string source; // "generated" or the CSV path
};

/// Loads or generates the series and applies the configured normalization.
Dataset prepare_dataset(const ExperimentConfig& config, std::uint64_t benchmark_seed);

/// Content fingerprint of values+labels, for cross-config consistency checks.
std::string dataset_hash(const LabeledSeries& series);

struct RunMetrics {
    std::size_t run_index = 0;
    std::uint64_t reservoir_seed = 0;
    std::uint64_t benchmark_seed = 0;
    F1Scores validation;
    F1Scores test;
    Confusion test_confusion;
    FitReport fit;
};

struct RunSummary {
    ModelVariant variant = ModelVariant::multi_sr_rc;
    std::string dataset_source;
    std::string dataset_fingerprint;
    std::size_t dataset_length = 0;
    std::vector<RunMetrics> runs;
    RunAggregate validation_aggregate; // over per-run validation mean F1
    RunAggregate test_aggregate;       // over per-run test mean F1
};

/// Variant-specific feature rows for every timestep: saliency is computed
/// when the variant uses it, a reservoir is rolled out when the variant has
/// one. Labels are carried along when the series has them.
FeatureMatrix build_features(const ExperimentConfig& config, const Dataset& dataset,
                             std::uint64_t reservoir_seed);

/// Full single pass: build_features, readout fit on the train rows,
/// thresholding, and scoring on the validation and test rows. Errors carry
/// a stage tag.
RunMetrics evaluate_once(const ExperimentConfig& config, const Dataset& dataset,
                         std::uint64_t reservoir_seed);

/// run_count repetitions with per-run derived seeds, aggregated.
RunSummary run_experiment(const ExperimentConfig& config);

std::string summary_to_json(const ExperimentConfig& config, const RunSummary& summary);
void save_summary(const ExperimentConfig& config, const RunSummary& summary,
                  const std::string& json_path, const std::string& csv_path);

/// Writes the named hyperparameters of a search point into the config.
void apply_point(ExperimentConfig& config, const SearchSpace& space,
                 const std::vector<double>& point);

struct SweepSettings {
    std::size_t budget = 50;
    SearchStrategy strategy = SearchStrategy::bayesian;
    std::size_t objective_seeds = 0; // 0: 3 for reservoir variants, 1 otherwise
    std::string log_path;            // JSONL trial log; resumed when present
};

struct SweepOutcome {
    SearchResult search;
    ExperimentConfig tuned; // input config with the best point applied
};

/// Tunes the variant's search dimensions by maximizing validation mean F1 on
/// a dataset fixed for the whole sweep (benchmark seed index 0).
SweepOutcome sweep_experiment(const ExperimentConfig& config,
                              const SweepSettings& settings);

struct ComparisonRow {
    ModelVariant variant = ModelVariant::rc;
    RunAggregate test_aggregate;
    bool best = false;
};

struct Comparison {
    std::string dataset_fingerprint;
    std::vector<ComparisonRow> rows;
};

/// Runs all five variants on a shared dataset. Requires one config per
/// variant with matching dataset fingerprints; flags the best mean unless
/// every variant ties.
Comparison compare_variants(const std::vector<ExperimentConfig>& configs);

std::string comparison_to_json(const Comparison& comparison);
std::string comparison_to_csv(const Comparison& comparison);

} // namespace srrc
