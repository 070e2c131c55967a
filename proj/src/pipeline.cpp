#include "srrc/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "srrc/rng.hpp"

namespace srrc {

namespace {

using ordered_json = nlohmann::ordered_json;

[[noreturn]] void stage_fail(const char* stage, const std::exception& e) {
    throw std::runtime_error(std::string("stage[") + stage + "]: " + e.what());
}

void reject_unknown_keys(const nlohmann::json& obj, const std::set<std::string>& known,
                         const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (known.find(it.key()) == known.end())
            throw std::runtime_error("config: unknown key '" + it.key() + "' in " + where);
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

void ExperimentConfig::validate() const {
    saliency.validate();
    reservoir.validate();
    if (dataset_path.empty()) benchmark.validate();
    if (!(threshold >= 0.0 && threshold <= 1.0))
        throw std::invalid_argument("config: threshold must lie in [0, 1]");
    if (run_count == 0) throw std::invalid_argument("config: run_count must be at least 1");
    if (!(train_fraction > 0.0 && validation_fraction > 0.0 &&
          train_fraction + validation_fraction < 1.0))
        throw std::invalid_argument("config: split fractions must be positive and sum below 1");
    if (normalize_stats != "full" && normalize_stats != "train")
        throw std::invalid_argument("config: normalize_stats must be 'full' or 'train'");
}

std::string config_to_json(const ExperimentConfig& c) {
    ordered_json doc;
    doc["variant"] = to_string(c.variant);
    doc["master_seed"] = c.master_seed;
    doc["run_count"] = c.run_count;
    doc["threshold"] = c.threshold;
    doc["weighted_loss"] = c.weighted_loss;
    doc["washout"] = c.washout;
    doc["normalize"] = c.normalize;
    doc["normalize_stats"] = c.normalize_stats;
    doc["regenerate_per_run"] = c.regenerate_per_run;
    doc["train_fraction"] = c.train_fraction;
    doc["validation_fraction"] = c.validation_fraction;
    if (!c.dataset_path.empty()) {
        doc["dataset"] = c.dataset_path;
        auto& csv = doc["csv"];
        csv["has_header"] = c.schema.has_header;
        csv["value_column"] = c.schema.value_column;
        csv["label_column"] = c.schema.label_column;
        csv["value_column_name"] = c.schema.value_column_name;
        csv["label_column_name"] = c.schema.label_column_name;
        csv["delimiter"] = std::string(1, c.schema.delimiter);
    }
    auto& sal = doc["saliency"];
    sal["tau"] = c.saliency.window_size;
    sal["overlap_ratio"] = c.saliency.overlap_ratio;
    sal["q"] = c.saliency.avg_kernel_size;
    sal["log_floor"] = c.saliency.log_floor;
    auto& res = doc["reservoir"];
    res["size"] = c.reservoir.size;
    res["leak_rate"] = c.reservoir.leak_rate;
    res["sparsity"] = c.reservoir.sparsity;
    res["spectral_radius"] = c.reservoir.spectral_radius;
    res["input_scale_series"] = c.reservoir.input_scale_series;
    res["input_scale_saliency"] = c.reservoir.input_scale_saliency;
    if (c.dataset_path.empty())
        doc["benchmark"] = nlohmann::ordered_json::parse(benchmark_spec_to_json(c.benchmark));
    return doc.dump(2);
}

ExperimentConfig config_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("config: invalid json: ") + e.what());
    }
    reject_unknown_keys(doc,
                        {"variant", "master_seed", "run_count", "threshold", "weighted_loss",
                         "washout", "normalize", "normalize_stats", "regenerate_per_run",
                         "train_fraction", "validation_fraction", "dataset", "csv",
                         "saliency", "reservoir", "benchmark"},
                        "the top level");

    ExperimentConfig c;
    if (doc.contains("variant"))
        c.variant = variant_from_string(doc["variant"].get<std::string>());
    c.master_seed = doc.value("master_seed", c.master_seed);
    c.run_count = doc.value("run_count", c.run_count);
    c.threshold = doc.value("threshold", c.threshold);
    c.washout = doc.value("washout", c.washout);
    c.normalize_stats = doc.value("normalize_stats", c.normalize_stats);
    c.regenerate_per_run = doc.value("regenerate_per_run", c.regenerate_per_run);
    c.train_fraction = doc.value("train_fraction", c.train_fraction);
    c.validation_fraction = doc.value("validation_fraction", c.validation_fraction);
    c.dataset_path = doc.value("dataset", std::string());

    // Real-data runs follow the class-weighted, normalized protocol unless
    // the config says otherwise.
    const bool has_dataset = !c.dataset_path.empty();
    c.weighted_loss = doc.value("weighted_loss", has_dataset);
    c.normalize = doc.value("normalize", has_dataset);

    if (doc.contains("csv")) {
        const auto& csv = doc["csv"];
        reject_unknown_keys(csv,
                            {"has_header", "value_column", "label_column",
                             "value_column_name", "label_column_name", "delimiter"},
                            "'csv'");
        c.schema.has_header = csv.value("has_header", c.schema.has_header);
        c.schema.value_column = csv.value("value_column", c.schema.value_column);
        c.schema.label_column = csv.value("label_column", c.schema.label_column);
        c.schema.value_column_name =
            csv.value("value_column_name", c.schema.value_column_name);
        c.schema.label_column_name =
            csv.value("label_column_name", c.schema.label_column_name);
        const std::string delim = csv.value("delimiter", std::string(1, c.schema.delimiter));
        if (delim.size() != 1)
            throw std::runtime_error("config: csv delimiter must be a single character");
        c.schema.delimiter = delim[0];
    }
    if (doc.contains("saliency")) {
        const auto& sal = doc["saliency"];
        reject_unknown_keys(sal, {"tau", "overlap_ratio", "q", "log_floor"}, "'saliency'");
        c.saliency.window_size = sal.value("tau", c.saliency.window_size);
        c.saliency.overlap_ratio = sal.value("overlap_ratio", c.saliency.overlap_ratio);
        c.saliency.avg_kernel_size = sal.value("q", c.saliency.avg_kernel_size);
        c.saliency.log_floor = sal.value("log_floor", c.saliency.log_floor);
    }
    if (doc.contains("reservoir")) {
        const auto& res = doc["reservoir"];
        reject_unknown_keys(res,
                            {"size", "leak_rate", "sparsity", "spectral_radius",
                             "input_scale_series", "input_scale_saliency"},
                            "'reservoir'");
        c.reservoir.size = res.value("size", c.reservoir.size);
        c.reservoir.leak_rate = res.value("leak_rate", c.reservoir.leak_rate);
        c.reservoir.sparsity = res.value("sparsity", c.reservoir.sparsity);
        c.reservoir.spectral_radius =
            res.value("spectral_radius", c.reservoir.spectral_radius);
        c.reservoir.input_scale_series =
            res.value("input_scale_series", c.reservoir.input_scale_series);
        c.reservoir.input_scale_saliency =
            res.value("input_scale_saliency", c.reservoir.input_scale_saliency);
    }
    if (doc.contains("benchmark"))
        c.benchmark = benchmark_spec_from_json(doc["benchmark"].dump());
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return config_from_json(text);
}

Dataset prepare_dataset(const ExperimentConfig& config, std::uint64_t benchmark_seed) {
    try {
        Dataset d;
        if (config.dataset_path.empty()) {
            d.series = generate_benchmark(config.benchmark, benchmark_seed);
            d.source = "generated";
        } else {
            d.series = load_csv(config.dataset_path, config.schema);
            d.source = config.dataset_path;
        }
        if (config.normalize) {
            if (config.normalize_stats == "train") {
                const SplitCounts c = split_counts(d.series.size(), config.train_fraction,
                                                   config.validation_fraction);
                const auto begin = d.series.values.begin();
                const auto [lo, hi] = std::minmax_element(
                    begin, begin + static_cast<std::ptrdiff_t>(c.train));
                d.series = minmax_normalize_with(d.series, *lo, *hi);
            } else {
                d.series = minmax_normalize(d.series);
            }
        }
        return d;
    } catch (const std::exception& e) {
        stage_fail("dataset", e);
    }
}

std::string dataset_hash(const LabeledSeries& series) {
    std::string bytes;
    bytes.reserve(series.size() * 20);
    for (std::size_t i = 0; i < series.size(); ++i) {
        bytes += format_double(series.values[i]);
        bytes += ';';
        if (series.has_labels()) bytes += static_cast<char>('0' + (*series.labels)[i]);
        bytes += '\n';
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

FeatureMatrix build_features(const ExperimentConfig& config, const Dataset& dataset,
                             std::uint64_t reservoir_seed) {
    const LabeledSeries& series = dataset.series;
    const std::vector<std::uint8_t> labels =
        series.has_labels() ? *series.labels : std::vector<std::uint8_t>{};

    SaliencyMap saliency;
    if (variant_uses_saliency(config.variant)) {
        try {
            saliency = build_saliency_map(series, config.saliency);
        } catch (const std::exception& e) {
            stage_fail("saliency", e);
        }
    }

    try {
        switch (config.variant) {
            case ModelVariant::rc: {
                ReservoirParams params = config.reservoir;
                params.seed = reservoir_seed;
                const ReservoirWeights weights = init_weights(params);
                return features_from_states(run_rc(series, weights, params), labels);
            }
            case ModelVariant::sr_rc: {
                ReservoirParams params = config.reservoir;
                params.seed = reservoir_seed;
                const ReservoirWeights weights = init_weights(params);
                return features_from_states(run_sr_rc(saliency, weights, params), labels);
            }
            case ModelVariant::multi_sr_rc: {
                ReservoirParams params = config.reservoir;
                params.seed = reservoir_seed;
                const ReservoirWeights weights = init_weights(params);
                return features_from_states(
                    run_multi_sr_rc(series, saliency, weights, params), labels);
            }
            case ModelVariant::sr_logi:
                return features_from_saliency(saliency, labels);
            case ModelVariant::multi_sr_logi:
                return features_from_series_and_saliency(series, saliency, labels);
        }
        throw std::logic_error("unknown variant");
    } catch (const std::exception& e) {
        stage_fail("reservoir", e);
    }
}

RunMetrics evaluate_once(const ExperimentConfig& config, const Dataset& dataset,
                         std::uint64_t reservoir_seed) {
    config.validate();
    const LabeledSeries& series = dataset.series;
    if (!series.has_labels())
        throw std::runtime_error("stage[dataset]: series has no anomaly labels");
    const std::size_t T = series.size();
    if (T < 10) throw std::runtime_error("stage[dataset]: series too short for a split");

    const FeatureMatrix features = build_features(config, dataset, reservoir_seed);

    const SplitCounts counts =
        split_counts(T, config.train_fraction, config.validation_fraction);
    if (counts.train < 1 || counts.validation < 1 || counts.test < 1)
        throw std::runtime_error("stage[split]: a split segment is empty");
    if (config.washout >= counts.train)
        throw std::runtime_error("stage[split]: washout consumes the whole train segment");

    RunMetrics metrics;
    metrics.reservoir_seed = reservoir_seed;
    ReadoutModel model;
    try {
        const FeatureMatrix train = slice_rows(features, config.washout, counts.train);
        FitOptions options;
        options.weighted = config.weighted_loss;
        metrics.fit = fit_logistic(train, model, options);
        model.threshold = config.threshold;
    } catch (const std::exception& e) {
        stage_fail("readout", e);
    }

    try {
        const std::size_t val_end = counts.train + counts.validation;
        const FeatureMatrix val = slice_rows(features, counts.train, val_end);
        const FeatureMatrix test = slice_rows(features, val_end, T);
        const auto val_pred =
            threshold_predict(predict_proba(val, model), model.threshold);
        const auto test_pred =
            threshold_predict(predict_proba(test, model), model.threshold);
        metrics.validation = f1_scores(confusion_counts(val_pred, val.labels));
        metrics.test_confusion = confusion_counts(test_pred, test.labels);
        metrics.test = f1_scores(metrics.test_confusion);
    } catch (const std::exception& e) {
        stage_fail("evaluate", e);
    }
    return metrics;
}

RunSummary run_experiment(const ExperimentConfig& config) {
    config.validate();
    RunSummary summary;
    summary.variant = config.variant;

    const bool fresh_data = config.dataset_path.empty() && config.regenerate_per_run;
    Dataset shared;
    if (!fresh_data) shared = prepare_dataset(config, derive_seed(config.master_seed, 0, "benchmark"));

    std::vector<double> val_means, test_means;
    for (std::size_t i = 0; i < config.run_count; ++i) {
        const std::uint64_t benchmark_seed = derive_seed(config.master_seed, i, "benchmark");
        const std::uint64_t reservoir_seed = derive_seed(config.master_seed, i, "reservoir");
        Dataset local;
        const Dataset* data = &shared;
        if (fresh_data) {
            local = prepare_dataset(config, benchmark_seed);
            data = &local;
        }

        RunMetrics metrics = evaluate_once(config, *data, reservoir_seed);
        metrics.run_index = i;
        if (config.dataset_path.empty())
            metrics.benchmark_seed =
                fresh_data ? benchmark_seed : derive_seed(config.master_seed, 0, "benchmark");
        if (i == 0) {
            summary.dataset_source = data->source;
            summary.dataset_fingerprint = dataset_hash(data->series);
            summary.dataset_length = data->series.size();
        }
        val_means.push_back(metrics.validation.mean);
        test_means.push_back(metrics.test.mean);
        summary.runs.push_back(std::move(metrics));
    }
    summary.validation_aggregate = aggregate_runs(val_means);
    summary.test_aggregate = aggregate_runs(test_means);
    return summary;
}

namespace {

ordered_json f1_json(const F1Scores& f) {
    return {{"f1_normal", f.normal}, {"f1_anomaly", f.anomaly}, {"mean_f1", f.mean}};
}

ordered_json aggregate_json(const RunAggregate& a) {
    return {{"count", a.count},
            {"mean", a.mean},
            {"stddev", a.stddev},
            {"stderr", a.standard_error}};
}

} // namespace

std::string summary_to_json(const ExperimentConfig& config, const RunSummary& summary) {
    ordered_json doc;
    doc["variant"] = to_string(summary.variant);
    doc["dataset"] = {{"source", summary.dataset_source},
                      {"fingerprint", summary.dataset_fingerprint},
                      {"length", summary.dataset_length}};
    doc["config"] = ordered_json::parse(config_to_json(config));
    doc["runs"] = ordered_json::array();
    for (const auto& run : summary.runs) {
        ordered_json r;
        r["run"] = run.run_index;
        r["reservoir_seed"] = run.reservoir_seed;
        r["benchmark_seed"] = run.benchmark_seed;
        r["validation"] = f1_json(run.validation);
        r["test"] = f1_json(run.test);
        r["test_confusion"] = {{"tp", run.test_confusion.tp},
                               {"fp", run.test_confusion.fp},
                               {"tn", run.test_confusion.tn},
                               {"fn", run.test_confusion.fn}};
        r["fit"] = {{"converged", run.fit.converged},
                    {"iterations", run.fit.iterations},
                    {"final_loss", run.fit.final_loss},
                    {"gradient_norm", run.fit.gradient_norm}};
        doc["runs"].push_back(std::move(r));
    }
    doc["aggregate"] = {{"validation_mean_f1", aggregate_json(summary.validation_aggregate)},
                        {"test_mean_f1", aggregate_json(summary.test_aggregate)}};
    return doc.dump(2);
}

void save_summary(const ExperimentConfig& config, const RunSummary& summary,
                  const std::string& json_path, const std::string& csv_path) {
    if (!json_path.empty()) {
        std::ofstream out(json_path);
        if (!out) throw std::runtime_error("save_summary: cannot open " + json_path);
        out << summary_to_json(config, summary) << '\n';
        if (!out) throw std::runtime_error("save_summary: write failed for " + json_path);
    }
    if (!csv_path.empty()) {
        std::ofstream out(csv_path);
        if (!out) throw std::runtime_error("save_summary: cannot open " + csv_path);
        out << "run,reservoir_seed,benchmark_seed,validation_f1_normal,"
               "validation_f1_anomaly,validation_mean_f1,test_f1_normal,"
               "test_f1_anomaly,test_mean_f1,tp,fp,tn,fn\n";
        for (const auto& run : summary.runs) {
            out << run.run_index << ',' << run.reservoir_seed << ','
                << run.benchmark_seed << ',' << format_double(run.validation.normal) << ','
                << format_double(run.validation.anomaly) << ','
                << format_double(run.validation.mean) << ','
                << format_double(run.test.normal) << ',' << format_double(run.test.anomaly)
                << ',' << format_double(run.test.mean) << ',' << run.test_confusion.tp
                << ',' << run.test_confusion.fp << ',' << run.test_confusion.tn << ','
                << run.test_confusion.fn << '\n';
        }
        const auto aggregate_row = [&](const char* label, double val, double test) {
            out << label << ",,,,," << format_double(val) << ",,,"
                << format_double(test) << ",,,,\n";
        };
        aggregate_row("mean", summary.validation_aggregate.mean,
                      summary.test_aggregate.mean);
        aggregate_row("stddev", summary.validation_aggregate.stddev,
                      summary.test_aggregate.stddev);
        aggregate_row("stderr", summary.validation_aggregate.standard_error,
                      summary.test_aggregate.standard_error);
        if (!out) throw std::runtime_error("save_summary: write failed for " + csv_path);
    }
}

void apply_point(ExperimentConfig& config, const SearchSpace& space,
                 const std::vector<double>& point) {
    if (point.size() != space.size())
        throw std::invalid_argument("apply_point: point/space dimension mismatch");
    for (std::size_t j = 0; j < space.size(); ++j) {
        const std::string& name = space.dimensions[j].name;
        const double v = point[j];
        if (name == "spectral_radius")
            config.reservoir.spectral_radius = v;
        else if (name == "leak_rate")
            config.reservoir.leak_rate = v;
        else if (name == "sparsity")
            config.reservoir.sparsity = v;
        else if (name == "input_scale_series")
            config.reservoir.input_scale_series = v;
        else if (name == "input_scale_saliency")
            config.reservoir.input_scale_saliency = v;
        else if (name == "threshold")
            config.threshold = v;
        else
            throw std::invalid_argument("apply_point: unknown dimension '" + name + "'");
    }
}

SweepOutcome sweep_experiment(const ExperimentConfig& config,
                              const SweepSettings& settings) {
    config.validate();
    const SearchSpace space = space_for_variant(config.variant);
    const Dataset dataset =
        prepare_dataset(config, derive_seed(config.master_seed, 0, "benchmark"));

    std::size_t seeds = settings.objective_seeds;
    if (seeds == 0) seeds = variant_uses_reservoir(config.variant) ? 3 : 1;

    SearchOptions options;
    options.budget = settings.budget;
    options.strategy = settings.strategy;
    options.seed = config.master_seed;

    if (!settings.log_path.empty()) {
        std::ifstream in(settings.log_path);
        if (in) {
            std::string line;
            while (std::getline(in, line)) {
                if (line.empty()) continue;
                options.prior_trials.push_back(trial_from_json_line(line, space));
            }
        }
        options.on_trial = [&space, path = settings.log_path](const TrialRecord& trial) {
            std::ofstream out(path, std::ios::app);
            if (!out) throw std::runtime_error("sweep: cannot append to " + path);
            out << trial_to_json_line(trial, space) << '\n';
        };
    }

    const Objective objective = [&](const std::vector<double>& point, std::uint64_t) {
        ExperimentConfig trial_config = config;
        apply_point(trial_config, space, point);
        double acc = 0.0;
        for (std::size_t j = 0; j < seeds; ++j) {
            const std::uint64_t seed = derive_seed(config.master_seed, j, "reservoir");
            acc += evaluate_once(trial_config, dataset, seed).validation.mean;
        }
        return acc / static_cast<double>(seeds);
    };

    SweepOutcome outcome;
    outcome.search = optimize(space, objective, options);
    outcome.tuned = config;
    apply_point(outcome.tuned, space, outcome.search.best.point);
    return outcome;
}

Comparison compare_variants(const std::vector<ExperimentConfig>& configs) {
    const std::vector<ModelVariant> required = {
        ModelVariant::rc, ModelVariant::sr_logi, ModelVariant::multi_sr_logi,
        ModelVariant::sr_rc, ModelVariant::multi_sr_rc};
    for (ModelVariant v : required) {
        const auto found = std::any_of(configs.begin(), configs.end(),
                                       [v](const auto& c) { return c.variant == v; });
        if (!found)
            throw std::invalid_argument("compare: missing config for variant '" +
                                        to_string(v) + "'");
    }
    if (configs.size() != required.size())
        throw std::invalid_argument("compare: expected exactly one config per variant");

    Comparison comparison;
    for (const auto& config : configs) {
        const Dataset probe =
            prepare_dataset(config, derive_seed(config.master_seed, 0, "benchmark"));
        const std::string fingerprint = dataset_hash(probe.series);
        if (comparison.dataset_fingerprint.empty())
            comparison.dataset_fingerprint = fingerprint;
        else if (comparison.dataset_fingerprint != fingerprint)
            throw std::runtime_error(
                "compare: dataset fingerprint mismatch for variant '" +
                to_string(config.variant) + "'");
    }

    for (const auto& config : configs) {
        ComparisonRow row;
        row.variant = config.variant;
        row.test_aggregate = run_experiment(config).test_aggregate;
        comparison.rows.push_back(row);
    }

    double best_mean = -1.0;
    for (const auto& row : comparison.rows) best_mean = std::max(best_mean, row.test_aggregate.mean);
    const bool all_tie = std::all_of(comparison.rows.begin(), comparison.rows.end(),
                                     [&](const ComparisonRow& row) {
                                         return row.test_aggregate.mean == best_mean;
                                     });
    if (!all_tie)
        for (auto& row : comparison.rows)
            row.best = row.test_aggregate.mean == best_mean;
    return comparison;
}

std::string comparison_to_json(const Comparison& comparison) {
    ordered_json doc;
    doc["dataset_fingerprint"] = comparison.dataset_fingerprint;
    doc["variants"] = ordered_json::array();
    for (const auto& row : comparison.rows) {
        ordered_json r;
        r["variant"] = to_string(row.variant);
        r["test_mean_f1"] = aggregate_json(row.test_aggregate);
        r["best"] = row.best;
        doc["variants"].push_back(std::move(r));
    }
    return doc.dump(2);
}

std::string comparison_to_csv(const Comparison& comparison) {
    std::ostringstream out;
    out << "variant,mean_f1,stddev,stderr,runs,best\n";
    for (const auto& row : comparison.rows) {
        out << to_string(row.variant) << ',' << format_double(row.test_aggregate.mean)
            << ',' << format_double(row.test_aggregate.stddev) << ','
            << format_double(row.test_aggregate.standard_error) << ','
            << row.test_aggregate.count << ',' << (row.best ? 1 : 0) << '\n';
    }
    return out.str();
}

} // namespace srrc
