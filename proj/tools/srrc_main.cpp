#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "srrc/pipeline.hpp"
#include "srrc/rng.hpp"

namespace fs = std::filesystem;
using namespace srrc;

namespace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text_atomic(const std::string& path, const std::string& text) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw std::runtime_error("cannot open " + tmp);
        out << text;
        if (!out) throw std::runtime_error("write failed for " + tmp);
    }
    fs::rename(tmp, path);
}

std::string read_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
}

struct GlobalArgs {
    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string out_dir = ".";
    int threads = 0;
};

ExperimentConfig load_experiment(const GlobalArgs& args) {
    if (args.config_path.empty())
        throw std::runtime_error("this command needs --config <path>");
    ExperimentConfig config = load_config(args.config_path);
    if (args.seed_given) config.master_seed = args.seed;
    return config;
}

std::string out_path(const GlobalArgs& args, const std::string& name) {
    fs::create_directories(args.out_dir);
    return (fs::path(args.out_dir) / name).string();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Saliency-driven echo-state anomaly detection experiments"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalArgs args;
    app.add_option("--config", args.config_path, "Experiment config JSON path");
    auto* seed_opt = app.add_option("--seed", args.seed, "Master seed override");
    app.add_option("--out", args.out_dir, "Output directory (default .)");
    app.add_option("--threads", args.threads, "Worker thread count (0 = library default)");

    auto* cmd_generate = app.add_subcommand("generate", "Write the benchmark series CSV and sidecar spec");
    auto* cmd_saliency = app.add_subcommand("saliency", "Export the saliency map of the configured dataset");
    auto* cmd_train = app.add_subcommand("train", "Fit the readout on the train split and save the model");
    auto* cmd_predict = app.add_subcommand("predict", "Score every timestep with a saved model");
    auto* cmd_evaluate = app.add_subcommand("evaluate", "Report split-wise metrics of a saved model");
    auto* cmd_run = app.add_subcommand("run", "Run the repeated experiment and write the summary report");
    auto* cmd_compare = app.add_subcommand("compare", "Run all five variants on a shared dataset");
    auto* cmd_sweep = app.add_subcommand("sweep", "Tune hyperparameters by Bayesian search");

    std::string model_path;
    cmd_train->add_option("--model-out", model_path, "Model file destination");
    cmd_predict->add_option("--model", model_path, "Model file to load");
    cmd_evaluate->add_option("--model", model_path, "Model file to load");

    std::vector<std::string> compare_configs;
    cmd_compare->add_option("configs", compare_configs, "Config JSON per variant (all five)")
        ->expected(-1);

    std::size_t sweep_budget = 50;
    std::string sweep_strategy = "bayesian";
    std::size_t sweep_seeds = 0;
    std::string sweep_log;
    cmd_sweep->add_option("--budget", sweep_budget, "Total trial count (default 50)");
    cmd_sweep->add_option("--strategy", sweep_strategy, "bayesian or random");
    cmd_sweep->add_option("--objective-seeds", sweep_seeds,
                          "Reservoir seeds averaged per trial (0 = variant default)");
    cmd_sweep->add_option("--log", sweep_log, "Trial JSONL path (default <out>/trials.jsonl)");

    CLI11_PARSE(app, argc, argv);
    args.seed_given = seed_opt->count() > 0;

#ifdef _OPENMP
    if (args.threads > 0) omp_set_num_threads(args.threads);
#endif

    try {
        if (cmd_generate->parsed()) {
            ExperimentConfig config = load_experiment(args);
            if (!config.dataset_path.empty())
                throw std::runtime_error("generate needs a benchmark config, not a dataset path");
            const std::uint64_t benchmark_seed =
                derive_seed(config.master_seed, 0, "benchmark");
            const LabeledSeries series = generate_benchmark(config.benchmark, benchmark_seed);

            const std::string csv_path = out_path(args, "benchmark.csv");
            const std::string tmp = csv_path + ".tmp";
            save_csv(series, tmp);
            fs::rename(tmp, csv_path);

            nlohmann::ordered_json sidecar;
            sidecar["master_seed"] = config.master_seed;
            sidecar["benchmark_seed"] = benchmark_seed;
            sidecar["spec"] = nlohmann::ordered_json::parse(
                benchmark_spec_to_json(config.benchmark));
            write_text_atomic(out_path(args, "benchmark_spec.json"), sidecar.dump(2) + "\n");
            std::cout << "wrote " << csv_path << " (" << series.size() << " rows)\n";
        } else if (cmd_saliency->parsed()) {
            ExperimentConfig config = load_experiment(args);
            const Dataset dataset =
                prepare_dataset(config, derive_seed(config.master_seed, 0, "benchmark"));
            const SaliencyMap map = build_saliency_map(dataset.series, config.saliency);
            const std::string path = out_path(args, "saliency.csv");
            save_saliency_csv(map, path);
            std::cout << "wrote " << path << " (" << map.size() << " rows)\n";
        } else if (cmd_train->parsed()) {
            ExperimentConfig config = load_experiment(args);
            const Dataset dataset =
                prepare_dataset(config, derive_seed(config.master_seed, 0, "benchmark"));
            if (!dataset.series.has_labels())
                throw std::runtime_error("train: dataset has no anomaly labels");
            const std::uint64_t reservoir_seed =
                derive_seed(config.master_seed, 0, "reservoir");
            const FeatureMatrix features = build_features(config, dataset, reservoir_seed);
            const SplitCounts counts = split_counts(
                features.rows, config.train_fraction, config.validation_fraction);
            if (config.washout >= counts.train)
                throw std::runtime_error("train: washout consumes the whole train segment");
            const FeatureMatrix train = slice_rows(features, config.washout, counts.train);

            ReadoutModel model;
            FitOptions options;
            options.weighted = config.weighted_loss;
            const FitReport report = fit_logistic(train, model, options);
            model.threshold = config.threshold;

            ModelMetadata meta;
            meta.variant = config.variant;
            meta.weighted_loss = config.weighted_loss;
            meta.reservoir_seed = reservoir_seed;
            meta.fit = report;
            const std::string path =
                model_path.empty() ? out_path(args, "model.json") : model_path;
            save_model_json(model, meta, path);
            std::cout << "wrote " << path << " (converged="
                      << (report.converged ? "yes" : "no") << ", iterations="
                      << report.iterations << ")\n";
        } else if (cmd_predict->parsed()) {
            ExperimentConfig config = load_experiment(args);
            const std::string path =
                model_path.empty() ? out_path(args, "model.json") : model_path;
            ModelMetadata meta;
            const ReadoutModel model = load_model_json(path, &meta);
            if (meta.variant != config.variant)
                throw std::runtime_error("predict: model was trained for variant '" +
                                         to_string(meta.variant) + "'");
            const Dataset dataset =
                prepare_dataset(config, derive_seed(config.master_seed, 0, "benchmark"));
            const FeatureMatrix features =
                build_features(config, dataset, meta.reservoir_seed);
            const auto probabilities = predict_proba(features, model);
            const auto labels = threshold_predict(probabilities, model.threshold);

            const std::string pred_path = out_path(args, "predictions.csv");
            std::ofstream out(pred_path);
            if (!out) throw std::runtime_error("cannot open " + pred_path);
            out << "index,probability,predicted_label\n";
            for (std::size_t i = 0; i < probabilities.size(); ++i)
                out << i << ',' << format_double(probabilities[i]) << ','
                    << static_cast<int>(labels[i]) << '\n';
            if (!out) throw std::runtime_error("write failed for " + pred_path);
            std::cout << "wrote " << pred_path << " (" << probabilities.size()
                      << " rows)\n";
        } else if (cmd_evaluate->parsed()) {
            ExperimentConfig config = load_experiment(args);
            const std::string path =
                model_path.empty() ? out_path(args, "model.json") : model_path;
            ModelMetadata meta;
            const ReadoutModel model = load_model_json(path, &meta);
            if (meta.variant != config.variant)
                throw std::runtime_error("evaluate: model was trained for variant '" +
                                         to_string(meta.variant) + "'");
            const std::uint64_t benchmark_seed =
                derive_seed(config.master_seed, 0, "benchmark");
            const Dataset dataset = prepare_dataset(config, benchmark_seed);
            if (!dataset.series.has_labels())
                throw std::runtime_error("evaluate: dataset has no anomaly labels");
            const FeatureMatrix features =
                build_features(config, dataset, meta.reservoir_seed);
            const SplitCounts counts = split_counts(
                features.rows, config.train_fraction, config.validation_fraction);

            nlohmann::ordered_json doc;
            doc["variant"] = to_string(config.variant);
            doc["model"] = {{"path", path},
                            {"threshold", model.threshold},
                            {"dimension", model.coefficients.size()}};
            doc["seeds"] = {{"master", config.master_seed},
                            {"reservoir", meta.reservoir_seed},
                            {"benchmark", benchmark_seed}};
            doc["config"] = nlohmann::ordered_json::parse(config_to_json(config));
            const auto score_split = [&](std::size_t begin, std::size_t end) {
                const FeatureMatrix rows = slice_rows(features, begin, end);
                const auto pred =
                    threshold_predict(predict_proba(rows, model), model.threshold);
                const Confusion c = confusion_counts(pred, rows.labels);
                const F1Scores f = f1_scores(c);
                return nlohmann::ordered_json{
                    {"rows", end - begin},
                    {"confusion", {{"tp", c.tp}, {"fp", c.fp}, {"tn", c.tn}, {"fn", c.fn}}},
                    {"f1_normal", f.normal},
                    {"f1_anomaly", f.anomaly},
                    {"mean_f1", f.mean}};
            };
            doc["splits"] = {
                {"train", score_split(0, counts.train)},
                {"validation", score_split(counts.train, counts.train + counts.validation)},
                {"test", score_split(counts.train + counts.validation, features.rows)}};

            const std::string report_path = out_path(args, "evaluation.json");
            write_text_atomic(report_path, doc.dump(2) + "\n");
            std::cout << "wrote " << report_path << " (test mean F1 "
                      << format_double(doc["splits"]["test"]["mean_f1"].get<double>())
                      << ")\n";
        } else if (cmd_run->parsed()) {
            ExperimentConfig config = load_experiment(args);
            const RunSummary summary = run_experiment(config);
            save_summary(config, summary, out_path(args, "summary.json"),
                         out_path(args, "summary.csv"));
            std::cout << "test mean F1 " << format_double(summary.test_aggregate.mean)
                      << " +/- " << format_double(summary.test_aggregate.stddev) << " over "
                      << summary.runs.size() << " runs\n";
        } else if (cmd_compare->parsed()) {
            if (compare_configs.empty())
                throw std::runtime_error("compare needs config paths, one per variant");
            std::vector<ExperimentConfig> configs;
            for (const auto& path : compare_configs) {
                ExperimentConfig config = load_config(path);
                if (args.seed_given) config.master_seed = args.seed;
                configs.push_back(std::move(config));
            }
            const Comparison comparison = compare_variants(configs);
            write_text_atomic(out_path(args, "comparison.json"),
                              comparison_to_json(comparison) + "\n");
            write_text_atomic(out_path(args, "comparison.csv"),
                              comparison_to_csv(comparison));
            for (const auto& row : comparison.rows)
                std::cout << to_string(row.variant) << ": "
                          << format_double(row.test_aggregate.mean)
                          << (row.best ? " (best)" : "") << '\n';
        } else if (cmd_sweep->parsed()) {
            ExperimentConfig config = load_experiment(args);
            SweepSettings settings;
            settings.budget = sweep_budget;
            settings.strategy = strategy_from_string(sweep_strategy);
            settings.objective_seeds = sweep_seeds;
            settings.log_path = sweep_log.empty() ? out_path(args, "trials.jsonl") : sweep_log;
            const SweepOutcome outcome = sweep_experiment(config, settings);

            const SearchSpace space = space_for_variant(config.variant);
            nlohmann::ordered_json doc;
            doc["variant"] = to_string(config.variant);
            doc["budget"] = settings.budget;
            doc["strategy"] = to_string(settings.strategy);
            doc["trials"] = outcome.search.trials.size();
            auto& best = doc["best"];
            best["trial"] = outcome.search.best.index;
            best["objective"] = outcome.search.best.objective;
            for (std::size_t j = 0; j < space.size(); ++j)
                best["point"][space.dimensions[j].name] = outcome.search.best.point[j];
            write_text_atomic(out_path(args, "sweep.json"), doc.dump(2) + "\n");
            write_text_atomic(out_path(args, "tuned_config.json"),
                              config_to_json(outcome.tuned) + "\n");
            std::cout << "best validation mean F1 "
                      << format_double(outcome.search.best.objective) << " at trial "
                      << outcome.search.best.index << '\n';
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
