#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "srrc/variant.hpp"

namespace srrc {

struct SearchDimension {
    std::string name;
    double lower = 0.0;
    double upper = 1.0;
};

struct SearchSpace {
    std::vector<SearchDimension> dimensions;

    void validate() const;
    std::size_t size() const { return dimensions.size(); }
    std::size_t index_of(const std::string& name) const;
    bool contains(const std::vector<double>& point) const;
};

/// The bounds a variant actually tunes: reservoir variants search their
/// coupling scales, spectral radius, leak rate, and sparsity; the plain
/// logistic baselines search only the decision threshold.
SearchSpace space_for_variant(ModelVariant variant);

struct TrialRecord {
    std::size_t index = 0;
    std::vector<double> point;
    double objective = std::numeric_limits<double>::quiet_NaN();
    bool failed = false;
    std::string error;
    std::uint64_t seed = 0;
};

enum class SearchStrategy { bayesian, random };

SearchStrategy strategy_from_string(const std::string& name);
std::string to_string(SearchStrategy strategy);

struct SearchOptions {
    std::size_t budget = 50;       // total trial count, prior trials included
    SearchStrategy strategy = SearchStrategy::bayesian;
    std::size_t init_trials = 0;   // 0 picks max(5, budget / 5)
    std::uint64_t seed = 0;
    std::vector<TrialRecord> prior_trials; // resumed log, replayed not re-run
    std::function<void(const TrialRecord&)> on_trial; // called after each new trial
};

struct SearchResult {
    TrialRecord best;
    std::vector<TrialRecord> trials;
};

/// Objective receives the parameter point and a per-trial seed; higher is
/// better. Exceptions mark the trial failed and the search continues.
using Objective = std::function<double(const std::vector<double>&, std::uint64_t)>;

/// Random exploration followed by surrogate-guided proposals (gaussian
/// process with an expected-improvement acquisition maximized from five
/// restarts). Fully reproducible per seed.
SearchResult optimize(const SearchSpace& space, const Objective& objective,
                      const SearchOptions& options);

/// One-trial-per-line JSON serialization for resumable sweep logs.
std::string trial_to_json_line(const TrialRecord& trial, const SearchSpace& space);
TrialRecord trial_from_json_line(const std::string& line, const SearchSpace& space);

} // namespace srrc
