#pragma once

#include <cstdint>
#include <cstddef>
#include <vector>

namespace srrc {

struct Confusion {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;
};

Confusion confusion_counts(const std::vector<std::uint8_t>& predicted,
                           const std::vector<std::uint8_t>& truth);

/// Per-class F1 treating each class as the positive one, plus their average.
/// A zero denominator yields an F1 of zero.
struct F1Scores {
    double normal = 0.0;
    double anomaly = 0.0;
    double mean = 0.0;
};

F1Scores f1_scores(const Confusion& c);

/// Mean, sample standard deviation (zero for a single run), and standard
/// error across repeated runs.
struct RunAggregate {
    std::size_t count = 0;
    double mean = 0.0;
    double stddev = 0.0;
    double standard_error = 0.0;
};

RunAggregate aggregate_runs(const std::vector<double>& values);

} // namespace srrc
