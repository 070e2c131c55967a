#include "srrc/eval.hpp"

#include <cmath>
#include <stdexcept>

namespace srrc {

Confusion confusion_counts(const std::vector<std::uint8_t>& predicted,
                           const std::vector<std::uint8_t>& truth) {
    if (predicted.size() != truth.size())
        throw std::invalid_argument("confusion_counts: prediction and truth lengths differ");
    Confusion c;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (predicted[i] > 1 || truth[i] > 1)
            throw std::invalid_argument("confusion_counts: labels must be 0 or 1");
        if (truth[i] == 1)
            predicted[i] == 1 ? ++c.tp : ++c.fn;
        else
            predicted[i] == 1 ? ++c.fp : ++c.tn;
    }
    return c;
}

F1Scores f1_scores(const Confusion& c) {
    F1Scores f;
    const double norm_den = static_cast<double>(2 * c.tn + c.fp + c.fn);
    const double an_den = static_cast<double>(2 * c.tp + c.fp + c.fn);
    f.normal = norm_den > 0.0 ? 2.0 * static_cast<double>(c.tn) / norm_den : 0.0;
    f.anomaly = an_den > 0.0 ? 2.0 * static_cast<double>(c.tp) / an_den : 0.0;
    f.mean = 0.5 * (f.normal + f.anomaly);
    return f;
}

RunAggregate aggregate_runs(const std::vector<double>& values) {
    if (values.empty())
        throw std::invalid_argument("aggregate_runs: no values");
    RunAggregate a;
    a.count = values.size();
    for (double v : values) a.mean += v;
    a.mean /= static_cast<double>(a.count);
    if (a.count > 1) {
        double acc = 0.0;
        for (double v : values) {
            const double d = v - a.mean;
            acc += d * d;
        }
        a.stddev = std::sqrt(acc / static_cast<double>(a.count - 1));
    }
    a.standard_error = a.stddev / std::sqrt(static_cast<double>(a.count));
    return a;
}

} // namespace srrc
