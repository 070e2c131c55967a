#include "srrc/hypersearch.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <json.hpp>

#include "srrc/rng.hpp"

namespace srrc {

void SearchSpace::validate() const {
    if (dimensions.empty())
        throw std::invalid_argument("search space: no dimensions");
    for (const auto& dim : dimensions) {
        if (dim.name.empty())
            throw std::invalid_argument("search space: unnamed dimension");
        if (!(dim.lower < dim.upper))
            throw std::invalid_argument("search space: dimension '" + dim.name +
                                        "' needs lower < upper");
    }
}

std::size_t SearchSpace::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < dimensions.size(); ++i)
        if (dimensions[i].name == name) return i;
    throw std::invalid_argument("search space: no dimension named '" + name + "'");
}

bool SearchSpace::contains(const std::vector<double>& point) const {
    if (point.size() != dimensions.size()) return false;
    for (std::size_t i = 0; i < point.size(); ++i)
        if (point[i] < dimensions[i].lower || point[i] > dimensions[i].upper) return false;
    return true;
}

SearchSpace space_for_variant(ModelVariant variant) {
    const SearchDimension gamma{"spectral_radius", 0.01, 3.0};
    const SearchDimension alpha{"leak_rate", 0.0, 1.0};
    const SearchDimension beta{"sparsity", 0.01, 1.0};
    const SearchDimension a_in{"input_scale_series", 0.01, 5.0};
    const SearchDimension a_s{"input_scale_saliency", 0.01, 5.0};
    const SearchDimension theta{"threshold", 0.01, 1.0};

    SearchSpace space;
    switch (variant) {
        case ModelVariant::sr_rc:
            space.dimensions = {a_s, gamma, alpha, beta};
            break;
        case ModelVariant::multi_sr_rc:
            space.dimensions = {a_in, a_s, gamma, alpha, beta};
            break;
        case ModelVariant::rc:
            space.dimensions = {a_in, gamma, alpha, beta};
            break;
        case ModelVariant::sr_logi:
        case ModelVariant::multi_sr_logi:
            space.dimensions = {theta};
            break;
    }
    return space;
}

SearchStrategy strategy_from_string(const std::string& name) {
    if (name == "bayesian") return SearchStrategy::bayesian;
    if (name == "random") return SearchStrategy::random;
    throw std::invalid_argument("unknown search strategy '" + name + "'");
}

std::string to_string(SearchStrategy strategy) {
    return strategy == SearchStrategy::bayesian ? "bayesian" : "random";
}

namespace {

// Gaussian-process surrogate over unit-cube inputs with standardized targets.
// Squared-exponential kernel; length scale and noise picked from a small grid
// by marginal likelihood.
class Surrogate {
  public:
    Surrogate(std::vector<std::vector<double>> points, std::vector<double> targets)
        : x_(std::move(points)), n_(x_.size()) {
        double best_score = -std::numeric_limits<double>::infinity();
        for (double length : {0.1, 0.2, 0.35, 0.5, 1.0, 2.0}) {
            for (double noise : {1e-4, 1e-3, 1e-2, 1e-1}) {
                std::vector<double> chol, alpha;
                const double score = fit_once(targets, length, noise, chol, alpha);
                if (score > best_score) {
                    best_score = score;
                    length_ = length;
                    noise_ = noise;
                    chol_ = std::move(chol);
                    alpha_ = std::move(alpha);
                    valid_ = true;
                }
            }
        }
    }

    bool valid() const { return valid_; }

    void predict(const std::vector<double>& x, double& mean, double& stddev) const {
        std::vector<double> k_star(n_);
        for (std::size_t i = 0; i < n_; ++i) k_star[i] = kernel(x_[i], x, length_);
        mean = 0.0;
        for (std::size_t i = 0; i < n_; ++i) mean += k_star[i] * alpha_[i];
        // v = L^{-1} k_star by forward substitution
        std::vector<double> v = k_star;
        for (std::size_t i = 0; i < n_; ++i) {
            double s = v[i];
            for (std::size_t j = 0; j < i; ++j) s -= chol_[i * n_ + j] * v[j];
            v[i] = s / chol_[i * n_ + i];
        }
        double var = 1.0;
        for (double e : v) var -= e * e;
        stddev = std::sqrt(std::max(var, 1e-12));
    }

  private:
    static double kernel(const std::vector<double>& a, const std::vector<double>& b,
                         double length) {
        double r2 = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double d = a[i] - b[i];
            r2 += d * d;
        }
        return std::exp(-r2 / (2.0 * length * length));
    }

    // Returns the log marginal likelihood, or -inf when the factorization
    // fails even with escalating jitter.
    double fit_once(const std::vector<double>& y, double length, double noise,
                    std::vector<double>& chol, std::vector<double>& alpha) const {
        std::vector<double> gram(n_ * n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j <= i; ++j) {
                const double k = kernel(x_[i], x_[j], length);
                gram[i * n_ + j] = k;
                gram[j * n_ + i] = k;
            }
        for (double jitter = 0.0; jitter <= 1e-2; jitter = jitter == 0.0 ? 1e-10 : jitter * 10.0) {
            chol.assign(gram.begin(), gram.end());
            for (std::size_t i = 0; i < n_; ++i) chol[i * n_ + i] += noise + jitter;
            if (!cholesky_in_place(chol)) continue;
            alpha = y;
            forward_solve(chol, alpha);
            backward_solve(chol, alpha);
            double quad = 0.0;
            for (std::size_t i = 0; i < n_; ++i) quad += y[i] * alpha[i];
            double log_det = 0.0;
            for (std::size_t i = 0; i < n_; ++i) log_det += std::log(chol[i * n_ + i]);
            return -0.5 * quad - log_det -
                   0.5 * static_cast<double>(n_) * std::log(2.0 * std::numbers::pi);
        }
        return -std::numeric_limits<double>::infinity();
    }

    bool cholesky_in_place(std::vector<double>& m) const {
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                double s = m[i * n_ + j];
                for (std::size_t k = 0; k < j; ++k) s -= m[i * n_ + k] * m[j * n_ + k];
                if (i == j) {
                    if (s <= 0.0) return false;
                    m[i * n_ + i] = std::sqrt(s);
                } else {
                    m[i * n_ + j] = s / m[j * n_ + j];
                }
            }
            for (std::size_t j = i + 1; j < n_; ++j) m[i * n_ + j] = 0.0;
        }
        return true;
    }

    void forward_solve(const std::vector<double>& l, std::vector<double>& b) const {
        for (std::size_t i = 0; i < n_; ++i) {
            double s = b[i];
            for (std::size_t j = 0; j < i; ++j) s -= l[i * n_ + j] * b[j];
            b[i] = s / l[i * n_ + i];
        }
    }

    void backward_solve(const std::vector<double>& l, std::vector<double>& b) const {
        for (std::size_t i = n_; i-- > 0;) {
            double s = b[i];
            for (std::size_t j = i + 1; j < n_; ++j) s -= l[j * n_ + i] * b[j];
            b[i] = s / l[i * n_ + i];
        }
    }

    std::vector<std::vector<double>> x_;
    std::size_t n_;
    std::vector<double> chol_;
    std::vector<double> alpha_;
    double length_ = 0.5;
    double noise_ = 1e-2;
    bool valid_ = false;
};

double normal_pdf(double u) {
    return std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double u) {
    return 0.5 * std::erfc(-u / std::numbers::sqrt2);
}

double expected_improvement(double mean, double stddev, double best) {
    constexpr double kExplore = 1e-3;
    const double gain = mean - best - kExplore;
    if (stddev < 1e-12) return std::max(gain, 0.0);
    const double u = gain / stddev;
    return gain * normal_cdf(u) + stddev * normal_pdf(u);
}

// Five-restart acquisition maximization: each restart seeds a pattern search
// from the best of a uniform candidate batch.
std::vector<double> maximize_acquisition(const Surrogate& gp, double best_target,
                                         std::size_t dims, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto score = [&](const std::vector<double>& p) {
        double mean = 0.0, stddev = 0.0;
        gp.predict(p, mean, stddev);
        return expected_improvement(mean, stddev, best_target);
    };

    std::vector<double> overall;
    double overall_score = -std::numeric_limits<double>::infinity();
    for (int restart = 0; restart < 5; ++restart) {
        std::vector<double> point(dims);
        double point_score = -std::numeric_limits<double>::infinity();
        for (int c = 0; c < 128; ++c) {
            std::vector<double> cand(dims);
            for (auto& v : cand) v = unit(rng);
            const double s = score(cand);
            if (s > point_score) {
                point_score = s;
                point = std::move(cand);
            }
        }
        double step = 0.25;
        while (step > 1e-4) {
            bool improved = false;
            for (std::size_t j = 0; j < dims; ++j) {
                for (double dir : {1.0, -1.0}) {
                    std::vector<double> cand = point;
                    cand[j] = std::clamp(cand[j] + dir * step, 0.0, 1.0);
                    const double s = score(cand);
                    if (s > point_score) {
                        point_score = s;
                        point = std::move(cand);
                        improved = true;
                    }
                }
            }
            if (!improved) step *= 0.5;
        }
        if (point_score > overall_score) {
            overall_score = point_score;
            overall = point;
        }
    }
    return overall;
}

} // namespace

SearchResult optimize(const SearchSpace& space, const Objective& objective,
                      const SearchOptions& options) {
    space.validate();
    if (options.budget == 0)
        throw std::invalid_argument("optimize: budget must be at least 1");
    const std::size_t dims = space.size();
    for (const auto& trial : options.prior_trials)
        if (trial.point.size() != dims)
            throw std::invalid_argument("optimize: resumed trial has wrong dimension");

    auto rng = make_rng(derive_seed(options.seed, "optimizer"));
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    SearchResult result;
    result.trials = options.prior_trials;

    std::size_t init = options.init_trials > 0 ? options.init_trials
                                               : std::max<std::size_t>(5, options.budget / 5);
    init = std::min(init, options.budget);

    auto random_point = [&]() {
        std::vector<double> p(dims);
        for (std::size_t j = 0; j < dims; ++j) {
            const auto& dim = space.dimensions[j];
            p[j] = dim.lower + unit(rng) * (dim.upper - dim.lower);
        }
        return p;
    };

    auto surrogate_point = [&]() -> std::vector<double> {
        std::vector<std::vector<double>> points;
        std::vector<double> targets;
        for (const auto& trial : result.trials) {
            if (trial.failed) continue;
            std::vector<double> norm(dims);
            for (std::size_t j = 0; j < dims; ++j) {
                const auto& dim = space.dimensions[j];
                norm[j] = (trial.point[j] - dim.lower) / (dim.upper - dim.lower);
            }
            points.push_back(std::move(norm));
            targets.push_back(trial.objective);
        }
        if (points.size() < 2) return random_point();

        double mean = 0.0;
        for (double t : targets) mean += t;
        mean /= static_cast<double>(targets.size());
        double var = 0.0;
        for (double t : targets) var += (t - mean) * (t - mean);
        var /= static_cast<double>(targets.size());
        const double scale = std::sqrt(var);
        if (scale < 1e-12) return random_point();
        for (double& t : targets) t = (t - mean) / scale;

        Surrogate gp(points, targets);
        if (!gp.valid()) return random_point();
        const double best_target = *std::max_element(targets.begin(), targets.end());
        const auto norm = maximize_acquisition(gp, best_target, dims, rng);
        if (norm.empty()) return random_point();

        std::vector<double> point(dims);
        for (std::size_t j = 0; j < dims; ++j) {
            const auto& dim = space.dimensions[j];
            point[j] = std::clamp(dim.lower + norm[j] * (dim.upper - dim.lower), dim.lower,
                                  dim.upper);
        }
        // A proposal that collapses onto an evaluated point adds no
        // information and would degenerate the next factorization.
        for (const auto& trial : result.trials) {
            if (trial.failed) continue;
            double gap = 0.0;
            for (std::size_t j = 0; j < dims; ++j)
                gap = std::max(gap, std::abs(trial.point[j] - point[j]));
            if (gap < 1e-9) return random_point();
        }
        return point;
    };

    while (result.trials.size() < options.budget) {
        TrialRecord trial;
        trial.index = result.trials.size();
        trial.point = (options.strategy == SearchStrategy::random || trial.index < init)
                          ? random_point()
                          : surrogate_point();
        trial.seed = derive_seed(options.seed, trial.index, "trial");
        try {
            trial.objective = objective(trial.point, trial.seed);
            if (!std::isfinite(trial.objective)) {
                trial.failed = true;
                trial.error = "non-finite objective";
                trial.objective = std::numeric_limits<double>::quiet_NaN();
            }
        } catch (const std::exception& e) {
            trial.failed = true;
            trial.error = e.what();
            trial.objective = std::numeric_limits<double>::quiet_NaN();
        }
        result.trials.push_back(trial);
        if (options.on_trial) options.on_trial(result.trials.back());
    }

    const TrialRecord* best = nullptr;
    for (const auto& trial : result.trials)
        if (!trial.failed && (best == nullptr || trial.objective > best->objective))
            best = &trial;
    if (best == nullptr)
        throw std::runtime_error("optimize: every trial failed");
    result.best = *best;
    return result;
}

std::string trial_to_json_line(const TrialRecord& trial, const SearchSpace& space) {
    nlohmann::ordered_json doc;
    doc["trial"] = trial.index;
    doc["seed"] = trial.seed;
    auto& point = doc["point"];
    for (std::size_t j = 0; j < space.dimensions.size(); ++j)
        point[space.dimensions[j].name] = trial.point.at(j);
    if (trial.failed) {
        doc["objective"] = nullptr;
        doc["failed"] = true;
        doc["error"] = trial.error;
    } else {
        doc["objective"] = trial.objective;
        doc["failed"] = false;
    }
    return doc.dump();
}

TrialRecord trial_from_json_line(const std::string& line, const SearchSpace& space) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(line);
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("trial log: invalid json line: ") + e.what());
    }
    TrialRecord trial;
    trial.index = doc.at("trial").get<std::size_t>();
    trial.seed = doc.at("seed").get<std::uint64_t>();
    trial.point.resize(space.dimensions.size());
    const auto& point = doc.at("point");
    for (std::size_t j = 0; j < space.dimensions.size(); ++j)
        trial.point[j] = point.at(space.dimensions[j].name).get<double>();
    trial.failed = doc.value("failed", false);
    if (trial.failed) {
        trial.error = doc.value("error", std::string());
        trial.objective = std::numeric_limits<double>::quiet_NaN();
    } else {
        trial.objective = doc.at("objective").get<double>();
    }
    return trial;
}

} // namespace srrc
