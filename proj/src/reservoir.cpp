#include "srrc/reservoir.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

#include "srrc/kernels.hpp"
#include "srrc/rng.hpp"

namespace srrc {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

double dense_rho(const std::vector<double>& matrix, std::size_t n) {
    Eigen::Map<const RowMat> a(matrix.data(), static_cast<Eigen::Index>(n),
                               static_cast<Eigen::Index>(n));
    Eigen::EigenSolver<Eigen::MatrixXd> solver(a, false);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("spectral_radius: dense eigensolver failed to converge");
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

// Arnoldi iteration with full reorthogonalization. The dominant Ritz pair of
// the projected Hessenberg matrix estimates the spectral radius; the estimate
// is accepted only when the classic residual bound h_{k+1,k} |e_k^T y| is
// small relative to the Ritz value, so an uncertified result can fall back to
// the dense path.
double arnoldi_rho(const std::vector<double>& matrix, std::size_t n, bool& certified) {
    Eigen::Map<const RowMat> a(matrix.data(), static_cast<Eigen::Index>(n),
                               static_cast<Eigen::Index>(n));
    const int m = static_cast<int>(std::min<std::size_t>(n, 120));

    Eigen::VectorXd v(static_cast<Eigen::Index>(n));
    std::uint64_t s = 0x9e3779b97f4a7c15ULL;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        s = splitmix64(s);
        v[i] = static_cast<double>(s >> 11) * 0x1p-52 * 2.0 - 1.0;
    }
    v.normalize();

    double estimate = 0.0;
    certified = false;
    for (int restart = 0; restart < 5; ++restart) {
        Eigen::MatrixXd basis(static_cast<Eigen::Index>(n), m + 1);
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m + 1, m);
        basis.col(0) = v;
        int k = 0;
        bool breakdown = false;
        for (; k < m; ++k) {
            Eigen::VectorXd w = a * basis.col(k);
            for (int pass = 0; pass < 2; ++pass) {
                for (int j = 0; j <= k; ++j) {
                    const double proj = basis.col(j).dot(w);
                    w -= proj * basis.col(j);
                    h(j, k) += proj;
                }
            }
            const double norm = w.norm();
            h(k + 1, k) = norm;
            if (norm < 1e-12) {
                ++k;
                breakdown = true;
                break;
            }
            basis.col(k + 1) = w / norm;
        }

        Eigen::EigenSolver<Eigen::MatrixXd> solver(h.topLeftCorner(k, k), true);
        if (solver.info() != Eigen::Success) break;
        Eigen::Index top = 0;
        solver.eigenvalues().cwiseAbs().maxCoeff(&top);
        const std::complex<double> lambda = solver.eigenvalues()[top];
        const Eigen::VectorXcd y = solver.eigenvectors().col(top);
        estimate = std::abs(lambda);
        const double residual = breakdown ? 0.0 : h(k, k - 1) * std::abs(y[k - 1]);
        if (residual <= 1e-9 * estimate + 1e-300) {
            certified = true;
            return estimate;
        }
        Eigen::VectorXcd ritz = basis.leftCols(k) * y;
        v = ritz.real() + ritz.imag();
        if (v.norm() < 1e-12) v = ritz.real();
        if (v.norm() < 1e-12) break;
        v.normalize();
    }
    return estimate;
}

constexpr std::size_t kDenseEigenLimit = 600;

double block_rho(const std::vector<double>& matrix, std::size_t n) {
    if (n <= kDenseEigenLimit) return dense_rho(matrix, n);
    bool certified = false;
    const double estimate = arnoldi_rho(matrix, n, certified);
    if (certified) return estimate;
    return dense_rho(matrix, n);
}

// Strongly connected components of the exact-zero pattern (iterative Tarjan),
// keeping only components that can carry a nonzero eigenvalue: size >= 2, or a
// single vertex with a self-loop. Vertices on no cycle contribute only zero
// eigenvalues.
std::vector<std::vector<std::size_t>> cyclic_components(const std::vector<double>& m,
                                                        std::size_t n) {
    std::vector<std::vector<std::uint32_t>> adj(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (m[i * n + j] != 0.0) adj[i].push_back(static_cast<std::uint32_t>(j));

    constexpr std::uint32_t unvisited = 0xffffffffu;
    std::vector<std::uint32_t> order(n, unvisited), low(n, 0);
    std::vector<std::uint32_t> stack;
    std::vector<bool> on_stack(n, false);
    struct Frame {
        std::uint32_t vertex;
        std::uint32_t child;
    };
    std::vector<Frame> frames;
    std::vector<std::vector<std::size_t>> out;
    std::uint32_t counter = 0;

    for (std::uint32_t root = 0; root < n; ++root) {
        if (order[root] != unvisited) continue;
        order[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        frames.push_back({root, 0});
        while (!frames.empty()) {
            Frame& f = frames.back();
            if (f.child < adj[f.vertex].size()) {
                const std::uint32_t next = adj[f.vertex][f.child++];
                if (order[next] == unvisited) {
                    order[next] = low[next] = counter++;
                    stack.push_back(next);
                    on_stack[next] = true;
                    frames.push_back({next, 0});
                } else if (on_stack[next]) {
                    low[f.vertex] = std::min(low[f.vertex], order[next]);
                }
            } else {
                const std::uint32_t v = f.vertex;
                frames.pop_back();
                if (!frames.empty())
                    low[frames.back().vertex] = std::min(low[frames.back().vertex], low[v]);
                if (low[v] == order[v]) {
                    std::vector<std::size_t> comp;
                    while (true) {
                        const std::uint32_t w = stack.back();
                        stack.pop_back();
                        on_stack[w] = false;
                        comp.push_back(w);
                        if (w == v) break;
                    }
                    if (comp.size() >= 2 || m[comp[0] * n + comp[0]] != 0.0) {
                        std::sort(comp.begin(), comp.end());
                        out.push_back(std::move(comp));
                    }
                }
            }
        }
    }
    return out;
}

} // namespace

double spectral_radius(const std::vector<double>& matrix, std::size_t n) {
    if (matrix.size() != n * n)
        throw std::invalid_argument("spectral_radius: matrix size does not match n*n");
    if (n == 0) throw std::invalid_argument("spectral_radius: empty matrix");

    // The spectrum is the union over strongly connected blocks of the zero
    // pattern (permute to block triangular form). Condensing before calling
    // the eigensolver matters for correctness, not just speed: QR reports
    // spurious moduli of order eps^(1/k) for a k-long Jordan chain of the
    // zero eigenvalue, so a sparse draw whose pattern is acyclic (true radius
    // exactly zero) would otherwise come back as ~1e-2.
    const auto components = cyclic_components(matrix, n);
    double best = 0.0;
    std::vector<double> block;
    for (const auto& comp : components) {
        const std::size_t m = comp.size();
        if (m == 1) {
            best = std::max(best, std::abs(matrix[comp[0] * n + comp[0]]));
            continue;
        }
        if (m == n) {
            best = std::max(best, block_rho(matrix, n));
            continue;
        }
        block.assign(m * m, 0.0);
        for (std::size_t r = 0; r < m; ++r)
            for (std::size_t c = 0; c < m; ++c)
                block[r * m + c] = matrix[comp[r] * n + comp[c]];
        best = std::max(best, block_rho(block, m));
    }
    return best;
}

void ReservoirParams::validate() const {
    if (size == 0) throw std::invalid_argument("reservoir: size must be positive");
    if (!(leak_rate >= 0.0 && leak_rate <= 1.0))
        throw std::invalid_argument("reservoir: leak_rate must lie in [0, 1]");
    if (!(sparsity > 0.0 && sparsity <= 1.0))
        throw std::invalid_argument("reservoir: sparsity must lie in (0, 1]");
    if (!(spectral_radius > 0.0))
        throw std::invalid_argument("reservoir: spectral_radius must be positive");
    if (!(input_scale_series >= 0.0) || !(input_scale_saliency >= 0.0))
        throw std::invalid_argument("reservoir: input scales must be non-negative");
}

ReservoirWeights init_weights(const ReservoirParams& params) {
    params.validate();
    const std::size_t n = params.size;
    for (int attempt = 0; attempt < 100; ++attempt) {
        const std::uint64_t seed =
            attempt == 0 ? params.seed
                         : derive_seed(params.seed, static_cast<std::uint64_t>(attempt),
                                       "reservoir-resample");
        auto rng = make_rng(seed);
        std::uniform_real_distribution<double> entry(-1.0, 1.0);
        std::uniform_real_distribution<double> keep(0.0, 1.0);

        std::vector<double> w0(n * n);
        for (auto& e : w0) {
            const double value = entry(rng);
            e = keep(rng) < params.sparsity ? value : 0.0;
        }
        const double rho = spectral_radius(w0, n);
        if (rho < 1e-12) continue;

        const double scale = params.spectral_radius / rho;
        for (auto& e : w0) e *= scale;

        ReservoirWeights weights;
        weights.size = n;
        weights.recurrent = std::move(w0);
        weights.input_series.resize(n);
        weights.input_saliency.resize(n);
        std::uniform_real_distribution<double> series_draw(-params.input_scale_series,
                                                           params.input_scale_series);
        std::uniform_real_distribution<double> saliency_draw(-params.input_scale_saliency,
                                                             params.input_scale_saliency);
        for (auto& e : weights.input_series) e = series_draw(rng);
        for (auto& e : weights.input_saliency) e = saliency_draw(rng);
        weights.params = params;
        return weights;
    }
    throw std::runtime_error(
        "init_weights: sparsified draw kept a zero spectral radius after 100 attempts");
}

namespace {

// Shared update loop. Either input channel may be absent (null pointer);
// the state before the first input is the zero vector and the stored row for
// step t is the post-update state used to predict the label at t.
StateTrajectory run_impl(const double* series, const double* saliency, std::size_t steps,
                         const ReservoirWeights& weights, const ReservoirParams& params) {
    params.validate();
    if (weights.size != params.size)
        throw std::invalid_argument("reservoir run: weights and params disagree on size");
    const std::size_t n = weights.size;
    if (weights.recurrent.size() != n * n || weights.input_series.size() != n ||
        weights.input_saliency.size() != n)
        throw std::invalid_argument("reservoir run: malformed weights");

    StateTrajectory traj;
    traj.steps = steps;
    traj.size = n;
    traj.states.assign(steps * n, 0.0);

    const bool use_csr = params.sparsity <= 0.25 && n >= 256;
    kernels::CsrMatrix csr;
    if (use_csr) csr = kernels::CsrMatrix::from_dense(weights.recurrent, n, n);

    std::vector<double> state(n, 0.0);
    std::vector<double> drive(n, 0.0);
    for (std::size_t t = 0; t < steps; ++t) {
        if (use_csr)
            kernels::csr_matvec(csr, state, drive);
        else
            kernels::dense_matvec(weights.recurrent, state, drive, n, n);
        if (series != nullptr) {
            const double u = series[t];
            for (std::size_t i = 0; i < n; ++i) drive[i] += weights.input_series[i] * u;
        }
        if (saliency != nullptr) {
            const double s = saliency[t];
            for (std::size_t i = 0; i < n; ++i) drive[i] += weights.input_saliency[i] * s;
        }
        std::span<double> row(traj.states.data() + t * n, n);
        kernels::leaky_tanh_step(state, drive, params.leak_rate, row);
        std::copy(row.begin(), row.end(), state.begin());
    }
    return traj;
}

} // namespace

StateTrajectory run_rc(const LabeledSeries& series, const ReservoirWeights& w,
                       const ReservoirParams& params) {
    return run_impl(series.values.data(), nullptr, series.size(), w, params);
}

StateTrajectory run_sr_rc(const SaliencyMap& saliency, const ReservoirWeights& w,
                          const ReservoirParams& params) {
    return run_impl(nullptr, saliency.values.data(), saliency.size(), w, params);
}

StateTrajectory run_multi_sr_rc(const LabeledSeries& series, const SaliencyMap& saliency,
                                const ReservoirWeights& w, const ReservoirParams& params) {
    if (series.size() != saliency.size())
        throw std::invalid_argument("reservoir run: series and saliency lengths differ");
    return run_impl(series.values.data(), saliency.values.data(), series.size(), w, params);
}

namespace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_vector_row(std::ofstream& out, const char* tag, std::size_t index,
                      const double* values, std::size_t count) {
    out << tag << ',' << index;
    for (std::size_t j = 0; j < count; ++j) out << ',' << format_double(values[j]);
    out << '\n';
}

} // namespace

void save_weights_csv(const ReservoirWeights& w, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_weights_csv: cannot open " + path);
    out << "record,index,values\n";
    out << "param_size," << w.size << '\n';
    out << "param_leak_rate," << format_double(w.params.leak_rate) << '\n';
    out << "param_sparsity," << format_double(w.params.sparsity) << '\n';
    out << "param_spectral_radius," << format_double(w.params.spectral_radius) << '\n';
    out << "param_input_scale_series," << format_double(w.params.input_scale_series) << '\n';
    out << "param_input_scale_saliency," << format_double(w.params.input_scale_saliency)
        << '\n';
    out << "param_seed," << w.params.seed << '\n';
    for (std::size_t i = 0; i < w.size; ++i)
        write_vector_row(out, "W", i, w.recurrent.data() + i * w.size, w.size);
    write_vector_row(out, "W_in", 0, w.input_series.data(), w.size);
    write_vector_row(out, "W_S", 0, w.input_saliency.data(), w.size);
    if (!out) throw std::runtime_error("save_weights_csv: write failed for " + path);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

double parse_double_field(const std::string& text, const std::string& context) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("load_weights_csv: cannot parse " + context + " '" + text +
                                 "'");
    }
}

} // namespace

ReservoirWeights load_weights_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_weights_csv: cannot open " + path);

    ReservoirWeights w;
    bool size_seen = false;
    std::size_t rows_seen = 0;
    bool input_series_seen = false;
    bool input_saliency_seen = false;

    std::string line;
    std::getline(in, line); // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto fields = split_csv_line(line);
        const std::string& tag = fields.front();
        if (tag == "param_size") {
            w.size = static_cast<std::size_t>(std::stoull(fields.at(1)));
            w.params.size = w.size;
            if (w.size == 0) throw std::runtime_error("load_weights_csv: zero size");
            w.recurrent.assign(w.size * w.size, 0.0);
            w.input_series.assign(w.size, 0.0);
            w.input_saliency.assign(w.size, 0.0);
            size_seen = true;
        } else if (tag == "param_leak_rate") {
            w.params.leak_rate = parse_double_field(fields.at(1), "leak_rate");
        } else if (tag == "param_sparsity") {
            w.params.sparsity = parse_double_field(fields.at(1), "sparsity");
        } else if (tag == "param_spectral_radius") {
            w.params.spectral_radius = parse_double_field(fields.at(1), "spectral_radius");
        } else if (tag == "param_input_scale_series") {
            w.params.input_scale_series = parse_double_field(fields.at(1), "input_scale_series");
        } else if (tag == "param_input_scale_saliency") {
            w.params.input_scale_saliency =
                parse_double_field(fields.at(1), "input_scale_saliency");
        } else if (tag == "param_seed") {
            w.params.seed = std::stoull(fields.at(1));
        } else if (tag == "W" || tag == "W_in" || tag == "W_S") {
            if (!size_seen)
                throw std::runtime_error("load_weights_csv: matrix row before param_size");
            if (fields.size() != w.size + 2)
                throw std::runtime_error("load_weights_csv: wrong field count in row '" +
                                         tag + "'");
            double* dest = nullptr;
            if (tag == "W") {
                const std::size_t i = static_cast<std::size_t>(std::stoull(fields.at(1)));
                if (i >= w.size)
                    throw std::runtime_error("load_weights_csv: W row index out of range");
                dest = w.recurrent.data() + i * w.size;
                ++rows_seen;
            } else if (tag == "W_in") {
                dest = w.input_series.data();
                input_series_seen = true;
            } else {
                dest = w.input_saliency.data();
                input_saliency_seen = true;
            }
            for (std::size_t j = 0; j < w.size; ++j)
                dest[j] = parse_double_field(fields[j + 2], tag + " entry");
        } else {
            throw std::runtime_error("load_weights_csv: unknown record '" + tag + "'");
        }
    }
    if (!size_seen || rows_seen != w.size || !input_series_seen || !input_saliency_seen)
        throw std::runtime_error("load_weights_csv: incomplete snapshot in " + path);
    return w;
}

} // namespace srrc
