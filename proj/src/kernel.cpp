#include "pspace/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "pspace/metrics.hpp"

namespace pspace {

double rbf(std::span<const double> x, std::span<const double> y, double gamma) {
    double s = 0.0;
    for (size_t k = 0; k < x.size(); ++k) {
        double diff = x[k] - y[k];
        s += diff * diff;
    }
    return std::exp(-gamma * s);
}

double KernelModel::decision(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != d)
        throw std::runtime_error("dimension mismatch: expected " + std::to_string(d) + ", got " +
                                 std::to_string(x.size()));
    double f = bias;
    for (int i = 0; i < n_sv(); ++i)
        f += coef[i] * rbf({sv_coords.data() + static_cast<size_t>(i) * d,
                            static_cast<size_t>(d)},
                           x, gamma);
    return f;
}

std::pair<Label, double> predict_label(const KernelModel& model, std::span<const double> x) {
    double margin = model.decision(x);
    return {margin > 0.0 ? Label::Positive : Label::Negative, margin};
}

namespace {

// Minimize 1/2 z'Qz + p'z  s.t.  s'z = 0, 0 <= z_i <= C, with SMO over
// maximal violating pairs. Q is dense row-major n x n.
struct SmoSolution {
    std::vector<double> z;
    double bias;
    double objective;
    double violation;
    int iterations;
};

SmoSolution solve_smo(const std::vector<double>& Q, const std::vector<double>& p,
                      const std::vector<int>& s, double C, double tol, int max_iter) {
    const int n = static_cast<int>(p.size());
    std::vector<double> z(n, 0.0), g(p); // g = Qz + p, and z starts at 0
    double m_up = 0.0, m_low = 0.0;
    int iter = 0;
    while (true) {
        int i = -1, j = -1;
        m_up = -std::numeric_limits<double>::infinity();
        m_low = std::numeric_limits<double>::infinity();
        for (int k = 0; k < n; ++k) {
            double v = -s[k] * g[k];
            bool at_lower = z[k] <= 0.0, at_upper = z[k] >= C;
            bool in_up = s[k] > 0 ? !at_upper : !at_lower;
            bool in_low = s[k] > 0 ? !at_lower : !at_upper;
            if (in_up && v > m_up) {
                m_up = v;
                i = k;
            }
            if (in_low && v < m_low) {
                m_low = v;
                j = k;
            }
        }
        if (i < 0 || j < 0 || m_up - m_low < tol) break;
        if (++iter > max_iter)
            throw std::runtime_error("solver did not converge in " + std::to_string(max_iter) +
                                     " iterations (KKT violation " +
                                     std::to_string(m_up - m_low) + ")");

        // step direction dz_i = s_i*t, dz_j = -s_j*t keeps s'z constant
        double curv = Q[static_cast<size_t>(i) * n + i] + Q[static_cast<size_t>(j) * n + j] -
                      2.0 * s[i] * s[j] * Q[static_cast<size_t>(i) * n + j];
        double slope = s[i] * g[i] - s[j] * g[j]; // negative by pair choice
        double t = curv > 1e-12 ? -slope / curv : std::numeric_limits<double>::infinity();
        // clip to the box on both coordinates
        double t_max_i = s[i] > 0 ? C - z[i] : z[i];
        double t_max_j = s[j] > 0 ? z[j] : C - z[j];
        t = std::min({t, t_max_i, t_max_j});
        double dzi = s[i] * t, dzj = -s[j] * t;
        z[i] += dzi;
        z[j] += dzj;
        const double* Qi = Q.data() + static_cast<size_t>(i) * n;
        const double* Qj = Q.data() + static_cast<size_t>(j) * n;
        for (int k = 0; k < n; ++k) g[k] += Qi[k] * dzi + Qj[k] * dzj;
    }

    double b_sum = 0.0;
    int b_count = 0;
    for (int k = 0; k < n; ++k)
        if (z[k] > 0.0 && z[k] < C) {
            b_sum += -s[k] * g[k];
            ++b_count;
        }
    double bias = b_count > 0 ? b_sum / b_count : 0.5 * (m_up + m_low);
    if (!std::isfinite(bias)) bias = 0.0; // fully degenerate instance

    double obj = 0.0;
    for (int k = 0; k < n; ++k) obj += z[k] * (g[k] + p[k]);
    return {std::move(z), bias, 0.5 * obj, std::max(0.0, m_up - m_low), iter};
}

std::vector<double> kernel_matrix(const std::vector<double>& points, int d, double gamma) {
    const int n = static_cast<int>(points.size()) / d;
    std::vector<double> K(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
        std::span<const double> xi{points.data() + static_cast<size_t>(i) * d,
                                   static_cast<size_t>(d)};
        K[static_cast<size_t>(i) * n + i] = 1.0;
        for (int j = i + 1; j < n; ++j) {
            double v = rbf(xi,
                           {points.data() + static_cast<size_t>(j) * d, static_cast<size_t>(d)},
                           gamma);
            K[static_cast<size_t>(i) * n + j] = v;
            K[static_cast<size_t>(j) * n + i] = v;
        }
    }
    return K;
}

KernelModel collect_svs(const std::vector<double>& points, int d, double gamma, double bias,
                        const std::vector<double>& coef_full) {
    KernelModel model;
    model.d = d;
    model.gamma = gamma;
    model.bias = bias;
    const int n = static_cast<int>(coef_full.size());
    for (int i = 0; i < n; ++i) {
        if (std::abs(coef_full[i]) <= 1e-12) continue;
        model.coef.push_back(coef_full[i]);
        model.sv_coords.insert(model.sv_coords.end(),
                               points.begin() + static_cast<size_t>(i) * d,
                               points.begin() + static_cast<size_t>(i + 1) * d);
    }
    return model;
}

} // namespace

FitResult fit_classifier(const std::vector<double>& points, int d, const std::vector<int>& labels,
                         const KernelConfig& cfg) {
    const int n = static_cast<int>(labels.size());
    if (n < 2 || static_cast<int>(points.size()) != n * d)
        throw std::runtime_error("bad training set shape");
    int pos = 0;
    for (int y : labels) {
        if (y != 1 && y != -1) throw std::runtime_error("labels must be +1/-1");
        if (y == 1) ++pos;
    }
    if (pos == 0 || pos == n)
        throw std::runtime_error("training set contains a single class");

    double gamma = cfg.effective_gamma(d);
    auto K = kernel_matrix(points, d, gamma);
    std::vector<double> Q(static_cast<size_t>(n) * n), p(n, -1.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            Q[static_cast<size_t>(i) * n + j] =
                labels[i] * labels[j] * K[static_cast<size_t>(i) * n + j];

    auto sol = solve_smo(Q, p, labels, cfg.C, cfg.solver_tolerance, cfg.max_iterations);

    std::vector<double> coef(n);
    for (int i = 0; i < n; ++i) coef[i] = sol.z[i] * labels[i];
    FitResult res;
    res.model = collect_svs(points, d, gamma, sol.bias, coef);
    res.alpha = std::move(sol.z);
    res.objective = sol.objective;
    res.kkt_violation = sol.violation;
    res.iterations = sol.iterations;
    return res;
}

FitResult fit_regressor(const std::vector<double>& points, int d,
                        const std::vector<double>& targets, const KernelConfig& cfg) {
    const int n = static_cast<int>(targets.size());
    if (n < 2 || static_cast<int>(points.size()) != n * d)
        throw std::runtime_error("need at least 2 points with matching coordinates");

    double gamma = cfg.effective_gamma(d);
    auto K = kernel_matrix(points, d, gamma);
    const int m = 2 * n; // alpha block then alpha* block
    std::vector<double> Q(static_cast<size_t>(m) * m), p(m);
    std::vector<int> s(m);
    for (int i = 0; i < n; ++i) {
        p[i] = cfg.epsilon_tube - targets[i];
        p[n + i] = cfg.epsilon_tube + targets[i];
        s[i] = 1;
        s[n + i] = -1;
        for (int j = 0; j < n; ++j) {
            double k = K[static_cast<size_t>(i) * n + j];
            Q[static_cast<size_t>(i) * m + j] = k;
            Q[static_cast<size_t>(i) * m + n + j] = -k;
            Q[static_cast<size_t>(n + i) * m + j] = -k;
            Q[static_cast<size_t>(n + i) * m + n + j] = k;
        }
    }

    auto sol = solve_smo(Q, p, s, cfg.C, cfg.solver_tolerance, cfg.max_iterations);

    std::vector<double> beta(n);
    for (int i = 0; i < n; ++i) beta[i] = sol.z[i] - sol.z[n + i];
    FitResult res;
    res.model = collect_svs(points, d, gamma, sol.bias, beta);
    res.alpha = std::move(sol.z);
    res.objective = sol.objective;
    res.kkt_violation = sol.violation;
    res.iterations = sol.iterations;
    return res;
}

double kkt_violation(const std::vector<double>& points, int d, const std::vector<int>& labels,
                     const KernelConfig& cfg, const std::vector<double>& alpha) {
    const int n = static_cast<int>(labels.size());
    double gamma = cfg.effective_gamma(d);
    double m_up = -std::numeric_limits<double>::infinity();
    double m_low = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        std::span<const double> xi{points.data() + static_cast<size_t>(i) * d,
                                   static_cast<size_t>(d)};
        double u = 0.0;
        for (int j = 0; j < n; ++j)
            u += alpha[j] * labels[j] *
                 rbf(xi, {points.data() + static_cast<size_t>(j) * d, static_cast<size_t>(d)},
                     gamma);
        double v = labels[i] - u; // -y_i g_i of the dual
        bool at_lower = alpha[i] <= 0.0, at_upper = alpha[i] >= cfg.C;
        bool in_up = labels[i] > 0 ? !at_upper : !at_lower;
        bool in_low = labels[i] > 0 ? !at_lower : !at_upper;
        if (in_up) m_up = std::max(m_up, v);
        if (in_low) m_low = std::min(m_low, v);
    }
    return std::max(0.0, m_up - m_low);
}

std::vector<KernelConfig> default_grid(int d, const KernelConfig& base) {
    std::vector<KernelConfig> grid;
    for (double C : {0.1, 1.0, 10.0, 100.0})
        for (double g : {0.01, 0.1, 1.0, 10.0}) {
            KernelConfig cfg = base;
            cfg.C = C;
            cfg.gamma = g / d;
            grid.push_back(cfg);
        }
    return grid;
}

KernelConfig select_hyperparams(const std::vector<double>& points, int d,
                                const std::vector<int>& labels,
                                const std::vector<double>& targets, bool regression,
                                const std::vector<KernelConfig>& grid, int folds, uint64_t seed) {
    if (grid.empty()) throw std::runtime_error("hyperparameter grid is empty");
    const int n = regression ? static_cast<int>(targets.size()) : static_cast<int>(labels.size());
    if (folds < 2) throw std::runtime_error("folds must be >= 2");
    if (n < folds) throw std::runtime_error("fewer points than folds");

    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    const KernelConfig* best = nullptr;
    double best_score = -std::numeric_limits<double>::infinity();
    for (const auto& cfg : grid) {
        Confusion pooled;
        double sq_err = 0.0;
        int val_count = 0;
        for (int f = 0; f < folds; ++f) {
            std::vector<double> tr_x, va_x;
            std::vector<int> tr_y;
            std::vector<double> tr_t;
            std::vector<int> va_idx;
            for (int i = 0; i < n; ++i) {
                bool val = (i % folds) == f;
                auto begin = points.begin() + static_cast<size_t>(order[i]) * d;
                if (val) {
                    va_x.insert(va_x.end(), begin, begin + d);
                    va_idx.push_back(order[i]);
                } else {
                    tr_x.insert(tr_x.end(), begin, begin + d);
                    if (regression)
                        tr_t.push_back(targets[order[i]]);
                    else
                        tr_y.push_back(labels[order[i]]);
                }
            }
            if (va_idx.empty()) continue;
            if (regression) {
                auto fit = fit_regressor(tr_x, d, tr_t, cfg);
                for (size_t v = 0; v < va_idx.size(); ++v) {
                    double pred = fit.model.decision(
                        {va_x.data() + v * d, static_cast<size_t>(d)});
                    double e = pred - targets[va_idx[v]];
                    sq_err += e * e;
                    ++val_count;
                }
            } else {
                bool single_class =
                    std::all_of(tr_y.begin(), tr_y.end(), [&](int y) { return y == tr_y[0]; });
                FitResult fit;
                if (!single_class) fit = fit_classifier(tr_x, d, tr_y, cfg);
                for (size_t v = 0; v < va_idx.size(); ++v) {
                    Label pred;
                    if (single_class) {
                        pred = tr_y[0] > 0 ? Label::Positive : Label::Negative;
                    } else {
                        pred = predict_label(fit.model,
                                             {va_x.data() + v * d, static_cast<size_t>(d)})
                                   .first;
                    }
                    bool truth_pos = labels[va_idx[v]] > 0;
                    if (truth_pos)
                        (pred == Label::Positive ? pooled.tp : pooled.fn)++;
                    else
                        (pred == Label::Negative ? pooled.tn : pooled.fp)++;
                }
            }
        }
        double score;
        if (regression) {
            score = val_count > 0 ? -sq_err / val_count : -std::numeric_limits<double>::infinity();
        } else {
            try {
                score = gmean(pooled);
            } catch (const std::exception&) {
                score = 0.0;
            }
        }
        bool better = score > best_score;
        bool tie = best && score == best_score &&
                   (cfg.C < best->C || (cfg.C == best->C && cfg.gamma < best->gamma));
        if (better || tie) {
            best_score = score;
            best = &cfg;
        }
    }
    return *best;
}

} // namespace pspace
