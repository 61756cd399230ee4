#ifndef PSPACE_KERNEL_HPP
#define PSPACE_KERNEL_HPP

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "pspace/dataset.hpp"

namespace pspace {

struct KernelConfig {
    double C = 1.0;
    double gamma = -1.0; // <0 means 1/d, resolved at fit time
    double epsilon_tube = 0.1;
    double solver_tolerance = 1e-3;
    int max_iterations = 200000;

    double effective_gamma(int d) const { return gamma < 0.0 ? 1.0 / d : gamma; }
};

/// RBF kernel exp(-gamma |x-y|^2).
double rbf(std::span<const double> x, std::span<const double> y, double gamma);

/// Support vectors and dual weights of a fitted machine.
/// decision(x) = sum_i coef_i * K(sv_i, x) + bias, where coef is
/// alpha_i*y_i for classification and beta_i for regression.
struct KernelModel {
    int d = 0;
    double gamma = 0.0;
    double bias = 0.0;
    std::vector<double> sv_coords; // n_sv x d, row-major
    std::vector<double> coef;      // n_sv

    int n_sv() const { return static_cast<int>(coef.size()); }
    double decision(std::span<const double> x) const;
};

struct FitResult {
    KernelModel model;
    std::vector<double> alpha; // full dual solution, one per training point
                               // (2 per point for regression: alpha then alpha*)
    double objective = 0.0;    // dual objective at the solution (min form)
    double kkt_violation = 0.0;
    int iterations = 0;
};

/// Soft-margin classification via SMO with maximal-violating-pair
/// selection; deterministic scan order. labels are +1/-1.
FitResult fit_classifier(const std::vector<double>& points, int d, const std::vector<int>& labels,
                         const KernelConfig& cfg);

/// Epsilon-insensitive support vector regression on the same solver.
FitResult fit_regressor(const std::vector<double>& points, int d,
                        const std::vector<double>& targets, const KernelConfig& cfg);

/// (label, margin); sign(0) resolves to Negative.
std::pair<Label, double> predict_label(const KernelModel& model, std::span<const double> x);

/// Maximal KKT violation of a dual solution, recomputed from scratch.
double kkt_violation(const std::vector<double>& points, int d, const std::vector<int>& labels,
                     const KernelConfig& cfg, const std::vector<double>& alpha);

/// The standard log grid: C in {0.1,1,10,100} x gamma in {0.01,0.1,1,10}/d.
std::vector<KernelConfig> default_grid(int d, const KernelConfig& base = {});

/// k-fold cross-validation over the grid; score is g-mean (classification)
/// or negated MSE (regression). Ties go to smaller C, then smaller gamma.
KernelConfig select_hyperparams(const std::vector<double>& points, int d,
                                const std::vector<int>& labels,
                                const std::vector<double>& targets, bool regression,
                                const std::vector<KernelConfig>& grid, int folds, uint64_t seed);

} // namespace pspace

#endif
