#ifndef PSPACE_FACTOR_MODEL_HPP
#define PSPACE_FACTOR_MODEL_HPP

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pspace/dataset.hpp"

namespace pspace {

enum class ModelKind : uint8_t { Euclidean = 0, Svd = 1, Lsi = 2 };

struct TrainConfig {
    int d = 100;
    double lambda = 0.02;
    double learning_rate = 0.005;
    int epochs = 30;
    double init_scale = -1.0; // <0 means 0.1/sqrt(d)
    uint64_t seed = 1;
    ModelKind kind = ModelKind::Euclidean;

    double effective_init_scale() const {
        return init_scale < 0.0 ? 0.1 / std::sqrt(static_cast<double>(d)) : init_scale;
    }
    void validate() const;
};

/// Item and user coordinates plus biases; the model is
///   euclidean:  r_hat = mu + delta_m + delta_u - |a_m - b_u|^2
///   svd:        r_hat = a_m . b_u
/// Kind `Lsi` marks an item-only metadata space (no users, no
/// predictions); it reuses this struct so that distance queries,
/// persistence, and attribute expansion work on either space.
struct PerceptualSpace {
    ModelKind kind = ModelKind::Euclidean;
    int d = 0;
    double mu = 0.0;
    IdTable items;
    IdTable users;
    std::vector<double> item_coords; // n_M x d, row-major
    std::vector<double> user_coords; // n_U x d, row-major
    std::vector<double> item_bias;   // n_M, zero for svd
    std::vector<double> user_bias;   // n_U, zero for svd

    int32_t n_items() const { return items.size(); }
    int32_t n_users() const { return users.size(); }

    std::span<const double> item_row(int32_t m) const {
        return {item_coords.data() + static_cast<size_t>(m) * d, static_cast<size_t>(d)};
    }
    std::span<const double> user_row(int32_t u) const {
        return {user_coords.data() + static_cast<size_t>(u) * d, static_cast<size_t>(d)};
    }

    double predict(int32_t item, int32_t user) const;
};

struct TrainReport {
    double initial_cost = 0.0;
    double final_cost = 0.0;
    std::vector<double> epoch_cost; // regularized cost after each epoch
    double holdout_rmse = std::numeric_limits<double>::quiet_NaN();
    double wall_seconds = 0.0;
};

/// Regularized training cost, summed in dataset order:
///   euclidean: sum (r - r_hat)^2 + lambda*(D^2 + delta_m^2 + delta_u^2), D = |a-b|^2
///   svd:       sum (r - a.b)^2 + lambda*(|a|^2 + |b|^2)
double cost(const PerceptualSpace& space, const RatingDataset& ds, double lambda);

/// SGD over seeded epoch shuffles. mu is fixed to the training mean up
/// front. Throws on divergence (non-finite parameters), naming the epoch.
std::pair<PerceptualSpace, TrainReport> train(const RatingDataset& ds, const TrainConfig& cfg,
                                              const RatingDataset* holdout = nullptr);

/// Max relative error between analytic per-rating gradients and central
/// finite differences at `points` random parameter settings.
double gradient_check(const TrainConfig& cfg, uint64_t seed, int points = 50, double h = 1e-5);

double rmse(const PerceptualSpace& space, const RatingDataset& ds);

} // namespace pspace

#endif
