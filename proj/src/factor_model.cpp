#include "pspace/factor_model.hpp"

#include <algorithm>
#include <chrono>
#include <random>
#include <stdexcept>

namespace pspace {

void TrainConfig::validate() const {
    if (d < 1) throw std::runtime_error("dimension must be >= 1");
    if (lambda < 0.0) throw std::runtime_error("lambda must be >= 0");
    if (!(learning_rate > 0.0)) throw std::runtime_error("learning rate must be > 0");
    if (epochs < 1) throw std::runtime_error("epochs must be >= 1");
    if (init_scale == 0.0) throw std::runtime_error("init_scale must be non-zero");
    if (kind == ModelKind::Lsi) throw std::runtime_error("metadata spaces are not trainable");
}

namespace {

double sq_dist(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (size_t k = 0; k < a.size(); ++k) {
        double diff = a[k] - b[k];
        s += diff * diff;
    }
    return s;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

// One observed rating's contribution to the objective.
double rating_term(ModelKind kind, double mu, double r, std::span<const double> a,
                   std::span<const double> b, double dm, double du, double lambda) {
    if (kind == ModelKind::Euclidean) {
        double D = sq_dist(a, b);
        double e = r - (mu + dm + du - D);
        return e * e + lambda * (D * D + dm * dm + du * du);
    }
    double e = r - dot(a, b);
    double reg = 0.0;
    for (size_t k = 0; k < a.size(); ++k) reg += a[k] * a[k] + b[k] * b[k];
    return e * e + lambda * reg;
}

// Analytic gradients of rating_term w.r.t. a, b, dm, du.
void rating_grad(ModelKind kind, double mu, double r, std::span<const double> a,
                 std::span<const double> b, double dm, double du, double lambda,
                 std::span<double> ga, std::span<double> gb, double& gdm, double& gdu) {
    if (kind == ModelKind::Euclidean) {
        double D = sq_dist(a, b);
        double e = r - (mu + dm + du - D);
        double scale = 4.0 * (e + lambda * D);
        for (size_t k = 0; k < a.size(); ++k) {
            double diff = a[k] - b[k];
            ga[k] = scale * diff;
            gb[k] = -scale * diff;
        }
        gdm = -2.0 * e + 2.0 * lambda * dm;
        gdu = -2.0 * e + 2.0 * lambda * du;
    } else {
        double e = r - dot(a, b);
        for (size_t k = 0; k < a.size(); ++k) {
            ga[k] = -2.0 * e * b[k] + 2.0 * lambda * a[k];
            gb[k] = -2.0 * e * a[k] + 2.0 * lambda * b[k];
        }
        gdm = 0.0;
        gdu = 0.0;
    }
}

} // namespace

double PerceptualSpace::predict(int32_t item, int32_t user) const {
    if (item < 0 || item >= n_items()) throw std::out_of_range("invalid item index");
    if (user < 0 || user >= n_users()) throw std::out_of_range("invalid user index");
    if (kind == ModelKind::Lsi) throw std::runtime_error("metadata spaces have no rating model");
    if (kind == ModelKind::Euclidean)
        return mu + item_bias[item] + user_bias[user] - sq_dist(item_row(item), user_row(user));
    return dot(item_row(item), user_row(user));
}

double cost(const PerceptualSpace& space, const RatingDataset& ds, double lambda) {
    double total = 0.0;
    for (const auto& r : ds.ratings)
        total += rating_term(space.kind, space.mu, r.score, space.item_row(r.item),
                             space.user_row(r.user), space.item_bias[r.item],
                             space.user_bias[r.user], lambda);
    return total;
}

double rmse(const PerceptualSpace& space, const RatingDataset& ds) {
    if (ds.ratings.empty()) return std::numeric_limits<double>::quiet_NaN();
    double se = 0.0;
    for (const auto& r : ds.ratings) {
        double e = r.score - space.predict(r.item, r.user);
        se += e * e;
    }
    return std::sqrt(se / static_cast<double>(ds.ratings.size()));
}

std::pair<PerceptualSpace, TrainReport> train(const RatingDataset& ds, const TrainConfig& cfg,
                                              const RatingDataset* holdout) {
    cfg.validate();
    if (ds.ratings.empty()) throw std::runtime_error("cannot train on an empty dataset");

    auto t0 = std::chrono::steady_clock::now();
    PerceptualSpace space;
    space.kind = cfg.kind;
    space.d = cfg.d;
    space.items = ds.items;
    space.users = ds.users;

    double sum = 0.0;
    for (const auto& r : ds.ratings) sum += r.score;
    space.mu = sum / static_cast<double>(ds.ratings.size());

    const size_t nm = ds.n_items(), nu = ds.n_users(), d = cfg.d;
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> init(-cfg.effective_init_scale(),
                                                cfg.effective_init_scale());
    space.item_coords.resize(nm * d);
    space.user_coords.resize(nu * d);
    for (auto& v : space.item_coords) v = init(rng);
    for (auto& v : space.user_coords) v = init(rng);
    space.item_bias.assign(nm, 0.0);
    space.user_bias.assign(nu, 0.0);

    TrainReport report;
    report.initial_cost = cost(space, ds, cfg.lambda);

    std::vector<size_t> order(ds.ratings.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::vector<double> ga(d), gb(d);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (size_t idx : order) {
            const auto& r = ds.ratings[idx];
            double* a = space.item_coords.data() + static_cast<size_t>(r.item) * d;
            double* b = space.user_coords.data() + static_cast<size_t>(r.user) * d;
            double gdm, gdu;
            rating_grad(cfg.kind, space.mu, r.score, {a, d}, {b, d}, space.item_bias[r.item],
                        space.user_bias[r.user], cfg.lambda, ga, gb, gdm, gdu);
            for (size_t k = 0; k < d; ++k) {
                a[k] -= cfg.learning_rate * ga[k];
                b[k] -= cfg.learning_rate * gb[k];
            }
            space.item_bias[r.item] -= cfg.learning_rate * gdm;
            space.user_bias[r.user] -= cfg.learning_rate * gdu;
        }
        double c = cost(space, ds, cfg.lambda);
        if (!std::isfinite(c))
            throw std::runtime_error("training diverged at epoch " + std::to_string(epoch + 1) +
                                     "; try a smaller learning rate");
        report.epoch_cost.push_back(c);
    }
    report.final_cost = report.epoch_cost.back();
    if (holdout && !holdout->ratings.empty()) report.holdout_rmse = rmse(space, *holdout);
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {std::move(space), std::move(report)};
}

double gradient_check(const TrainConfig& cfg, uint64_t seed, int points, double h) {
    const size_t d = cfg.d;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::vector<double> a(d), b(d), ga(d), gb(d);
    double max_rel = 0.0;

    auto central = [&](auto&& set_param, auto&& eval) {
        set_param(h);
        double up = eval();
        set_param(-2.0 * h);
        double down = eval();
        set_param(h); // restore
        return (up - down) / (2.0 * h);
    };
    auto update_rel = [&](double analytic, double numeric) {
        double rel = std::abs(analytic - numeric) / std::max(1.0, std::abs(numeric));
        max_rel = std::max(max_rel, rel);
    };

    for (int p = 0; p < points; ++p) {
        for (auto& v : a) v = unif(rng);
        for (auto& v : b) v = unif(rng);
        double dm = unif(rng), du = unif(rng);
        double mu = 3.0 + unif(rng);
        double r = mu + unif(rng);
        auto eval = [&] { return rating_term(cfg.kind, mu, r, a, b, dm, du, cfg.lambda); };
        double gdm, gdu;
        rating_grad(cfg.kind, mu, r, a, b, dm, du, cfg.lambda, ga, gb, gdm, gdu);
        for (size_t k = 0; k < d; ++k) {
            update_rel(ga[k], central([&](double dlt) { a[k] += dlt; }, eval));
            update_rel(gb[k], central([&](double dlt) { b[k] += dlt; }, eval));
        }
        if (cfg.kind == ModelKind::Euclidean) {
            update_rel(gdm, central([&](double dlt) { dm += dlt; }, eval));
            update_rel(gdu, central([&](double dlt) { du += dlt; }, eval));
        }
    }
    return max_rel;
}

} // namespace pspace
