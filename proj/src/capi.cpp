#include "pspace.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "pspace/crowdsim.hpp"
#include "pspace/dataset.hpp"
#include "pspace/expansion.hpp"
#include "pspace/factor_model.hpp"
#include "pspace/kernel.hpp"
#include "pspace/lsi.hpp"
#include "pspace/metrics.hpp"
#include "pspace/space.hpp"

struct pspace_dataset {
    pspace::RatingDataset ds;
};
struct pspace_space {
    pspace::PerceptualSpace space;
};
struct pspace_labels {
    pspace::LabelSet labels;
};
struct pspace_gold {
    pspace::GoldSample gold;
};
struct pspace_result {
    pspace::ExpansionResult result;
};
struct pspace_stream {
    pspace::CampaignResult campaign;
    int excluded = 0;
};

namespace {

thread_local std::string g_error;

template <typename F>
pspace_status guarded(F&& f) {
    try {
        f();
        return PSPACE_OK;
    } catch (const std::exception& e) {
        g_error = e.what();
        return PSPACE_ERR_RUNTIME;
    }
}

pspace_status null_arg(const char* what) {
    g_error = std::string("null argument: ") + what;
    return PSPACE_ERR_NULL_ARG;
}

pspace::KernelConfig to_kernel_config(const pspace_kernel_config* cfg) {
    pspace::KernelConfig out;
    if (cfg) {
        out.C = cfg->C;
        out.gamma = cfg->gamma;
        out.epsilon_tube = cfg->epsilon_tube;
        out.solver_tolerance = cfg->tolerance;
        out.max_iterations = cfg->max_iterations;
    }
    return out;
}

void write_labels_file(const pspace::LabelSet& labels, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (const auto& [id, label] : labels.labels)
        out << id << '\t' << (label == pspace::Label::Positive ? '1' : '0') << '\n';
    if (!out) throw std::runtime_error("write failed for " + path);
}

} // namespace

extern "C" {

const char* pspace_last_error(void) { return g_error.c_str(); }

pspace_status pspace_dataset_load(const char* path, double scale_min, double scale_max,
                                  pspace_dataset** out) {
    if (!path || !out) return null_arg("pspace_dataset_load");
    return guarded([&] {
        auto* h = new pspace_dataset{pspace::load_ratings(path, scale_min, scale_max)};
        *out = h;
    });
}

void pspace_dataset_free(pspace_dataset* ds) { delete ds; }

pspace_status pspace_dataset_counts(const pspace_dataset* ds, int64_t* items, int64_t* users,
                                    int64_t* ratings) {
    if (!ds) return null_arg("pspace_dataset_counts");
    if (items) *items = ds->ds.n_items();
    if (users) *users = ds->ds.n_users();
    if (ratings) *ratings = static_cast<int64_t>(ds->ds.ratings.size());
    return PSPACE_OK;
}

pspace_status pspace_dataset_split(const pspace_dataset* ds, double fraction, uint64_t seed,
                                   pspace_dataset** train, pspace_dataset** test) {
    if (!ds || !train || !test) return null_arg("pspace_dataset_split");
    return guarded([&] {
        auto [tr, te] = pspace::split_holdout(ds->ds, fraction, seed);
        *train = new pspace_dataset{std::move(tr)};
        *test = new pspace_dataset{std::move(te)};
    });
}

pspace_status pspace_labels_load(const char* path, const char* attribute, int regression,
                                 pspace_labels** out) {
    if (!path || !attribute || !out) return null_arg("pspace_labels_load");
    return guarded([&] {
        *out = new pspace_labels{pspace::load_labels(path, attribute, regression != 0)};
    });
}

void pspace_labels_free(pspace_labels* labels) { delete labels; }

pspace_status pspace_labels_count(const pspace_labels* labels, int64_t* positives,
                                  int64_t* negatives) {
    if (!labels) return null_arg("pspace_labels_count");
    int64_t pos = 0, neg = 0;
    for (const auto& [id, l] : labels->labels.labels)
        (l == pspace::Label::Positive ? pos : neg)++;
    if (positives) *positives = pos;
    if (negatives) *negatives = neg;
    return PSPACE_OK;
}

pspace_status pspace_gold_load(const char* path, pspace_gold** out) {
    if (!path || !out) return null_arg("pspace_gold_load");
    return guarded([&] { *out = new pspace_gold{pspace::load_gold(path)}; });
}

pspace_status pspace_gold_sample(const pspace_labels* truth, int n, uint64_t seed,
                                 pspace_gold** out) {
    if (!truth || !out) return null_arg("pspace_gold_sample");
    return guarded([&] { *out = new pspace_gold{pspace::sample_gold(truth->labels, n, seed)}; });
}

void pspace_gold_free(pspace_gold* gold) { delete gold; }

void pspace_train_config_default(pspace_train_config* cfg) {
    if (!cfg) return;
    *cfg = {100, 0.02, 0.005, 30, -1.0, 1, 0};
}

pspace_status pspace_train(const pspace_dataset* ds, const pspace_train_config* cfg,
                           const pspace_dataset* holdout, pspace_space** out,
                           pspace_train_report* report) {
    if (!ds || !cfg || !out) return null_arg("pspace_train");
    return guarded([&] {
        pspace::TrainConfig tc;
        tc.d = cfg->d;
        tc.lambda = cfg->lambda;
        tc.learning_rate = cfg->learning_rate;
        tc.epochs = cfg->epochs;
        tc.init_scale = cfg->init_scale;
        tc.seed = cfg->seed;
        tc.kind = cfg->svd_kind ? pspace::ModelKind::Svd : pspace::ModelKind::Euclidean;
        auto [space, rep] = pspace::train(ds->ds, tc, holdout ? &holdout->ds : nullptr);
        if (report)
            *report = {rep.initial_cost, rep.final_cost, rep.holdout_rmse, rep.wall_seconds};
        *out = new pspace_space{std::move(space)};
    });
}

pspace_status pspace_gradient_check(int svd_kind, int d, double lambda, uint64_t seed, int points,
                                    double* max_rel_error) {
    if (!max_rel_error) return null_arg("pspace_gradient_check");
    return guarded([&] {
        pspace::TrainConfig cfg;
        cfg.d = d;
        cfg.lambda = lambda;
        cfg.kind = svd_kind ? pspace::ModelKind::Svd : pspace::ModelKind::Euclidean;
        *max_rel_error = pspace::gradient_check(cfg, seed, points);
    });
}

pspace_status pspace_space_save(const pspace_space* space, const char* path) {
    if (!space || !path) return null_arg("pspace_space_save");
    return guarded([&] { pspace::save_space(space->space, path); });
}

pspace_status pspace_space_load(const char* path, pspace_space** out) {
    if (!path || !out) return null_arg("pspace_space_load");
    return guarded([&] { *out = new pspace_space{pspace::load_space(path)}; });
}

void pspace_space_free(pspace_space* space) { delete space; }

pspace_status pspace_space_info(const pspace_space* space, int* d, double* mu, int64_t* n_items,
                                int64_t* n_users) {
    if (!space) return null_arg("pspace_space_info");
    if (d) *d = space->space.d;
    if (mu) *mu = space->space.mu;
    if (n_items) *n_items = space->space.n_items();
    if (n_users) *n_users = space->space.n_users();
    return PSPACE_OK;
}

pspace_status pspace_space_distance(const pspace_space* space, const char* item_a,
                                    const char* item_b, double* out) {
    if (!space || !item_a || !item_b || !out) return null_arg("pspace_space_distance");
    return guarded([&] {
        int32_t a = space->space.items.find(item_a);
        int32_t b = space->space.items.find(item_b);
        if (a < 0) throw std::runtime_error(std::string("unknown item '") + item_a + "'");
        if (b < 0) throw std::runtime_error(std::string("unknown item '") + item_b + "'");
        *out = pspace::distance(space->space, a, b);
    });
}

pspace_status pspace_space_predict(const pspace_space* space, const char* item, const char* user,
                                   double* out) {
    if (!space || !item || !user || !out) return null_arg("pspace_space_predict");
    return guarded([&] {
        int32_t m = space->space.items.find(item);
        int32_t u = space->space.users.find(user);
        if (m < 0) throw std::runtime_error(std::string("unknown item '") + item + "'");
        if (u < 0) throw std::runtime_error(std::string("unknown user '") + user + "'");
        *out = space->space.predict(m, u);
    });
}

pspace_status pspace_space_neighbors(const pspace_space* space, const char* item_id, int k,
                                     pspace_neighbor_cb cb, void* ctx) {
    if (!space || !item_id || !cb) return null_arg("pspace_space_neighbors");
    return guarded([&] {
        int32_t m = space->space.items.find(item_id);
        if (m < 0) throw std::runtime_error(std::string("unknown item '") + item_id + "'");
        for (const auto& [idx, dist] : pspace::nearest_neighbors(space->space, m, k))
            cb(space->space.items.name(idx).c_str(), dist, ctx);
    });
}

pspace_status pspace_lsi_build(const char* metadata_path, int k, pspace_space** out) {
    if (!metadata_path || !out) return null_arg("pspace_lsi_build");
    return guarded([&] {
        auto corpus = pspace::load_metadata(metadata_path);
        *out = new pspace_space{pspace::build_metadata_space(corpus, k)};
    });
}

void pspace_kernel_config_default(pspace_kernel_config* cfg) {
    if (!cfg) return;
    pspace::KernelConfig def;
    *cfg = {def.C, def.gamma, def.epsilon_tube, def.solver_tolerance, def.max_iterations};
}

pspace_status pspace_expand(const pspace_space* space, const pspace_gold* gold,
                            const pspace_kernel_config* cfg, int folds, uint64_t seed,
                            pspace_result** out) {
    if (!space || !gold || !out) return null_arg("pspace_expand");
    return guarded([&] {
        pspace::ExpandOptions opts;
        if (cfg) opts.fixed = to_kernel_config(cfg);
        opts.folds = folds;
        opts.seed = seed;
        *out = new pspace_result{pspace::expand(space->space, gold->gold, opts)};
    });
}

pspace_status pspace_expand_regression(const pspace_space* space, const pspace_labels* targets,
                                       const pspace_kernel_config* cfg, int folds, uint64_t seed,
                                       pspace_result** out) {
    if (!space || !targets || !out) return null_arg("pspace_expand_regression");
    return guarded([&] {
        pspace::ExpandOptions opts;
        if (cfg) opts.fixed = to_kernel_config(cfg);
        opts.folds = folds;
        opts.seed = seed;
        *out = new pspace_result{
            pspace::expand_regression(space->space, targets->labels.scores, opts)};
    });
}

void pspace_result_free(pspace_result* result) { delete result; }

pspace_status pspace_result_save(const pspace_result* result, const char* path) {
    if (!result || !path) return null_arg("pspace_result_save");
    return guarded([&] {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error(std::string("cannot write ") + path);
        char margin[32];
        const auto& r = result->result;
        for (size_t i = 0; i < r.ids.size(); ++i) {
            std::snprintf(margin, sizeof margin, "%.17g", r.margins[i]);
            out << r.ids[i] << '\t' << (r.labels[i] == pspace::Label::Positive ? '1' : '0')
                << '\t' << margin << '\n';
        }
        if (!out) throw std::runtime_error(std::string("write failed for ") + path);
    });
}

pspace_status pspace_result_gmean(const pspace_result* result, const pspace_labels* truth,
                                  double* out) {
    if (!result || !truth || !out) return null_arg("pspace_result_gmean");
    return guarded([&] {
        *out = pspace::gmean(pspace::confusion(result->result.as_labelset(), truth->labels));
    });
}

pspace_status pspace_detect_noise(const pspace_space* space, const pspace_labels* labels,
                                  const pspace_kernel_config* cfg, int folds, uint64_t seed,
                                  const char* flags_out_path, int64_t* flagged_count) {
    if (!space || !labels) return null_arg("pspace_detect_noise");
    return guarded([&] {
        pspace::ExpandOptions opts;
        if (cfg) opts.fixed = to_kernel_config(cfg);
        opts.folds = folds;
        opts.seed = seed;
        auto report = pspace::detect_noise(space->space, labels->labels, opts);
        if (flags_out_path) {
            std::ofstream out(flags_out_path, std::ios::binary);
            if (!out) throw std::runtime_error(std::string("cannot write ") + flags_out_path);
            char margin[32];
            for (const auto& [id, m] : report.flagged) {
                std::snprintf(margin, sizeof margin, "%.17g", m);
                out << id << '\t' << margin << '\n';
            }
            if (!out)
                throw std::runtime_error(std::string("write failed for ") + flags_out_path);
        }
        if (flagged_count) *flagged_count = static_cast<int64_t>(report.flagged.size());
    });
}

pspace_status pspace_detect_noise_eval(const pspace_space* space, const pspace_labels* labels,
                                       double fraction, const pspace_kernel_config* cfg,
                                       int folds, uint64_t seed, double* precision,
                                       double* recall) {
    if (!space || !labels || !precision || !recall) return null_arg("pspace_detect_noise_eval");
    return guarded([&] {
        if (!(fraction > 0.0 && fraction < 1.0))
            throw std::runtime_error("flip fraction must be in (0,1)");
        std::vector<std::string> ids;
        for (const auto& [id, l] : labels->labels.labels) ids.push_back(id);
        std::mt19937_64 rng(seed);
        std::shuffle(ids.begin(), ids.end(), rng);
        size_t flips = static_cast<size_t>(std::llround(fraction * ids.size()));
        pspace::LabelSet noisy = labels->labels;
        std::set<std::string> flipped;
        for (size_t i = 0; i < flips; ++i) {
            auto& l = noisy.labels[ids[i]];
            l = l == pspace::Label::Positive ? pspace::Label::Negative : pspace::Label::Positive;
            flipped.insert(ids[i]);
        }
        pspace::ExpandOptions opts;
        if (cfg) opts.fixed = to_kernel_config(cfg);
        opts.folds = folds;
        opts.seed = seed;
        auto report = pspace::detect_noise(space->space, noisy, opts);
        auto [p, r] = pspace::evaluate_flags(report, flipped);
        *precision = p;
        *recall = r;
    });
}

pspace_status pspace_eval_files(const char* pred_path, const char* truth_path,
                                const char* metric, double* v1, double* v2) {
    if (!pred_path || !truth_path || !metric || !v1) return null_arg("pspace_eval_files");
    return guarded([&] {
        auto pred = pspace::load_labels(pred_path, "pred");
        auto truth = pspace::load_labels(truth_path, "truth");
        auto c = pspace::confusion(pred, truth);
        std::string m = metric;
        constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
        if (m == "gmean") {
            *v1 = pspace::gmean(c);
        } else if (m == "accuracy") {
            *v1 = c.accuracy();
        } else if (m == "pr") {
            *v1 = c.tp + c.fp > 0 ? static_cast<double>(c.tp) / (c.tp + c.fp) : kNaN;
            if (v2) *v2 = c.tp + c.fn > 0 ? static_cast<double>(c.tp) / (c.tp + c.fn) : kNaN;
        } else {
            throw std::runtime_error("unknown metric '" + m + "' (gmean|accuracy|pr)");
        }
    });
}

pspace_status pspace_simulate_preset(const pspace_labels* truth, const char* preset,
                                     uint64_t seed, pspace_stream** out) {
    if (!truth || !preset || !out) return null_arg("pspace_simulate_preset");
    return guarded([&] {
        auto p = pspace::campaign_preset(preset, seed);
        std::vector<std::string> items;
        for (const auto& [id, l] : truth->labels.labels) items.push_back(id);
        auto campaign = pspace::simulate_campaign(truth->labels, items, p.profiles, p.cfg);
        auto* h = new pspace_stream{std::move(campaign), 0};
        if (p.cfg.gold_ratio > 0.0) {
            auto [filtered, excluded] = pspace::apply_gold_filter(
                h->campaign.stream, h->campaign.gold_answers, p.cfg.gold_rule);
            h->campaign.stream = std::move(filtered);
            h->excluded = static_cast<int>(excluded.size());
        }
        *out = h;
    });
}

void pspace_stream_free(pspace_stream* stream) { delete stream; }

pspace_status pspace_stream_save(const pspace_stream* stream, const char* path) {
    if (!stream || !path) return null_arg("pspace_stream_save");
    return guarded([&] { pspace::save_stream(stream->campaign.stream, path); });
}

pspace_status pspace_stream_load(const char* path, pspace_stream** out) {
    if (!path || !out) return null_arg("pspace_stream_load");
    return guarded([&] {
        auto* h = new pspace_stream{};
        h->campaign.stream = pspace::load_stream(path);
        *out = h;
    });
}

pspace_status pspace_stream_ledger(const pspace_stream* stream, pspace_ledger* out) {
    if (!stream || !out) return null_arg("pspace_stream_ledger");
    const auto& l = stream->campaign.ledger;
    *out = {l.hits, pspace::campaign_cost_dollars(l), l.judgments, l.total_minutes,
            l.workers_used, stream->excluded};
    return PSPACE_OK;
}

pspace_status pspace_stream_majority_eval(const pspace_stream* stream,
                                          const pspace_labels* truth, int64_t* classified,
                                          int64_t* correct, double* percent_correct) {
    if (!stream || !truth) return null_arg("pspace_stream_majority_eval");
    return guarded([&] {
        auto majority =
            pspace::majority_labels(stream->campaign.stream, stream->campaign.gold_answers);
        auto cc = pspace::classified_correct(majority, truth->labels);
        if (classified) *classified = cc.classified;
        if (correct) *correct = cc.correct;
        if (percent_correct) *percent_correct = cc.percent_correct;
    });
}

pspace_status pspace_stream_majority_save(const pspace_stream* stream, const char* path) {
    if (!stream || !path) return null_arg("pspace_stream_majority_save");
    return guarded([&] {
        write_labels_file(
            pspace::majority_labels(stream->campaign.stream, stream->campaign.gold_answers),
            path);
    });
}

pspace_status pspace_boost(const pspace_space* space, const pspace_stream* stream,
                           double interval_minutes, int64_t price_cents_per_hit, int hit_size,
                           const pspace_labels* truth, const char* timeline_out_path) {
    if (!space || !stream || !timeline_out_path) return null_arg("pspace_boost");
    return guarded([&] {
        pspace::BoostConfig cfg;
        cfg.interval_minutes = interval_minutes;
        cfg.price_cents_per_hit = price_cents_per_hit;
        cfg.hit_size = hit_size;
        cfg.kernel.C = 10.0;
        auto timeline =
            pspace::boost_loop(space->space, stream->campaign.stream,
                               stream->campaign.gold_answers, cfg,
                               truth ? &truth->labels : nullptr);
        std::ofstream out(timeline_out_path, std::ios::binary);
        if (!out) throw std::runtime_error(std::string("cannot write ") + timeline_out_path);
        char minute[32], dollars[32];
        for (const auto& cp : timeline.checkpoints) {
            std::snprintf(minute, sizeof minute, "%.17g", cp.minute);
            std::snprintf(dollars, sizeof dollars, "%.4f", cp.dollars);
            out << minute << '\t' << dollars << '\t' << cp.train_size << '\t' << cp.correct
                << '\n';
        }
        if (!out) throw std::runtime_error(std::string("write failed for ") + timeline_out_path);
    });
}

} // extern "C"
