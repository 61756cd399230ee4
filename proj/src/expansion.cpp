#include "pspace/expansion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pspace {

namespace {

int32_t require_item(const PerceptualSpace& space, const std::string& id) {
    int32_t idx = space.items.find(id);
    if (idx < 0) throw std::runtime_error("item '" + id + "' is not in the space");
    return idx;
}

// Gather coordinates for a labeled training set.
void gather(const PerceptualSpace& space, const std::vector<std::pair<int32_t, int>>& labeled,
            std::vector<double>& x, std::vector<int>& y) {
    for (auto [idx, label] : labeled) {
        auto row = space.item_row(idx);
        x.insert(x.end(), row.begin(), row.end());
        y.push_back(label);
    }
}

ExpansionResult predict_all(const PerceptualSpace& space, const KernelModel& model,
                            const std::string& attribute) {
    ExpansionResult res;
    res.attribute_name = attribute;
    res.ids.reserve(space.n_items());
    res.labels.reserve(space.n_items());
    res.margins.reserve(space.n_items());
    for (int32_t m = 0; m < space.n_items(); ++m) {
        auto [label, margin] = predict_label(model, space.item_row(m));
        res.ids.push_back(space.items.name(m));
        res.labels.push_back(label);
        res.margins.push_back(margin);
    }
    return res;
}

} // namespace

LabelSet ExpansionResult::as_labelset() const {
    LabelSet ls;
    ls.attribute_name = attribute_name;
    for (size_t i = 0; i < ids.size(); ++i) ls.labels[ids[i]] = labels[i];
    return ls;
}

ExpansionResult expand(const PerceptualSpace& space, const GoldSample& gold,
                       const ExpandOptions& opts, const std::string& attribute) {
    if (gold.positives.empty() || gold.negatives.empty())
        throw std::runtime_error("gold sample must contain both classes");
    std::vector<std::pair<int32_t, int>> labeled;
    for (const auto& id : gold.positives) labeled.emplace_back(require_item(space, id), +1);
    for (const auto& id : gold.negatives) labeled.emplace_back(require_item(space, id), -1);

    std::vector<double> x;
    std::vector<int> y;
    gather(space, labeled, x, y);

    KernelConfig cfg = opts.fixed ? *opts.fixed
                                  : select_hyperparams(x, space.d, y, {}, false,
                                                       default_grid(space.d), opts.folds,
                                                       opts.seed);
    auto fit = fit_classifier(x, space.d, y, cfg);
    auto res = predict_all(space, fit.model, attribute);
    res.training_size = static_cast<int>(y.size());
    res.config = cfg;
    return res;
}

ExpansionResult expand_regression(const PerceptualSpace& space,
                                  const std::map<std::string, double>& targets,
                                  const ExpandOptions& opts, const std::string& attribute) {
    if (targets.size() < 2) throw std::runtime_error("need at least 2 training targets");
    std::vector<double> x, t;
    for (const auto& [id, value] : targets) {
        auto row = space.item_row(require_item(space, id));
        x.insert(x.end(), row.begin(), row.end());
        t.push_back(value);
    }
    KernelConfig cfg = opts.fixed ? *opts.fixed
                                  : select_hyperparams(x, space.d, {}, t, true,
                                                       default_grid(space.d), opts.folds,
                                                       opts.seed);
    auto fit = fit_regressor(x, space.d, t, cfg);
    auto res = predict_all(space, fit.model, attribute);
    res.training_size = static_cast<int>(t.size());
    res.config = cfg;
    return res;
}

BoostTimeline boost_loop(const PerceptualSpace& space, const std::vector<Judgment>& stream,
                         const std::map<std::string, Label>& gold_answers,
                         const BoostConfig& cfg, const LabelSet* truth) {
    BoostTimeline timeline;
    if (stream.empty()) {
        timeline.checkpoints.push_back({0.0, 0.0, 0, 0});
        return timeline;
    }
    double end_minute = 0.0;
    for (const auto& j : stream) end_minute = std::max(end_minute, j.minute);

    std::optional<KernelModel> model; // carried forward over degenerate checkpoints
    size_t consumed = 0;
    std::map<std::string, std::pair<int64_t, int64_t>> votes; // id -> (pos, neg)
    int64_t priced_judgments = 0;

    for (double t = cfg.interval_minutes;; t += cfg.interval_minutes) {
        bool last = t >= end_minute;
        while (consumed < stream.size() && stream[consumed].minute <= t) {
            const auto& j = stream[consumed++];
            ++priced_judgments;
            if (!gold_answers.count(j.item_id)) {
                auto& [pos, neg] = votes[j.item_id];
                if (j.response == Response::Positive) ++pos;
                if (j.response == Response::Negative) ++neg;
            }
        }
        // current majority-labeled training set, restricted to the space
        std::vector<std::pair<int32_t, int>> labeled;
        for (const auto& [id, c] : votes) {
            if (c.first == c.second) continue;
            int32_t idx = space.items.find(id);
            if (idx < 0) continue;
            labeled.emplace_back(idx, c.first > c.second ? +1 : -1);
        }
        bool has_both = false;
        for (size_t i = 1; i < labeled.size() && !has_both; ++i)
            has_both = labeled[i].second != labeled[0].second;
        if (has_both) {
            std::vector<double> x;
            std::vector<int> y;
            gather(space, labeled, x, y);
            model = fit_classifier(x, space.d, y, cfg.kernel).model;
        }

        BoostCheckpoint cp;
        cp.minute = t;
        cp.dollars = static_cast<double>(priced_judgments * cfg.price_cents_per_hit) /
                     (cfg.hit_size * 100.0);
        cp.train_size = static_cast<int>(labeled.size());
        cp.correct = 0;
        if (model && truth) {
            for (int32_t m = 0; m < space.n_items(); ++m) {
                auto it = truth->labels.find(space.items.name(m));
                if (it == truth->labels.end()) continue;
                if (predict_label(*model, space.item_row(m)).first == it->second) ++cp.correct;
            }
        }
        timeline.checkpoints.push_back(cp);
        if (last) break;
    }
    return timeline;
}

FlagReport detect_noise(const PerceptualSpace& space, const LabelSet& labels,
                        const ExpandOptions& opts) {
    std::vector<std::pair<int32_t, int>> labeled;
    bool has_pos = false, has_neg = false;
    for (const auto& [id, label] : labels.labels) {
        labeled.emplace_back(require_item(space, id), label == Label::Positive ? +1 : -1);
        (label == Label::Positive ? has_pos : has_neg) = true;
    }
    if (!has_pos || !has_neg)
        throw std::runtime_error("noise detection needs labels from both classes");

    std::vector<double> x;
    std::vector<int> y;
    gather(space, labeled, x, y);
    KernelConfig cfg = opts.fixed ? *opts.fixed
                                  : select_hyperparams(x, space.d, y, {}, false,
                                                       default_grid(space.d), opts.folds,
                                                       opts.seed);
    auto fit = fit_classifier(x, space.d, y, cfg);

    FlagReport report;
    for (auto [idx, given] : labeled) {
        auto [pred, margin] = predict_label(fit.model, space.item_row(idx));
        int predicted = pred == Label::Positive ? +1 : -1;
        if (predicted != given) report.flagged.emplace_back(space.items.name(idx), margin);
    }
    return report;
}

std::pair<double, double> evaluate_flags(const FlagReport& report,
                                         const std::set<std::string>& flips) {
    constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
    int64_t hit = 0;
    for (const auto& [id, margin] : report.flagged)
        if (flips.count(id)) ++hit;
    double precision = report.flagged.empty()
                           ? kNaN
                           : static_cast<double>(hit) / report.flagged.size();
    double recall = flips.empty() ? kNaN : static_cast<double>(hit) / flips.size();
    return {precision, recall};
}

} // namespace pspace
