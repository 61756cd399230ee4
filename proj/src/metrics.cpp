#include "pspace/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace pspace {

double Confusion::sensitivity() const {
    return static_cast<double>(tp) / static_cast<double>(tp + fn);
}

double Confusion::specificity() const {
    return static_cast<double>(tn) / static_cast<double>(tn + fp);
}

double Confusion::accuracy() const {
    int64_t total = tp + fp + tn + fn;
    return static_cast<double>(tp + tn) / static_cast<double>(total);
}

double gmean(const Confusion& c) {
    if (c.tp + c.fn < 1) throw std::runtime_error("g-mean undefined: no positive examples");
    if (c.tn + c.fp < 1) throw std::runtime_error("g-mean undefined: no negative examples");
    return std::sqrt(c.sensitivity() * c.specificity());
}

Confusion confusion(const LabelSet& pred, const LabelSet& truth) {
    std::string missing;
    Confusion c;
    for (const auto& [id, t] : truth.labels) {
        auto it = pred.labels.find(id);
        if (it == pred.labels.end()) {
            missing += missing.empty() ? id : ", " + id;
            continue;
        }
        if (t == Label::Positive)
            (it->second == Label::Positive ? c.tp : c.fn)++;
        else
            (it->second == Label::Negative ? c.tn : c.fp)++;
    }
    if (!missing.empty())
        throw std::runtime_error("predictions missing for: " + missing);
    return c;
}

ClassifiedCorrect classified_correct(const LabelSet& pred, const LabelSet& truth) {
    ClassifiedCorrect cc;
    for (const auto& [id, t] : truth.labels) {
        auto it = pred.labels.find(id);
        if (it == pred.labels.end()) continue; // unclassified
        ++cc.classified;
        if (it->second == t) ++cc.correct;
    }
    cc.percent_correct = cc.classified == 0
                             ? std::numeric_limits<double>::quiet_NaN()
                             : 100.0 * static_cast<double>(cc.correct) /
                                   static_cast<double>(cc.classified);
    return cc;
}

} // namespace pspace
