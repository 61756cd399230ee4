#ifndef PSPACE_METRICS_HPP
#define PSPACE_METRICS_HPP

#include <cstdint>
#include <tuple>

#include "pspace/dataset.hpp"

namespace pspace {

struct Confusion {
    int64_t tp = 0;
    int64_t fp = 0;
    int64_t tn = 0;
    int64_t fn = 0;

    double sensitivity() const; // tp / (tp + fn)
    double specificity() const; // tn / (tn + fp)
    double accuracy() const;
};

/// Geometric mean of sensitivity and specificity. Throws when either
/// true class is empty (the metric is undefined).
double gmean(const Confusion& c);

/// 2x2 counts of pred against truth. pred must cover every item in
/// truth; a coverage gap is an error listing the missing ids.
Confusion confusion(const LabelSet& pred, const LabelSet& truth);

struct ClassifiedCorrect {
    int64_t classified = 0;
    int64_t correct = 0;
    double percent_correct = 0.0; // NaN when nothing is classified
};

/// Majority-vote style evaluation: items absent from `pred` count as
/// unclassified and are excluded from both counts; the percentage is
/// over classified items only.
ClassifiedCorrect classified_correct(const LabelSet& pred, const LabelSet& truth);

} // namespace pspace

#endif
