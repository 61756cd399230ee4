#ifndef PSPACE_EXPANSION_HPP
#define PSPACE_EXPANSION_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pspace/crowdsim.hpp"
#include "pspace/dataset.hpp"
#include "pspace/kernel.hpp"
#include "pspace/space.hpp"

namespace pspace {

struct ExpandOptions {
    std::optional<KernelConfig> fixed; // when unset, grid search picks one
    int folds = 5;
    uint64_t seed = 1;
};

/// One prediction per item in the space, gold items included (they are
/// re-predicted, never copied).
struct ExpansionResult {
    std::string attribute_name;
    std::vector<std::string> ids; // space item order
    std::vector<Label> labels;
    std::vector<double> margins;
    int training_size = 0;
    KernelConfig config;

    LabelSet as_labelset() const;
};

ExpansionResult expand(const PerceptualSpace& space, const GoldSample& gold,
                       const ExpandOptions& opts = {}, const std::string& attribute = "attribute");

/// Numeric-attribute variant: margins carry the regression estimates,
/// labels their sign.
ExpansionResult expand_regression(const PerceptualSpace& space,
                                  const std::map<std::string, double>& targets,
                                  const ExpandOptions& opts = {},
                                  const std::string& attribute = "attribute");

struct BoostConfig {
    double interval_minutes = 5.0;
    int64_t price_cents_per_hit = 2;
    int hit_size = 10;
    KernelConfig kernel; // retrained from scratch each checkpoint
    uint64_t seed = 1;
};

struct BoostCheckpoint {
    double minute;
    double dollars;
    int train_size;
    int64_t correct; // vs truth; 0 when truth is absent or no model yet
};

struct BoostTimeline {
    std::vector<BoostCheckpoint> checkpoints;
};

/// Every `interval_minutes` of simulated time: majority-vote the
/// judgments so far, retrain on the voted items, re-predict every item,
/// and record a checkpoint. The final checkpoint covers the full stream.
BoostTimeline boost_loop(const PerceptualSpace& space, const std::vector<Judgment>& stream,
                         const std::map<std::string, Label>& gold_answers,
                         const BoostConfig& cfg, const LabelSet* truth);

struct FlagReport {
    std::vector<std::pair<std::string, double>> flagged; // (id, margin), id order
};

/// Train on all given (noisy) labels and flag the items whose given
/// label contradicts the model's prediction.
FlagReport detect_noise(const PerceptualSpace& space, const LabelSet& labels,
                        const ExpandOptions& opts = {});

/// precision = |flagged ∩ flips| / |flagged|, recall over |flips|;
/// NaN marks the undefined (empty-denominator) cases.
std::pair<double, double> evaluate_flags(const FlagReport& report,
                                         const std::set<std::string>& flips);

} // namespace pspace

#endif
