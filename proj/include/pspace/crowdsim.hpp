#ifndef PSPACE_CROWDSIM_HPP
#define PSPACE_CROWDSIM_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pspace/dataset.hpp"

namespace pspace {

/// Parametric crowd-worker behavior. Honest workers answer only items
/// they recognize and are right with probability `accuracy`; dishonest
/// workers answer everything, saying POSITIVE with `positive_bias` for
/// items they recognize and NEGATIVE otherwise.
struct WorkerProfile {
    double know_prob = 1.0;
    bool honest = true;
    double positive_bias = 0.5;
    double accuracy = 0.85;
    double judgments_per_minute = 1.0;
    double weight = 1.0;
};

enum class Response : uint8_t { Negative = 0, Positive = 1, Unknown = 2 };
enum class Vote : uint8_t { Negative = 0, Positive = 1, Unclassified = 2 };

struct Judgment {
    int32_t worker;
    std::string item_id;
    Response response;
    double minute;
};

struct GoldRule {
    int min_golds_seen = 5;
    double max_error_rate = 0.5;
};

struct CampaignConfig {
    int judgments_per_item = 10;
    int hit_size = 10;
    int64_t price_cents = 2; // per HIT, exact decimal cents
    double gold_ratio = 0.0; // gold-to-task ratio; gold items are added on top
    GoldRule gold_rule;
    int worker_pool = 50;
    uint64_t seed = 1;
};

struct CampaignLedger {
    int64_t hits = 0;
    int64_t cents = 0; // hits * price, no float drift
    int64_t judgments = 0;
    double total_minutes = 0.0;
    int workers_used = 0;
};

struct CampaignResult {
    std::vector<Judgment> stream; // time-ordered, includes gold-item judgments
    CampaignLedger ledger;
    std::map<std::string, Label> gold_answers; // pseudo-item id -> known answer
};

/// Simulate a full campaign: every item (plus gold clones) is judged by
/// `judgments_per_item` distinct workers drawn from the profile mixture.
/// Deterministic per seed.
CampaignResult simulate_campaign(const LabelSet& truth, const std::vector<std::string>& items,
                                 const std::vector<WorkerProfile>& profiles,
                                 const CampaignConfig& cfg);

/// Strict majority ignoring UNKNOWN; ties and empty vote sets are
/// Unclassified.
Vote majority_vote(const std::vector<Response>& responses);

/// Per-item majority labels over a stream; unclassified items are
/// omitted. Gold pseudo-items are skipped.
LabelSet majority_labels(const std::vector<Judgment>& stream,
                         const std::map<std::string, Label>& gold_answers,
                         const std::string& attribute_name = "crowd");

/// Drop every judgment (past and future) of workers whose gold error
/// rate exceeds the rule. Returns the filtered stream and the excluded
/// worker ids.
std::pair<std::vector<Judgment>, std::vector<int32_t>> apply_gold_filter(
    const std::vector<Judgment>& stream, const std::map<std::string, Label>& gold_answers,
    const GoldRule& rule);

double campaign_cost_dollars(const CampaignLedger& ledger);

/// Frozen experiment presets exp1 (mixed population), exp2 (honest
/// only), exp3 (mixed + gold filtering, higher pay).
struct CampaignPreset {
    std::vector<WorkerProfile> profiles;
    CampaignConfig cfg;
};
CampaignPreset campaign_preset(const std::string& name, uint64_t seed);

/// sim_minutes<TAB>worker_id<TAB>item_id<TAB>{1|0|?}
void save_stream(const std::vector<Judgment>& stream, const std::string& path);
std::vector<Judgment> load_stream(const std::string& path);

} // namespace pspace

#endif
