#include "pspace/crowdsim.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace pspace {

namespace {

void validate_profiles(const std::vector<WorkerProfile>& profiles) {
    if (profiles.empty()) throw std::runtime_error("no worker profiles");
    double total = 0.0;
    for (const auto& p : profiles) {
        for (double prob : {p.know_prob, p.positive_bias, p.accuracy, p.weight})
            if (prob < 0.0 || prob > 1.0)
                throw std::runtime_error("profile probability outside [0,1]");
        if (!(p.judgments_per_minute > 0.0))
            throw std::runtime_error("judgment rate must be > 0");
        total += p.weight;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw std::runtime_error("profile weights must sum to 1, got " + std::to_string(total));
}

} // namespace

CampaignResult simulate_campaign(const LabelSet& truth, const std::vector<std::string>& items,
                                 const std::vector<WorkerProfile>& profiles,
                                 const CampaignConfig& cfg) {
    validate_profiles(profiles);
    if (items.empty()) throw std::runtime_error("no items to judge");
    if (cfg.hit_size < 1) throw std::runtime_error("hit_size must be >= 1");
    if (cfg.worker_pool <= cfg.judgments_per_item)
        throw std::runtime_error("worker pool must exceed judgments_per_item");
    for (const auto& id : items)
        if (!truth.labels.count(id))
            throw std::runtime_error("truth has no label for item '" + id + "'");

    std::mt19937_64 rng(cfg.seed);

    CampaignResult result;
    // gold clones of a random sample of real items, known answers attached
    std::vector<std::string> tasks = items;
    int gold_count = static_cast<int>(std::llround(cfg.gold_ratio * items.size()));
    if (gold_count > 0) {
        std::vector<std::string> pool = items;
        std::shuffle(pool.begin(), pool.end(), rng);
        for (int g = 0; g < gold_count; ++g) {
            const std::string& src = pool[g % pool.size()];
            std::string gold_id = "gold:" + std::to_string(g) + ":" + src;
            result.gold_answers[gold_id] = truth.labels.at(src);
            tasks.push_back(gold_id);
        }
    }
    std::shuffle(tasks.begin(), tasks.end(), rng);

    // assign a profile to each pool worker
    std::vector<int> worker_profile(cfg.worker_pool);
    std::vector<double> mix_weights;
    for (const auto& p : profiles) mix_weights.push_back(p.weight);
    std::discrete_distribution<int> mix(mix_weights.begin(), mix_weights.end());
    for (auto& wp : worker_profile) wp = mix(rng);

    const int n_hits = static_cast<int>((tasks.size() + cfg.hit_size - 1) / cfg.hit_size);
    std::vector<std::vector<int>> hit_workers(n_hits); // who already took this HIT
    std::vector<double> clock(cfg.worker_pool, 0.0);
    std::vector<int64_t> done(cfg.worker_pool, 0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    auto item_truth = [&](const std::string& id) {
        auto g = result.gold_answers.find(id);
        if (g != result.gold_answers.end()) return g->second;
        return truth.labels.at(id);
    };

    for (int pass = 0; pass < cfg.judgments_per_item; ++pass) {
        for (int h = 0; h < n_hits; ++h) {
            // pick a worker who has not seen this HIT yet
            int worker;
            do {
                worker = static_cast<int>(rng() % cfg.worker_pool);
            } while (std::find(hit_workers[h].begin(), hit_workers[h].end(), worker) !=
                     hit_workers[h].end());
            hit_workers[h].push_back(worker);
            const WorkerProfile& prof = profiles[worker_profile[worker]];

            size_t begin = static_cast<size_t>(h) * cfg.hit_size;
            size_t end = std::min(tasks.size(), begin + cfg.hit_size);
            for (size_t t = begin; t < end; ++t) {
                bool knows = unif(rng) < prof.know_prob;
                Response resp;
                if (prof.honest) {
                    if (!knows) {
                        resp = Response::Unknown;
                    } else {
                        bool correct = unif(rng) < prof.accuracy;
                        bool truth_pos = item_truth(tasks[t]) == Label::Positive;
                        resp = (truth_pos == correct) ? Response::Positive : Response::Negative;
                    }
                } else {
                    // answers regardless of truth, never UNKNOWN
                    resp = (knows && unif(rng) < prof.positive_bias) ? Response::Positive
                                                                     : Response::Negative;
                }
                clock[worker] += 1.0 / prof.judgments_per_minute;
                ++done[worker];
                result.stream.push_back({worker, tasks[t], resp, clock[worker]});
            }
            ++result.ledger.hits;
        }
    }

    std::stable_sort(result.stream.begin(), result.stream.end(),
                     [](const Judgment& a, const Judgment& b) {
                         if (a.minute != b.minute) return a.minute < b.minute;
                         if (a.worker != b.worker) return a.worker < b.worker;
                         return a.item_id < b.item_id;
                     });

    result.ledger.cents = result.ledger.hits * cfg.price_cents;
    result.ledger.judgments = static_cast<int64_t>(result.stream.size());
    result.ledger.total_minutes = *std::max_element(clock.begin(), clock.end());
    result.ledger.workers_used =
        static_cast<int>(std::count_if(done.begin(), done.end(), [](int64_t c) { return c > 0; }));
    return result;
}

Vote majority_vote(const std::vector<Response>& responses) {
    int64_t pos = 0, neg = 0;
    for (Response r : responses) {
        if (r == Response::Positive) ++pos;
        if (r == Response::Negative) ++neg;
    }
    if (pos > neg) return Vote::Positive;
    if (neg > pos) return Vote::Negative;
    return Vote::Unclassified;
}

LabelSet majority_labels(const std::vector<Judgment>& stream,
                         const std::map<std::string, Label>& gold_answers,
                         const std::string& attribute_name) {
    std::map<std::string, std::pair<int64_t, int64_t>> counts; // id -> (pos, neg)
    for (const auto& j : stream) {
        if (gold_answers.count(j.item_id)) continue;
        auto& [pos, neg] = counts[j.item_id];
        if (j.response == Response::Positive) ++pos;
        if (j.response == Response::Negative) ++neg;
    }
    LabelSet out;
    out.attribute_name = attribute_name;
    for (const auto& [id, c] : counts) {
        if (c.first > c.second) out.labels[id] = Label::Positive;
        if (c.second > c.first) out.labels[id] = Label::Negative;
    }
    return out;
}

std::pair<std::vector<Judgment>, std::vector<int32_t>> apply_gold_filter(
    const std::vector<Judgment>& stream, const std::map<std::string, Label>& gold_answers,
    const GoldRule& rule) {
    // walk in time order, excluding a worker the first time their gold
    // error rate crosses the threshold
    std::unordered_map<int32_t, std::pair<int, int>> gold_stats; // worker -> (seen, errors)
    std::unordered_set<int32_t> excluded;
    for (const auto& j : stream) {
        if (excluded.count(j.worker)) continue;
        auto g = gold_answers.find(j.item_id);
        if (g == gold_answers.end() || j.response == Response::Unknown) continue;
        auto& [seen, errors] = gold_stats[j.worker];
        ++seen;
        bool answer_pos = j.response == Response::Positive;
        if (answer_pos != (g->second == Label::Positive)) ++errors;
        if (seen >= rule.min_golds_seen &&
            static_cast<double>(errors) / seen > rule.max_error_rate)
            excluded.insert(j.worker);
    }
    std::vector<Judgment> filtered;
    filtered.reserve(stream.size());
    for (const auto& j : stream)
        if (!excluded.count(j.worker)) filtered.push_back(j);
    std::vector<int32_t> excluded_sorted(excluded.begin(), excluded.end());
    std::sort(excluded_sorted.begin(), excluded_sorted.end());
    return {std::move(filtered), std::move(excluded_sorted)};
}

double campaign_cost_dollars(const CampaignLedger& ledger) {
    return static_cast<double>(ledger.cents) / 100.0;
}

CampaignPreset campaign_preset(const std::string& name, uint64_t seed) {
    // Three frozen worker populations. exp1: a mixed crowd where honest
    // workers only judge the ~26% of items they recognize while the
    // dishonest rest answer everything. exp2: the honest subpopulation
    // alone. exp3: the task is factual (answers are looked up, so every
    // item is "known"), dishonest workers are still present but gold
    // questions weed them out.
    WorkerProfile honest{.know_prob = 0.26,
                         .honest = true,
                         .positive_bias = 0.5,
                         .accuracy = 0.85,
                         .judgments_per_minute = 1.1,
                         .weight = 1.0};
    WorkerProfile dishonest{.know_prob = 0.94,
                            .honest = false,
                            .positive_bias = 0.56,
                            .accuracy = 0.0,
                            .judgments_per_minute = 1.1,
                            .weight = 0.0};
    CampaignPreset preset;
    preset.cfg.seed = seed;
    if (name == "exp1") {
        honest.weight = 0.55;
        dishonest.weight = 0.45;
        preset.profiles = {honest, dishonest};
        preset.cfg.worker_pool = 89;
        preset.cfg.price_cents = 2;
    } else if (name == "exp2") {
        honest.weight = 1.0;
        honest.judgments_per_minute = 3.2;
        preset.profiles = {honest};
        preset.cfg.worker_pool = 27;
        preset.cfg.price_cents = 2;
    } else if (name == "exp3") {
        honest.know_prob = 1.0; // looked up, not recalled
        honest.accuracy = 0.97;
        honest.weight = 0.55;
        honest.judgments_per_minute = 0.65;
        dishonest.weight = 0.45;
        dishonest.judgments_per_minute = 0.65;
        preset.profiles = {honest, dishonest};
        preset.cfg.worker_pool = 30;
        preset.cfg.price_cents = 3;
        preset.cfg.gold_ratio = 0.1;
        preset.cfg.gold_rule = {5, 0.4};
    } else {
        throw std::runtime_error("unknown preset '" + name + "' (expected exp1|exp2|exp3)");
    }
    return preset;
}

void save_stream(const std::vector<Judgment>& stream, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    std::string buf;
    char num[32];
    for (const auto& j : stream) {
        int n = std::snprintf(num, sizeof num, "%.17g", j.minute);
        buf.append(num, n);
        buf += '\t';
        buf += std::to_string(j.worker);
        buf += '\t';
        buf += j.item_id;
        buf += '\t';
        buf += j.response == Response::Positive ? '1'
               : j.response == Response::Negative ? '0'
                                                  : '?';
        buf += '\n';
    }
    out << buf;
    if (!out) throw std::runtime_error("write failed for " + path);
}

std::vector<Judgment> load_stream(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<Judgment> stream;
    std::string line;
    int64_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        size_t t1 = line.find('\t');
        size_t t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
        size_t t3 = t2 == std::string::npos ? t2 : line.find('\t', t2 + 1);
        if (t3 == std::string::npos || line.find('\t', t3 + 1) != std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected minutes<TAB>worker<TAB>item<TAB>response");
        Judgment j;
        auto minute_str = line.substr(0, t1);
        auto worker_str = line.substr(t1 + 1, t2 - t1 - 1);
        auto [p1, e1] = std::from_chars(minute_str.data(), minute_str.data() + minute_str.size(),
                                        j.minute);
        auto [p2, e2] = std::from_chars(worker_str.data(), worker_str.data() + worker_str.size(),
                                        j.worker);
        std::string resp = line.substr(t3 + 1);
        if (e1 != std::errc{} || e2 != std::errc{} ||
            (resp != "1" && resp != "0" && resp != "?"))
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": malformed record");
        j.item_id = line.substr(t2 + 1, t3 - t2 - 1);
        j.response = resp == "1" ? Response::Positive
                     : resp == "0" ? Response::Negative
                                   : Response::Unknown;
        stream.push_back(std::move(j));
    }
    return stream;
}

} // namespace pspace
