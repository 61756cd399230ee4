#include "pspace/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace pspace {

namespace {

[[noreturn]] void fail(const std::string& path, int64_t line, const std::string& what) {
    throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return in;
}

// Splits on tabs. Returns false for blank lines.
bool split_tabs(const std::string& line, std::vector<std::string>& out) {
    out.clear();
    if (line.empty()) return false;
    size_t start = 0;
    while (true) {
        size_t tab = line.find('\t', start);
        if (tab == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
    return true;
}

double parse_score(const std::string& s, const std::string& path, int64_t line) {
    double v;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        fail(path, line, "malformed numeric value '" + s + "'");
    return v;
}

} // namespace

RatingDataset load_ratings(const std::string& path, double scale_min, double scale_max,
                           LoadReport* report) {
    if (!(scale_min < scale_max))
        throw std::runtime_error("invalid rating scale [" + std::to_string(scale_min) + ", " +
                                 std::to_string(scale_max) + "]");
    auto in = open_or_throw(path);
    RatingDataset ds;
    ds.scale_min = scale_min;
    ds.scale_max = scale_max;

    LoadReport rep;
    // (item,user) -> position in ds.ratings, for last-wins duplicate handling
    std::unordered_map<int64_t, size_t> seen;
    std::string line;
    std::vector<std::string> fields;
    int64_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        ++rep.lines_read;
        if (!split_tabs(line, fields) || fields.size() != 3)
            fail(path, lineno, "expected item<TAB>user<TAB>score");
        double score = parse_score(fields[2], path, lineno);
        if (score < scale_min || score > scale_max)
            fail(path, lineno, "score " + fields[2] + " outside declared scale");
        int32_t item = ds.items.intern(fields[0]);
        int32_t user = ds.users.intern(fields[1]);
        int64_t key = (static_cast<int64_t>(item) << 32) | static_cast<uint32_t>(user);
        auto it = seen.find(key);
        if (it != seen.end()) {
            ds.ratings[it->second].score = score; // last occurrence wins
            ++rep.duplicates;
        } else {
            seen.emplace(key, ds.ratings.size());
            ds.ratings.push_back({item, user, score});
        }
    }
    if (ds.ratings.empty()) throw std::runtime_error(path + ": no ratings found");
    if (report) *report = rep;
    return ds;
}

LabelSet load_labels(const std::string& path, const std::string& attribute_name, bool regression) {
    auto in = open_or_throw(path);
    LabelSet ls;
    ls.attribute_name = attribute_name;
    std::string line;
    std::vector<std::string> fields;
    int64_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        // accept the 3-column result format too (id, label, margin)
        if (!split_tabs(line, fields) || fields.size() < 2 || fields.size() > 3)
            fail(path, lineno, "expected item_id<TAB>value");
        if (regression) {
            double v = parse_score(fields[1], path, lineno);
            ls.scores[fields[0]] = v;
        } else {
            if (fields[1] == "1")
                ls.labels[fields[0]] = Label::Positive;
            else if (fields[1] == "0")
                ls.labels[fields[0]] = Label::Negative;
            else
                fail(path, lineno, "label must be 1 or 0, got '" + fields[1] + "'");
        }
        if (fields.size() == 3) ls.scores[fields[0]] = parse_score(fields[2], path, lineno);
    }
    return ls;
}

GoldSample load_gold(const std::string& path) {
    auto in = open_or_throw(path);
    GoldSample gold;
    std::string line;
    std::vector<std::string> fields;
    int64_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!split_tabs(line, fields) || fields.size() != 2)
            fail(path, lineno, "expected item_id<TAB>{+|-}");
        if (fields[1] == "+")
            gold.positives.insert(fields[0]);
        else if (fields[1] == "-")
            gold.negatives.insert(fields[0]);
        else
            fail(path, lineno, "gold mark must be + or -, got '" + fields[1] + "'");
    }
    for (const auto& id : gold.positives)
        if (gold.negatives.count(id))
            throw std::runtime_error(path + ": item '" + id + "' marked both + and -");
    return gold;
}

MetadataCorpus load_metadata(const std::string& path) {
    auto in = open_or_throw(path);
    MetadataCorpus corpus;
    std::string line;
    int64_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        size_t tab = line.find('\t');
        if (tab == std::string::npos) fail(path, lineno, "expected item_id<TAB>text");
        std::string text = line.substr(tab + 1);
        if (text.empty()) fail(path, lineno, "empty document");
        corpus.docs.emplace_back(line.substr(0, tab), std::move(text));
    }
    return corpus;
}

std::pair<RatingDataset, RatingDataset> split_holdout(const RatingDataset& ds, double fraction,
                                                      uint64_t seed) {
    if (!(fraction > 0.0 && fraction < 1.0))
        throw std::runtime_error("holdout fraction must be in (0,1)");
    const size_t n = ds.ratings.size();
    size_t target = static_cast<size_t>(fraction * static_cast<double>(n) + 0.5);
    if (target < 1) throw std::runtime_error("holdout fraction selects zero ratings");

    std::vector<int32_t> item_count(ds.n_items(), 0), user_count(ds.n_users(), 0);
    for (const auto& r : ds.ratings) {
        ++item_count[r.item];
        ++user_count[r.user];
    }

    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<bool> in_test(n, false);
    size_t taken = 0;
    for (size_t idx : order) {
        if (taken == target) break;
        const auto& r = ds.ratings[idx];
        // never orphan an item or user
        if (item_count[r.item] <= 1 || user_count[r.user] <= 1) continue;
        --item_count[r.item];
        --user_count[r.user];
        in_test[idx] = true;
        ++taken;
    }

    RatingDataset train, test;
    train.items = test.items = ds.items;
    train.users = test.users = ds.users;
    train.scale_min = test.scale_min = ds.scale_min;
    train.scale_max = test.scale_max = ds.scale_max;
    for (size_t i = 0; i < n; ++i)
        (in_test[i] ? test : train).ratings.push_back(ds.ratings[i]);
    return {std::move(train), std::move(test)};
}

GoldSample sample_gold(const LabelSet& truth, int n, uint64_t seed) {
    if (n < 1) throw std::runtime_error("gold sample size must be >= 1");
    std::vector<std::string> pos, neg;
    for (const auto& [id, label] : truth.labels)
        (label == Label::Positive ? pos : neg).push_back(id);
    if (static_cast<int>(pos.size()) < n)
        throw std::runtime_error("not enough positives: need " + std::to_string(n) + ", have " +
                                 std::to_string(pos.size()));
    if (static_cast<int>(neg.size()) < n)
        throw std::runtime_error("not enough negatives: need " + std::to_string(n) + ", have " +
                                 std::to_string(neg.size()));
    std::mt19937_64 rng(seed);
    std::shuffle(pos.begin(), pos.end(), rng);
    std::shuffle(neg.begin(), neg.end(), rng);
    GoldSample gold;
    gold.positives.insert(pos.begin(), pos.begin() + n);
    gold.negatives.insert(neg.begin(), neg.begin() + n);
    return gold;
}

} // namespace pspace
