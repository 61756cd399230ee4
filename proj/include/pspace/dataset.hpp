#ifndef PSPACE_DATASET_HPP
#define PSPACE_DATASET_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "pspace/ids.hpp"

namespace pspace {

struct Rating {
    int32_t item;
    int32_t user;
    double score;
};

/// Sparse item-user rating triples with interned ids. Absent pairs are
/// simply not stored. Immutable after loading.
struct RatingDataset {
    IdTable items;
    IdTable users;
    std::vector<Rating> ratings;
    double scale_min = 1.0;
    double scale_max = 5.0;

    int32_t n_items() const { return items.size(); }
    int32_t n_users() const { return users.size(); }
};

struct LoadReport {
    int64_t lines_read = 0;
    int64_t duplicates = 0; // later occurrence replaced an earlier one
};

enum class Label : uint8_t { Negative = 0, Positive = 1 };

/// Ground-truth or predicted values of one binary attribute
/// (optionally real-valued in regression mode).
struct LabelSet {
    std::string attribute_name;
    std::map<std::string, Label> labels;   // ordered for deterministic iteration
    std::map<std::string, double> scores;  // regression variant, may be empty
};

struct GoldSample {
    std::set<std::string> positives;
    std::set<std::string> negatives;
};

/// item id -> free-text document (title, plot, actors, ... concatenated).
struct MetadataCorpus {
    std::vector<std::pair<std::string, std::string>> docs; // keeps file order
};

/// Parse a tab-separated ratings file: item_id<TAB>user_id<TAB>score.
/// Lines starting with '#' are skipped. Duplicate (item,user) pairs keep
/// the last occurrence; the replaced count is reported.
RatingDataset load_ratings(const std::string& path, double scale_min, double scale_max,
                           LoadReport* report = nullptr);

/// item_id<TAB>{1|0}, or item_id<TAB>real with regression=true.
LabelSet load_labels(const std::string& path, const std::string& attribute_name,
                     bool regression = false);

/// item_id<TAB>{+|-}
GoldSample load_gold(const std::string& path);

/// item_id<TAB>free text
MetadataCorpus load_metadata(const std::string& path);

/// Deterministic disjoint split. Ratings whose removal would leave an item
/// or user with zero training ratings stay in train.
std::pair<RatingDataset, RatingDataset> split_holdout(const RatingDataset& ds, double fraction,
                                                      uint64_t seed);

/// Uniform sample without replacement of n positives and n negatives.
GoldSample sample_gold(const LabelSet& truth, int n, uint64_t seed);

} // namespace pspace

#endif
