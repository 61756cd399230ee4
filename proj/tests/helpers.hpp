#ifndef PSPACE_TEST_HELPERS_HPP
#define PSPACE_TEST_HELPERS_HPP

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "pspace/dataset.hpp"
#include "pspace/factor_model.hpp"

namespace testutil {

// Writes content to a fresh file under the system temp dir and removes
// it on destruction.
class TempFile {
public:
    explicit TempFile(const std::string& content, const std::string& tag = "t") {
        static int counter = 0;
        path_ = (std::filesystem::temp_directory_path() /
                 ("pspace_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
                  std::to_string(counter++) + ".tsv"))
                    .string();
        std::ofstream out(path_, std::ios::binary);
        out << content;
    }
    ~TempFile() { std::filesystem::remove(path_); }
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

inline std::string temp_path(const std::string& tag) {
    static int counter = 0;
    return (std::filesystem::temp_directory_path() /
            ("pspace_out_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++) + ".tsv"))
        .string();
}

// Planted factor-model instance: ground-truth space plus noisy ratings
// sampled from its own prediction formula.
struct PlantedInstance {
    pspace::PerceptualSpace truth;
    pspace::RatingDataset ratings;
};

inline PlantedInstance planted_euclidean(int n_items, int n_users, int d, double density,
                                         double noise_sigma, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coord(0.0, 1.0);
    std::normal_distribution<double> bias(0.0, 0.3), noise(0.0, noise_sigma);

    PlantedInstance inst;
    auto& space = inst.truth;
    space.kind = pspace::ModelKind::Euclidean;
    space.d = d;
    space.mu = 3.0;
    for (int m = 0; m < n_items; ++m) space.items.intern("it" + std::to_string(m));
    for (int u = 0; u < n_users; ++u) space.users.intern("us" + std::to_string(u));
    space.item_coords.resize(static_cast<size_t>(n_items) * d);
    space.user_coords.resize(static_cast<size_t>(n_users) * d);
    for (auto& v : space.item_coords) v = coord(rng);
    for (auto& v : space.user_coords) v = coord(rng);
    space.item_bias.resize(n_items);
    space.user_bias.resize(n_users);
    for (auto& v : space.item_bias) v = bias(rng);
    for (auto& v : space.user_bias) v = bias(rng);

    auto& ds = inst.ratings;
    ds.items = space.items;
    ds.users = space.users;
    ds.scale_min = -100.0;
    ds.scale_max = 100.0;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int m = 0; m < n_items; ++m)
        for (int u = 0; u < n_users; ++u)
            if (unif(rng) < density)
                ds.ratings.push_back({m, u, space.predict(m, u) + noise(rng)});
    return inst;
}

// Item-only space whose planted attribute is the sign of coordinate 0.
struct LabeledSpace {
    pspace::PerceptualSpace space;
    pspace::LabelSet truth;
};

inline LabeledSpace planted_labeled_space(int n_items, int d, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coord(-1.0, 1.0);
    LabeledSpace out;
    out.space.kind = pspace::ModelKind::Euclidean;
    out.space.d = d;
    out.space.mu = 0.0;
    out.space.item_coords.resize(static_cast<size_t>(n_items) * d);
    for (auto& v : out.space.item_coords) v = coord(rng);
    out.space.item_bias.assign(n_items, 0.0);
    out.truth.attribute_name = "planted";
    for (int m = 0; m < n_items; ++m) {
        std::string id = "it" + std::to_string(m);
        out.space.items.intern(id);
        out.truth.labels[id] = out.space.item_coords[static_cast<size_t>(m) * d] > 0.0
                                   ? pspace::Label::Positive
                                   : pspace::Label::Negative;
    }
    return out;
}

} // namespace testutil

#endif
