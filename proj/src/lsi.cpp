#include "pspace/lsi.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>
#include <stdexcept>
#include <unordered_map>

namespace pspace {

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string cur;
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (!cur.empty()) {
            if (cur.size() >= 2) tokens.push_back(cur);
            cur.clear();
        }
    }
    if (cur.size() >= 2) tokens.push_back(cur);
    return tokens;
}

namespace {

struct SparseVec {
    std::vector<std::pair<int32_t, double>> entries; // sorted by term index
};

} // namespace

PerceptualSpace build_metadata_space(const MetadataCorpus& corpus, int k) {
    const int n = static_cast<int>(corpus.docs.size());
    if (n < 1) throw std::runtime_error("metadata corpus is empty");
    if (k < 1) throw std::runtime_error("dimension must be >= 1");

    // vocabulary in first-seen order, with document frequencies
    std::unordered_map<std::string, int32_t> vocab;
    std::vector<int32_t> df;
    std::vector<std::vector<std::pair<int32_t, double>>> tf(n);
    for (int doc = 0; doc < n; ++doc) {
        std::unordered_map<int32_t, int> counts;
        for (const auto& tok : tokenize(corpus.docs[doc].second)) {
            auto [it, inserted] = vocab.try_emplace(tok, static_cast<int32_t>(vocab.size()));
            if (inserted) df.push_back(0);
            ++counts[it->second];
        }
        for (const auto& [term, count] : counts) {
            tf[doc].emplace_back(term, count);
            ++df[term];
        }
        std::sort(tf[doc].begin(), tf[doc].end());
    }
    const int vocab_size = static_cast<int>(vocab.size());
    if (k > std::min(n, vocab_size))
        throw std::runtime_error("dimension " + std::to_string(k) + " exceeds min(docs=" +
                                 std::to_string(n) + ", vocabulary=" +
                                 std::to_string(vocab_size) + ")");

    std::vector<SparseVec> docs(n);
    for (int doc = 0; doc < n; ++doc)
        for (auto [term, count] : tf[doc])
            docs[doc].entries.emplace_back(
                term, count * std::log(static_cast<double>(n) / df[term]));

    // Orthogonal iteration for the k leading eigenpairs of the doc-doc
    // Gram matrix G = D D^T, applied through the sparse tf-idf matrix D
    // so each step costs O(nnz * k) instead of O(n^2 * k).
    std::mt19937_64 rng(0x15157ULL);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::vector<double> V(static_cast<size_t>(n) * k), W(static_cast<size_t>(n) * k);
    std::vector<double> prev_V(V.size(), 0.0);
    std::vector<double> scratch(static_cast<size_t>(vocab_size) * k);
    for (auto& v : V) v = unif(rng);
    std::vector<double> eig(k, 0.0);

    const int max_iter = 10000;
    for (int iter = 0; iter < max_iter; ++iter) {
        // W = D (D^T V)
        std::fill(scratch.begin(), scratch.end(), 0.0);
        for (int doc = 0; doc < n; ++doc)
            for (const auto& [term, weight] : docs[doc].entries)
                for (int c = 0; c < k; ++c)
                    scratch[static_cast<size_t>(term) * k + c] +=
                        weight * V[static_cast<size_t>(doc) * k + c];
        for (int doc = 0; doc < n; ++doc) {
            double* Wr = W.data() + static_cast<size_t>(doc) * k;
            std::fill(Wr, Wr + k, 0.0);
            for (const auto& [term, weight] : docs[doc].entries)
                for (int c = 0; c < k; ++c)
                    Wr[c] += weight * scratch[static_cast<size_t>(term) * k + c];
        }
        // Rayleigh quotients before orthonormalization (V orthonormal)
        for (int c = 0; c < k; ++c) {
            double s = 0.0;
            for (int r = 0; r < n; ++r)
                s += V[static_cast<size_t>(r) * k + c] * W[static_cast<size_t>(r) * k + c];
            eig[c] = s;
        }
        // modified Gram-Schmidt on columns of W -> V
        for (int c = 0; c < k; ++c) {
            for (int prev = 0; prev < c; ++prev) {
                double proj = 0.0;
                for (int r = 0; r < n; ++r)
                    proj += W[static_cast<size_t>(r) * k + c] * V[static_cast<size_t>(r) * k + prev];
                for (int r = 0; r < n; ++r)
                    W[static_cast<size_t>(r) * k + c] -= proj * V[static_cast<size_t>(r) * k + prev];
            }
            double norm = 0.0;
            for (int r = 0; r < n; ++r) {
                double v = W[static_cast<size_t>(r) * k + c];
                norm += v * v;
            }
            norm = std::sqrt(norm);
            for (int r = 0; r < n; ++r)
                V[static_cast<size_t>(r) * k + c] =
                    norm > 1e-12 ? W[static_cast<size_t>(r) * k + c] / norm : 0.0;
        }
        // converge on the eigenvectors themselves, not the (faster)
        // eigenvalues; columns are compared up to a sign flip
        double change = 0.0;
        for (int c = 0; c < k; ++c) {
            double dot = 0.0;
            for (int r = 0; r < n; ++r)
                dot += V[static_cast<size_t>(r) * k + c] * prev_V[static_cast<size_t>(r) * k + c];
            double sign = dot < 0.0 ? -1.0 : 1.0;
            for (int r = 0; r < n; ++r)
                change = std::max(change,
                                  std::abs(V[static_cast<size_t>(r) * k + c] -
                                           sign * prev_V[static_cast<size_t>(r) * k + c]));
        }
        if (iter > 0 && change < 1e-13) break;
        prev_V = V;
    }

    // deterministic sign: largest-magnitude entry of each factor positive
    for (int c = 0; c < k; ++c) {
        int arg = 0;
        double best = -1.0;
        for (int r = 0; r < n; ++r) {
            double mag = std::abs(V[static_cast<size_t>(r) * k + c]);
            if (mag > best) {
                best = mag;
                arg = r;
            }
        }
        if (V[static_cast<size_t>(arg) * k + c] < 0.0)
            for (int r = 0; r < n; ++r) V[static_cast<size_t>(r) * k + c] *= -1.0;
    }

    PerceptualSpace space;
    space.kind = ModelKind::Lsi;
    space.d = k;
    space.mu = 0.0;
    space.item_coords.resize(static_cast<size_t>(n) * k);
    space.item_bias.assign(n, 0.0);
    for (int doc = 0; doc < n; ++doc) {
        space.items.intern(corpus.docs[doc].first);
        for (int c = 0; c < k; ++c)
            space.item_coords[static_cast<size_t>(doc) * k + c] =
                V[static_cast<size_t>(doc) * k + c] * std::sqrt(std::max(0.0, eig[c]));
    }
    return space;
}

} // namespace pspace
