#pragma once

// Shared fixtures for the test binaries: deterministic random instances and
// reference implementations coded independently from the library (different
// algorithm or formula on purpose, so agreement means something).

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <unistd.h>

#include "comseq/community.hpp"
#include "comseq/miner.hpp"
#include "comseq/network.hpp"
#include "comseq/sequence.hpp"

namespace testutil {

inline std::filesystem::path fresh_dir(const std::string& tag) {
    auto dir = std::filesystem::temp_directory_path() /
               ("comseq_test_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline std::string padded(std::uint32_t v) {
    std::string s = std::to_string(v);
    return std::string(s.size() < 2 ? 2 - s.size() : 0, '0') + s;
}

// G(n, p) per slice over a shared node set; labels n00, n01, ...
inline comseq::DynamicNetwork random_network(std::mt19937& rng, std::uint32_t n,
                                             std::uint32_t theta, double p) {
    comseq::NetworkBuilder b;
    b.slices(theta);
    std::vector<std::string> names;
    names.reserve(n);
    for (std::uint32_t v = 0; v < n; ++v) names.push_back("n" + padded(v));
    for (const auto& name : names) b.node(name);
    std::bernoulli_distribution coin(p);
    for (std::uint32_t t = 1; t <= theta; ++t)
        for (std::uint32_t u = 0; u < n; ++u)
            for (std::uint32_t v = u + 1; v < n; ++v)
                if (coin(rng)) b.edge(t, names[u], names[v]);
    return b.build();
}

inline comseq::CommunityStructure random_partition(std::mt19937& rng, std::uint32_t n,
                                                   std::uint32_t max_communities) {
    std::uniform_int_distribution<comseq::CommunityId> pick(0, max_communities - 1);
    std::vector<comseq::CommunityId> raw(n);
    for (auto& c : raw) c = pick(rng);
    return comseq::CommunityStructure::from_assignment(std::move(raw));
}

// Every partition of {0..n-1} exactly once, as restricted growth strings.
inline void for_each_partition(std::uint32_t n,
                               const std::function<void(const std::vector<comseq::CommunityId>&)>& f) {
    std::vector<comseq::CommunityId> a(n, 0);
    std::function<void(std::uint32_t, comseq::CommunityId)> rec =
        [&](std::uint32_t i, comseq::CommunityId width) {
            if (i == n) {
                f(a);
                return;
            }
            for (comseq::CommunityId c = 0; c <= width; ++c) {
                a[i] = c;
                rec(i + 1, std::max(width, static_cast<comseq::CommunityId>(c + 1)));
            }
        };
    if (n == 0) return;
    rec(1, 1);
}

// Modularity straight from the pairwise definition: (1/2m) * sum over all
// ordered node pairs of (A_uv - k_u * k_v / 2m) for same-community pairs.
// The library sums per community instead, so this is a distinct code path.
inline double modularity_pairwise(const comseq::GlobalWeightedNetwork& g,
                                  const std::vector<comseq::CommunityId>& assign) {
    double two_m = 2.0 * static_cast<double>(g.total_weight);
    double q = 0.0;
    for (comseq::NodeId u = 0; u < g.n; ++u)
        for (comseq::NodeId v = 0; v < g.n; ++v) {
            if (assign[u] != assign[v]) continue;
            double w = u == v ? 0.0 : static_cast<double>(g.weight(u, v));
            q += w - static_cast<double>(g.weighted_degree[u]) *
                         static_cast<double>(g.weighted_degree[v]) / two_m;
        }
    return q / two_m;
}

// Embedding check via full backtracking over every start position, with
// std::includes for the itemset test. The library uses a greedy left-most
// scan, so the two only agree if the greedy choice is actually safe.
inline bool contains_backtracking(const comseq::Sequence& a, const comseq::Sequence& b,
                                  std::size_t ai = 0, std::size_t bi = 0) {
    if (ai == a.itemsets.size()) return true;
    for (std::size_t j = bi; j < b.itemsets.size(); ++j) {
        const auto& big = b.itemsets[j];
        const auto& small = a.itemsets[ai];
        if (std::includes(big.begin(), big.end(), small.begin(), small.end()) &&
            contains_backtracking(a, b, ai + 1, j + 1))
            return true;
    }
    return false;
}

// Random database within the brute-force guards (alphabet <= 8, total items
// bounded). Itemsets may be empty, matching slice placeholders.
inline comseq::SequenceDatabase random_db(std::mt19937& rng, std::uint32_t max_entries,
                                          std::uint32_t max_itemsets, comseq::ItemCode alphabet,
                                          std::size_t item_budget = 38) {
    std::uniform_int_distribution<std::uint32_t> entry_count(1, max_entries);
    std::uniform_int_distribution<std::uint32_t> itemset_count(1, max_itemsets);
    std::uniform_int_distribution<int> itemset_size(0, 3);
    std::uniform_int_distribution<comseq::ItemCode> item(0, alphabet - 1);

    comseq::SequenceDatabase db;
    db.theta = max_itemsets;
    std::size_t spent = 0;
    std::uint32_t n = entry_count(rng);
    for (std::uint32_t e = 0; e < n; ++e) {
        comseq::Sequence seq;
        std::uint32_t len = itemset_count(rng);
        for (std::uint32_t k = 0; k < len; ++k) {
            std::set<comseq::ItemCode> picked;
            int want = itemset_size(rng);
            if (want == 0 && k == 0) want = 1;  // keep at least one item around
            for (int i = 0; i < want && spent < item_budget; ++i)
                if (picked.insert(item(rng)).second) ++spent;
            seq.itemsets.emplace_back(picked.begin(), picked.end());
        }
        db.labels.push_back("s" + padded(e));
        db.sequences.push_back(std::move(seq));
    }
    return db;
}

// (sequence, support) pairs in canonical order, for set comparisons between
// the miner and the exhaustive reference.
inline std::vector<std::pair<comseq::Sequence, std::uint32_t>> pattern_set(
    const std::vector<comseq::MinedPattern>& patterns) {
    std::vector<std::pair<comseq::Sequence, std::uint32_t>> out;
    out.reserve(patterns.size());
    for (const auto& p : patterns) out.emplace_back(p.sequence, p.support);
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        int c = comseq::canonical_compare(a.first, b.first);
        if (c != 0) return c < 0;
        return a.second < b.second;
    });
    return out;
}

}  // namespace testutil
