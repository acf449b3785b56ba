#include "comseq/miner.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <unordered_map>

namespace comseq {

namespace {

std::uint32_t support_threshold(double min_sup, std::uint32_t entries) {
    if (!(min_sup > 0.0) || min_sup > 1.0)
        throw std::invalid_argument("min_sup must be in (0, 1]");
    auto t = static_cast<std::uint32_t>(std::ceil(min_sup * entries - 1e-9));
    return std::max<std::uint32_t>(t, 1);
}

// Where the left-most minimal embedding of the current prefix ends: the
// itemset holding the prefix's last itemset, and the index of that itemset's
// largest item within it.
struct Position {
    std::uint32_t entry;
    std::uint32_t itemset;
    std::uint32_t item;

    bool operator==(const Position&) const = default;
};
using Projection = std::vector<Position>;  // one per supporting entry, ascending

struct Miner {
    const SequenceDatabase& db;
    std::uint32_t threshold;
    const MinerOptions& options;

    std::vector<MinedPattern> candidates;
    std::vector<Projection> projections;  // parallel to candidates
    // Early-termination registry: hash of the supporting-entry-id sum, with
    // exact projection equality verified on every hit.
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> registry;

    struct Extension {
        std::uint32_t count = 0;
        Projection positions;
    };

    static std::uint64_t projection_key(const Projection& proj) {
        std::uint64_t sum = 0;
        for (const Position& p : proj) sum += p.entry + 1;
        return sum;
    }

    std::optional<CommunityId> tag_of(const Sequence& seq) const {
        const Itemset& last = seq.itemsets.back();
        if (last.size() == 1 && is_class_item(last[0])) return class_of_item(last[0]);
        return std::nullopt;
    }

    // True when the subtree below `prefix` cannot contain a closed pattern:
    // an already-explored pattern has the exact same projected positions and
    // the same final itemset, and `prefix` embeds into it. Every extension of
    // `prefix` is then an equal-support sub-sequence of the corresponding
    // extension of the recorded pattern.
    bool subsumed(const Sequence& prefix, const Projection& proj) const {
        auto it = registry.find(projection_key(proj));
        if (it == registry.end()) return false;
        for (std::uint32_t idx : it->second) {
            const Sequence& seen = candidates[idx].sequence;
            if (projections[idx] != proj) continue;
            if (seen.itemsets.back() != prefix.itemsets.back()) continue;
            if (is_subsequence(prefix, seen)) return true;
        }
        return false;
    }

    void grow(Sequence& prefix, const Projection& proj) {
        if (subsumed(prefix, proj)) return;
        if (candidates.size() >= options.max_candidates)
            throw ResourceLimitError(
                "pattern candidate cap (" + std::to_string(options.max_candidates) +
                ") exceeded; raise min_sup or the max_candidates limit");

        std::uint32_t idx = static_cast<std::uint32_t>(candidates.size());
        candidates.push_back({prefix, static_cast<std::uint32_t>(proj.size()), tag_of(prefix)});
        projections.push_back(proj);
        registry[projection_key(proj)].push_back(idx);

        const Itemset last = prefix.itemsets.back();
        const ItemCode last_max = last.back();

        // Collect both extension families in one scan per entry. For itemset
        // extensions the candidate item must co-occur with the whole last
        // itemset at or after the embedding end; for sequence extensions any
        // later occurrence counts.
        std::map<ItemCode, Extension> iext, sext;
        std::set<ItemCode> entry_iext, entry_sext;  // per-entry dedupe
        for (const Position& pos : proj) {
            const Sequence& seq = db.sequences[pos.entry];
            entry_iext.clear();
            entry_sext.clear();

            const Itemset& at_end = seq.itemsets[pos.itemset];
            for (std::uint32_t k = pos.item + 1; k < at_end.size(); ++k) {
                if (entry_iext.insert(at_end[k]).second) {
                    auto& ext = iext[at_end[k]];
                    ++ext.count;
                    ext.positions.push_back({pos.entry, pos.itemset, k});
                }
            }
            for (std::uint32_t i = pos.itemset + 1; i < seq.itemsets.size(); ++i) {
                const Itemset& itemset = seq.itemsets[i];
                bool carries_last = itemset_contains(itemset, last);
                for (std::uint32_t k = 0; k < itemset.size(); ++k) {
                    ItemCode x = itemset[k];
                    if (entry_sext.insert(x).second) {
                        auto& ext = sext[x];
                        ++ext.count;
                        ext.positions.push_back({pos.entry, i, k});
                    }
                    if (carries_last && x > last_max && entry_iext.insert(x).second) {
                        auto& ext = iext[x];
                        ++ext.count;
                        ext.positions.push_back({pos.entry, i, k});
                    }
                }
            }
        }

        for (auto& [x, ext] : iext) {
            if (ext.count < threshold) continue;
            prefix.itemsets.back().push_back(x);
            grow(prefix, ext.positions);
            prefix.itemsets.back().pop_back();
        }
        for (auto& [x, ext] : sext) {
            if (ext.count < threshold) continue;
            prefix.itemsets.push_back({x});
            grow(prefix, ext.positions);
            prefix.itemsets.pop_back();
        }
    }

    void run() {
        // Roots: single items at their first occurrence per entry.
        std::map<ItemCode, Extension> roots;
        std::set<ItemCode> seen;
        for (std::uint32_t e = 0; e < db.size(); ++e) {
            seen.clear();
            const Sequence& seq = db.sequences[e];
            for (std::uint32_t i = 0; i < seq.itemsets.size(); ++i)
                for (std::uint32_t k = 0; k < seq.itemsets[i].size(); ++k)
                    if (seen.insert(seq.itemsets[i][k]).second) {
                        auto& ext = roots[seq.itemsets[i][k]];
                        ++ext.count;
                        ext.positions.push_back({e, i, k});
                    }
        }
        Sequence prefix;
        for (auto& [x, ext] : roots) {
            if (ext.count < threshold) continue;
            prefix.itemsets.push_back({x});
            grow(prefix, ext.positions);
            prefix.itemsets.pop_back();
        }
    }
};

// Keeps only patterns with no equal-support strict super-sequence among the
// candidates. Anti-monotonicity limits dominators to the same support class.
std::vector<MinedPattern> eliminate_non_closed(std::vector<MinedPattern> candidates) {
    std::map<std::uint32_t, std::vector<std::size_t>> by_support;
    for (std::size_t i = 0; i < candidates.size(); ++i)
        by_support[candidates[i].support].push_back(i);

    std::vector<bool> drop(candidates.size(), false);
    for (auto& [sup, group] : by_support) {
        std::sort(group.begin(), group.end(), [&](std::size_t a, std::size_t b) {
            return candidates[a].sequence.item_count() < candidates[b].sequence.item_count();
        });
        for (std::size_t gi = 0; gi < group.size(); ++gi) {
            const Sequence& small = candidates[group[gi]].sequence;
            for (std::size_t gj = group.size(); gj-- > gi + 1;) {
                // equal item counts cannot strictly contain each other
                if (candidates[group[gj]].sequence.item_count() == small.item_count()) continue;
                if (is_subsequence(small, candidates[group[gj]].sequence)) {
                    drop[group[gi]] = true;
                    break;
                }
            }
        }
    }

    std::vector<MinedPattern> out;
    for (std::size_t i = 0; i < candidates.size(); ++i)
        if (!drop[i]) out.push_back(std::move(candidates[i]));
    return out;
}

void sort_patterns(std::vector<MinedPattern>& patterns) {
    std::sort(patterns.begin(), patterns.end(), [](const MinedPattern& a, const MinedPattern& b) {
        if (a.support != b.support) return a.support > b.support;
        return canonical_less(a.sequence, b.sequence);
    });
}

}  // namespace

std::vector<MinedPattern> mine_closed(const SequenceDatabase& db, double min_sup,
                                      const MinerOptions& options) {
    if (db.size() == 0) throw DataError("cannot mine an empty sequence database");
    Miner miner{db, support_threshold(min_sup, db.size()), options, {}, {}, {}};
    miner.run();
    auto out = eliminate_non_closed(std::move(miner.candidates));
    sort_patterns(out);
    return out;
}

namespace {

// Backtracking matcher, deliberately not sharing code with is_subsequence.
bool oracle_contains(const Sequence& pattern, const Sequence& seq, std::size_t pi,
                     std::size_t si) {
    if (pi == pattern.size()) return true;
    if (si == seq.size()) return false;
    if (itemset_contains(seq.itemsets[si], pattern.itemsets[pi]) &&
        oracle_contains(pattern, seq, pi + 1, si + 1))
        return true;
    return oracle_contains(pattern, seq, pi, si + 1);
}

struct BruteForce {
    const SequenceDatabase& db;
    std::uint32_t threshold;
    std::vector<ItemCode> alphabet;
    std::size_t max_len = 0;
    std::vector<MinedPattern> found;

    std::uint32_t count_support(const Sequence& pattern) const {
        std::uint32_t count = 0;
        for (const Sequence& seq : db.sequences)
            if (oracle_contains(pattern, seq, 0, 0)) ++count;
        return count;
    }

    void dfs(Sequence& cur) {
        std::uint32_t sup = count_support(cur);
        if (sup < threshold) return;
        found.push_back({cur, sup, std::nullopt});
        for (ItemCode x : alphabet) {
            if (x > cur.itemsets.back().back()) {
                cur.itemsets.back().push_back(x);
                dfs(cur);
                cur.itemsets.back().pop_back();
            }
        }
        if (cur.size() < max_len)
            for (ItemCode x : alphabet) {
                cur.itemsets.push_back({x});
                dfs(cur);
                cur.itemsets.pop_back();
            }
    }
};

}  // namespace

std::vector<MinedPattern> brute_force_closed(const SequenceDatabase& db, double min_sup) {
    if (db.size() == 0) throw DataError("cannot mine an empty sequence database");

    std::size_t total_items = 0;
    std::set<ItemCode> alphabet;
    std::size_t max_len = 0;
    for (const Sequence& seq : db.sequences) {
        total_items += seq.item_count();
        max_len = std::max(max_len, seq.size());
        for (const Itemset& itemset : seq.itemsets) alphabet.insert(itemset.begin(), itemset.end());
    }
    if (total_items > 40)
        throw DataError("brute-force miner is limited to 40 items total, got " +
                        std::to_string(total_items));
    if (alphabet.size() > 8)
        throw DataError("brute-force miner is limited to 8 distinct items, got " +
                        std::to_string(alphabet.size()));

    BruteForce bf{db, support_threshold(min_sup, db.size()),
                  std::vector<ItemCode>(alphabet.begin(), alphabet.end()), max_len, {}};
    Sequence cur;
    for (ItemCode x : bf.alphabet) {
        cur.itemsets.push_back({x});
        bf.dfs(cur);
        cur.itemsets.pop_back();
    }

    // closedness filter with the same independent matcher
    std::vector<bool> drop(bf.found.size(), false);
    for (std::size_t i = 0; i < bf.found.size(); ++i)
        for (std::size_t j = 0; j < bf.found.size(); ++j) {
            if (i == j || bf.found[i].support != bf.found[j].support) continue;
            if (bf.found[i].sequence.item_count() >= bf.found[j].sequence.item_count()) continue;
            if (oracle_contains(bf.found[i].sequence, bf.found[j].sequence, 0, 0)) {
                drop[i] = true;
                break;
            }
        }

    std::vector<MinedPattern> out;
    for (std::size_t i = 0; i < bf.found.size(); ++i)
        if (!drop[i]) {
            const Itemset& last = bf.found[i].sequence.itemsets.back();
            if (last.size() == 1 && is_class_item(last[0]))
                bf.found[i].class_tag = class_of_item(last[0]);
            out.push_back(std::move(bf.found[i]));
        }
    sort_patterns(out);
    return out;
}

ClassSplit split_by_class(const std::vector<MinedPattern>& patterns) {
    ClassSplit out;
    for (const MinedPattern& p : patterns) {
        const Sequence& seq = p.sequence;
        std::optional<CommunityId> tag;
        for (std::size_t i = 0; i < seq.size(); ++i) {
            const Itemset& itemset = seq.itemsets[i];
            bool has_class = std::any_of(itemset.begin(), itemset.end(),
                                         [](ItemCode c) { return is_class_item(c); });
            if (!has_class) continue;
            if (i + 1 != seq.size() || itemset.size() != 1)
                throw DataError("class item outside the final singleton itemset in pattern");
            tag = class_of_item(itemset[0]);
        }
        if (!tag) {
            out.network.push_back(p);
            continue;
        }
        if (seq.size() == 1) continue;  // bare class item strips to nothing
        MinedPattern stripped = p;
        stripped.sequence.itemsets.pop_back();
        stripped.class_tag = tag;
        out.per_community[*tag].push_back(std::move(stripped));
    }
    return out;
}

void dump_patterns(const std::vector<MinedPattern>& patterns, const ItemCatalog& catalog,
                   const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError(path + ": cannot open for writing");
    for (const MinedPattern& p : patterns) {
        out << p.support << '\t';
        if (p.class_tag)
            out << *p.class_tag;
        else
            out << '-';
        out << '\t' << catalog.sequence_text(p.sequence) << '\n';
    }
    if (!out.flush()) throw DataError(path + ": write failed");
}

std::vector<MinedPattern> load_patterns(const std::string& path, const ItemCatalog& catalog) {
    std::ifstream in(path);
    if (!in) throw DataError(path + ": cannot open");
    std::vector<MinedPattern> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::size_t tab1 = line.find('\t');
        std::size_t tab2 = tab1 == std::string::npos ? std::string::npos : line.find('\t', tab1 + 1);
        if (tab2 == std::string::npos)
            throw DataError(path + ":" + std::to_string(line_no) +
                            ": expected support<TAB>class<TAB>sequence");
        MinedPattern p;
        std::string sup_text = line.substr(0, tab1);
        auto res = std::from_chars(sup_text.data(), sup_text.data() + sup_text.size(), p.support);
        if (res.ec != std::errc() || res.ptr != sup_text.data() + sup_text.size())
            throw DataError(path + ":" + std::to_string(line_no) + ": bad support '" + sup_text +
                            "'");
        p.sequence = catalog.parse_sequence(line.substr(tab2 + 1));
        if (p.sequence.size() == 0)
            throw DataError(path + ":" + std::to_string(line_no) + ": empty pattern");
        const Itemset& last = p.sequence.itemsets.back();
        if (last.size() == 1 && is_class_item(last[0])) p.class_tag = class_of_item(last[0]);
        std::string class_text = line.substr(tab1 + 1, tab2 - tab1 - 1);
        std::string expect = p.class_tag ? std::to_string(*p.class_tag) : "-";
        if (class_text != expect)
            throw DataError(path + ":" + std::to_string(line_no) + ": class column '" + class_text +
                            "' disagrees with the pattern's trailing class item");
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace comseq
