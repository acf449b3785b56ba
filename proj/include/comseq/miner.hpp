#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "comseq/common.hpp"
#include "comseq/sequence.hpp"

namespace comseq {

struct MinedPattern {
    Sequence sequence;  // as mined; a trailing class itemset stays in place
    std::uint32_t support = 0;
    std::optional<CommunityId> class_tag;  // derived from a trailing class item
};

struct MinerOptions {
    // Explored prefixes (= emitted candidates) are capped; overruns abort
    // with a resource error suggesting a higher min_sup.
    std::size_t max_candidates = 1'000'000;
};

// All closed frequent sequential patterns of the database. Support is the
// number of entries containing the pattern; a pattern is frequent when
// support/entries >= min_sup and closed when no super-sequence has the same
// support. Output order: support descending, then canonical.
std::vector<MinedPattern> mine_closed(const SequenceDatabase& db, double min_sup,
                                      const MinerOptions& options = {});

// Exhaustive reference: enumerates every candidate sub-sequence buildable
// from the database's items and filters non-closed ones, using a separately
// coded matcher. Guarded to tiny inputs (<= 40 items total, alphabet <= 8).
std::vector<MinedPattern> brute_force_closed(const SequenceDatabase& db, double min_sup);

struct ClassSplit {
    std::vector<MinedPattern> network;  // patterns without a class item
    std::map<CommunityId, std::vector<MinedPattern>> per_community;  // class stripped
};

// Groups patterns by their trailing class item and strips it. A class item
// anywhere else is a data error; patterns that were nothing but a class item
// are dropped (they would strip to the empty sequence).
ClassSplit split_by_class(const std::vector<MinedPattern>& patterns);

// Line-oriented dump: support<TAB>class<TAB>(item,item)(item)...
void dump_patterns(const std::vector<MinedPattern>& patterns, const ItemCatalog& catalog,
                   const std::string& path);
std::vector<MinedPattern> load_patterns(const std::string& path, const ItemCatalog& catalog);

}  // namespace comseq
