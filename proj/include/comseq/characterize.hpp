#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "comseq/common.hpp"
#include "comseq/community.hpp"
#include "comseq/miner.hpp"
#include "comseq/sequence.hpp"

namespace comseq {

// A community-tagged pattern with its support on both sides of the community
// boundary. Counts are exact; the ratio and growth views derive from them.
struct RankedPattern {
    MinedPattern pattern;               // class item stripped from the sequence
    std::uint32_t in_count = 0;         // supporters inside the community
    std::uint32_t out_count = 0;        // supporters in the complement
    std::uint32_t in_scope = 0;         // community size
    std::uint32_t out_scope = 0;        // complement size
    std::vector<NodeId> supporters_in;  // ascending

    double sup_in() const { return static_cast<double>(in_count) / in_scope; }
    double sup_out() const { return static_cast<double>(out_count) / out_scope; }
    double growth() const;  // sup_in / sup_out; +inf when out_count is 0
};

// Exact growth comparison by integer cross multiplication. Both sides must be
// ranked against the same community; infinite beats finite, two infinites
// order by in_count.
bool growth_greater(const RankedPattern& a, const RankedPattern& b);

// Supports and growth for every pattern tagged with this community. Each
// in-community recount must reproduce the mined support; a mismatch means the
// pattern file and the database file come from different runs.
std::vector<RankedPattern> growth_rate(const std::vector<MinedPattern>& patterns,
                                       const SequenceDatabase& db, const CommunityStructure& comm,
                                       CommunityId community);

// Highest in-community support; ties prefer more itemsets, then canonical
// order.
std::size_t most_supported_index(const std::vector<RankedPattern>& ranked);

// Greedy cover of the community: seed with the highest growth, then keep
// adding the candidate whose supporter set is most Jaccard-distant from the
// covered set (ties: higher growth, then higher in-support, then canonical).
// Only patterns with growth > 1 qualify and a round must contribute at least
// one uncovered node. Returns indexes into ranked in selection order.
std::vector<std::size_t> select_representatives(const std::vector<RankedPattern>& ranked,
                                                const std::vector<NodeId>& members,
                                                std::size_t max_patterns = 10);

// Ascending union of the chosen patterns' supporter sets.
std::vector<NodeId> coverage_union(const std::vector<RankedPattern>& ranked,
                                   const std::vector<std::size_t>& chosen);

// Members supported by none of the covering nodes. Works against any cover:
// the representative union, a single pattern's supporters, or their union.
std::vector<NodeId> detect_anomalies(const std::vector<NodeId>& members,
                                     const std::vector<NodeId>& covered);

struct CommunityReport {
    CommunityId community = 0;
    std::uint32_t size = 0;
    bool characterized = false;  // false: nothing mined for this community
    std::optional<RankedPattern> most_supported;
    std::optional<RankedPattern> most_emerging;  // absent when nothing has growth > 1
    std::vector<RankedPattern> supplementary;    // cover minus the seed, selection order
    std::vector<NodeId> coverage;                // union over the cover, ascending
    std::vector<NodeId> anomalies;               // members not in coverage
    std::vector<NodeId> anomalies_most_supported;
};

CommunityReport build_report(CommunityId community, const std::vector<NodeId>& members,
                             const std::vector<RankedPattern>& ranked,
                             std::size_t max_patterns = 10);

// Canonical machine form (stable key order, counts as integers, ratios as
// shortest round-trip strings) and a human rendering of the same content.
std::string report_json(const CommunityReport& report, const ItemCatalog& catalog,
                        const std::vector<std::string>& labels);
std::string report_text(const CommunityReport& report, const ItemCatalog& catalog,
                        const std::vector<std::string>& labels);

}  // namespace comseq
