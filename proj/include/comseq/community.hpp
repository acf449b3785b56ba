#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "comseq/common.hpp"
#include "comseq/network.hpp"

namespace comseq {

// Hard partition of the node set. Community ids are dense in [0, count).
struct CommunityStructure {
    std::vector<CommunityId> assignment;  // node id -> community id
    std::vector<std::uint32_t> sizes;     // community id -> member count

    std::uint32_t community_count() const { return static_cast<std::uint32_t>(sizes.size()); }
    CommunityId community_of(NodeId v) const { return assignment.at(v); }

    // Validates and compacts an arbitrary labelling: distinct input ids are
    // mapped to 0.. in ascending numeric order.
    static CommunityStructure from_assignment(std::vector<CommunityId> raw);

    std::vector<std::vector<NodeId>> members() const;
};

// Weighted Newman modularity at resolution 1. Errors on an empty graph.
double modularity(const GlobalWeightedNetwork& g, const CommunityStructure& c);

// Two-phase greedy modularity maximisation (local moves + aggregation).
// Node visit order is a seeded shuffle; gain ties go to the lowest community
// id; a node moves only on a strict improvement. The returned partition is
// re-indexed by decreasing community size (ties: lowest member id first).
CommunityStructure louvain(const GlobalWeightedNetwork& g, std::uint64_t seed = 42);

// Ids of communities with at least min_size members, ascending.
std::vector<CommunityId> filter_small(const CommunityStructure& c, std::uint32_t min_size);

// CSV with header "node,community", rows ordered by node label.
void save_communities_csv(const CommunityStructure& c, const std::vector<std::string>& labels,
                          const std::string& path);
CommunityStructure load_communities_csv(const std::string& path,
                                        const std::vector<std::string>& labels);

}  // namespace comseq
