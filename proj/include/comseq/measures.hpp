#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "comseq/common.hpp"
#include "comseq/community.hpp"
#include "comseq/network.hpp"

namespace comseq {

// Per (slice, node) topological measures, computed against a fixed community
// partition. Degenerate cases are pinned: transitivity is 0 when degree < 2,
// participation and embeddedness are 0 for isolated nodes, and z is 0 when
// the community's internal-degree spread vanishes.
struct MeasureTable {
    std::uint32_t n = 0;
    std::uint32_t theta = 0;
    std::vector<std::uint32_t> degree;
    std::vector<std::uint32_t> internal_degree;
    std::vector<double> transitivity;
    std::vector<double> z;  // within-module degree
    std::vector<double> participation;
    std::vector<double> embeddedness;

    std::size_t idx(std::uint32_t t, NodeId v) const {
        return static_cast<std::size_t>(t - 1) * n + v;
    }
    std::uint32_t degree_at(std::uint32_t t, NodeId v) const { return degree[idx(t, v)]; }
    std::uint32_t internal_degree_at(std::uint32_t t, NodeId v) const {
        return internal_degree[idx(t, v)];
    }
    double transitivity_at(std::uint32_t t, NodeId v) const { return transitivity[idx(t, v)]; }
    double z_at(std::uint32_t t, NodeId v) const { return z[idx(t, v)]; }
    double participation_at(std::uint32_t t, NodeId v) const { return participation[idx(t, v)]; }
    double embeddedness_at(std::uint32_t t, NodeId v) const { return embeddedness[idx(t, v)]; }
};

// Single-value entry points; compute_measures batches the same definitions.
std::uint32_t internal_degree(const DynamicNetwork& net, std::uint32_t t, NodeId v,
                              const CommunityStructure& comm);
double local_transitivity(const DynamicNetwork& net, std::uint32_t t, NodeId v);
// Neighbour count of v per community at slice t (only communities with at
// least one neighbour appear), ascending by community id.
std::vector<std::pair<CommunityId, std::uint32_t>> community_degrees(
    const DynamicNetwork& net, std::uint32_t t, NodeId v, const CommunityStructure& comm);
double participation_coefficient(const DynamicNetwork& net, std::uint32_t t, NodeId v,
                                 const CommunityStructure& comm);
// z from a table that already has internal degrees; sigma is the population
// standard deviation over the node's community at slice t.
double within_module_degree(const MeasureTable& table, std::uint32_t t, NodeId v,
                            const CommunityStructure& comm);
double embeddedness(const MeasureTable& table, std::uint32_t t, NodeId v);
bool is_hub(const MeasureTable& table, std::uint32_t t, NodeId v);  // z >= 2.5

MeasureTable compute_measures(const DynamicNetwork& net, const CommunityStructure& comm,
                              unsigned threads = 1);

// CSV: t,node,degree,int_degree,transitivity,z,participation,embeddedness
void save_measures_csv(const MeasureTable& table, const std::vector<std::string>& labels,
                       const std::string& path);

struct MeasuresFile {
    MeasureTable table;
    std::vector<std::string> labels;
};
MeasuresFile load_measures_csv(const std::string& path);

}  // namespace comseq
