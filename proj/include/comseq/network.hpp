#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "comseq/common.hpp"

namespace comseq {

// Union of the per-slice edge sets with slice-count weights. Nodes keep the
// ids of the dynamic network they were aggregated from, including nodes that
// never touch an edge.
struct GlobalWeightedNetwork {
    std::uint32_t n = 0;
    // adj[v] sorted by neighbour id; weight = number of slices the edge
    // appears in, so 1 <= w <= theta.
    std::vector<std::vector<std::pair<NodeId, std::uint32_t>>> adj;
    std::vector<std::uint64_t> weighted_degree;
    std::uint64_t total_weight = 0;  // sum over undirected edges
    std::size_t edge_count = 0;

    std::uint32_t weight(NodeId u, NodeId v) const;

    template <typename F>
    void for_each_edge(F&& f) const {  // visits each edge once, u < v
        for (NodeId u = 0; u < n; ++u)
            for (auto [v, w] : adj[u])
                if (u < v) f(u, v, w);
    }
};

// Sequence of undirected simple graphs over a fixed node set, plus one
// optional real value per (attribute, slice, node). Node ids are dense
// indexes into the sorted label list. Slices are 1-based.
class DynamicNetwork {
public:
    std::uint32_t node_count() const { return static_cast<std::uint32_t>(labels_.size()); }
    std::uint32_t slice_count() const { return theta_; }

    const std::vector<std::string>& node_labels() const { return labels_; }
    const std::string& label(NodeId v) const { return labels_.at(v); }
    NodeId node_of(std::string_view label) const;  // DataError if unknown

    bool adjacency(std::uint32_t t, NodeId u, NodeId v) const;
    std::span<const NodeId> neighborhood(std::uint32_t t, NodeId v) const;
    std::uint32_t degree(std::uint32_t t, NodeId v) const;

    const std::vector<std::string>& attribute_names() const { return attr_names_; }
    // NaN means "no value at this node/slice"; loaders reject NaN input, so
    // the sentinel is unambiguous.
    double attribute_raw(std::size_t attr, std::uint32_t t, NodeId v) const;

    void check_slice(std::uint32_t t) const;
    void check_node(NodeId v) const;

private:
    friend class NetworkBuilder;

    std::vector<std::string> labels_;
    std::uint32_t theta_ = 0;
    std::vector<std::vector<std::vector<NodeId>>> adj_;   // [t-1][v], sorted
    std::vector<std::string> attr_names_;                 // sorted
    std::vector<std::vector<std::vector<double>>> attr_;  // [a][t-1][v]
};

// Assembles a validated DynamicNetwork from in-memory parts; the file loader
// and the tests both go through it.
class NetworkBuilder {
public:
    NetworkBuilder& edge(std::uint32_t t, std::string_view u, std::string_view v);
    NetworkBuilder& attribute(std::string_view name, std::uint32_t t,
                              std::string_view node, double value);
    // Reserves a label (or slice) that may not occur in any edge/attribute row.
    NetworkBuilder& node(std::string_view label);
    NetworkBuilder& slices(std::uint32_t theta);

    DynamicNetwork build(const WarningSink& warn = {});

private:
    struct EdgeRow {
        std::uint32_t t;
        std::string u, v;
        std::size_t line = 0;
    };
    struct AttrRow {
        std::uint32_t t;
        std::string node, name;
        double value;
        std::size_t line = 0;
    };

    friend DynamicNetwork load_network(const std::string&, const std::string&,
                                       const WarningSink&);

    std::vector<EdgeRow> edges_;
    std::vector<AttrRow> attrs_;
    std::vector<std::string> extra_nodes_;
    std::uint32_t min_theta_ = 0;
    std::string edges_path_ = "<edges>";
    std::string attrs_path_ = "<attrs>";
};

// edges CSV: header "t,u,v"; attrs CSV: header "t,node,attr,value".
DynamicNetwork load_network(const std::string& edges_path, const std::string& attrs_path,
                            const WarningSink& warn = {});
void save_network(const DynamicNetwork& net, const std::string& edges_path,
                  const std::string& attrs_path);

GlobalWeightedNetwork aggregate(const DynamicNetwork& net);

}  // namespace comseq
