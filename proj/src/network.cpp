#include "comseq/network.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "comseq/csv.hpp"

namespace comseq {

namespace {

void check_label_text(std::string_view label, const std::string& where, std::size_t line) {
    if (label.empty())
        throw DataError(where + ":" + std::to_string(line) + ": empty label");
    for (unsigned char c : label) {
        if (c < 0x20 || c == ',' || c == '\t')
            throw DataError(where + ":" + std::to_string(line) +
                            ": label '" + std::string(label) +
                            "' contains a comma, tab or control character");
    }
}

std::uint32_t parse_slice(std::string_view text, const std::string& where, std::size_t line) {
    std::uint32_t t = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), t);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw DataError(where + ":" + std::to_string(line) + ": bad slice index '" +
                        std::string(text) + "'");
    if (t == 0)
        throw DataError(where + ":" + std::to_string(line) + ": slice indexes are 1-based");
    return t;
}

double parse_value(std::string_view text, const std::string& where, std::size_t line) {
    std::string s(text);
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || s.empty())
        throw DataError(where + ":" + std::to_string(line) + ": bad value '" + s + "'");
    if (std::isnan(v) || std::isinf(v))
        throw DataError(where + ":" + std::to_string(line) + ": value must be finite, got '" + s + "'");
    return v;
}

}  // namespace

std::uint32_t GlobalWeightedNetwork::weight(NodeId u, NodeId v) const {
    const auto& row = adj.at(u);
    auto it = std::lower_bound(row.begin(), row.end(), v,
                               [](const auto& p, NodeId x) { return p.first < x; });
    if (it == row.end() || it->first != v) return 0;
    return it->second;
}

NodeId DynamicNetwork::node_of(std::string_view label) const {
    auto it = std::lower_bound(labels_.begin(), labels_.end(), label);
    if (it == labels_.end() || *it != label)
        throw DataError("unknown node label '" + std::string(label) + "'");
    return static_cast<NodeId>(it - labels_.begin());
}

void DynamicNetwork::check_slice(std::uint32_t t) const {
    if (t == 0 || t > theta_)
        throw std::out_of_range("slice " + std::to_string(t) + " outside [1, " +
                                std::to_string(theta_) + "]");
}

void DynamicNetwork::check_node(NodeId v) const {
    if (v >= labels_.size())
        throw std::out_of_range("node id " + std::to_string(v) + " outside [0, " +
                                std::to_string(labels_.size()) + ")");
}

bool DynamicNetwork::adjacency(std::uint32_t t, NodeId u, NodeId v) const {
    check_slice(t);
    check_node(u);
    check_node(v);
    if (u == v)
        throw std::out_of_range("adjacency is undefined on the diagonal (self-loops are banned)");
    const auto& row = adj_[t - 1][u];
    return std::binary_search(row.begin(), row.end(), v);
}

std::span<const NodeId> DynamicNetwork::neighborhood(std::uint32_t t, NodeId v) const {
    check_slice(t);
    check_node(v);
    return adj_[t - 1][v];
}

std::uint32_t DynamicNetwork::degree(std::uint32_t t, NodeId v) const {
    return static_cast<std::uint32_t>(neighborhood(t, v).size());
}

double DynamicNetwork::attribute_raw(std::size_t attr, std::uint32_t t, NodeId v) const {
    check_slice(t);
    check_node(v);
    if (attr >= attr_names_.size())
        throw std::out_of_range("attribute index " + std::to_string(attr) + " outside [0, " +
                                std::to_string(attr_names_.size()) + ")");
    return attr_[attr][t - 1][v];
}

NetworkBuilder& NetworkBuilder::edge(std::uint32_t t, std::string_view u, std::string_view v) {
    edges_.push_back({t, std::string(u), std::string(v), 0});
    return *this;
}

NetworkBuilder& NetworkBuilder::attribute(std::string_view name, std::uint32_t t,
                                          std::string_view node, double value) {
    attrs_.push_back({t, std::string(node), std::string(name), value, 0});
    return *this;
}

NetworkBuilder& NetworkBuilder::node(std::string_view label) {
    extra_nodes_.emplace_back(label);
    return *this;
}

NetworkBuilder& NetworkBuilder::slices(std::uint32_t theta) {
    min_theta_ = std::max(min_theta_, theta);
    return *this;
}

DynamicNetwork NetworkBuilder::build(const WarningSink& warn) {
    DynamicNetwork net;

    std::set<std::string> label_set(extra_nodes_.begin(), extra_nodes_.end());
    std::uint32_t theta = min_theta_;
    for (const auto& e : edges_) {
        label_set.insert(e.u);
        label_set.insert(e.v);
        theta = std::max(theta, e.t);
    }
    for (const auto& a : attrs_) {
        label_set.insert(a.node);
        theta = std::max(theta, a.t);
    }
    if (label_set.empty()) throw DataError(edges_path_ + ": no nodes found in the input");
    if (theta == 0) throw DataError(edges_path_ + ": no slices found in the input");

    net.labels_.assign(label_set.begin(), label_set.end());
    net.theta_ = theta;
    const std::uint32_t n = net.node_count();

    auto id_of = [&](const std::string& label) {
        auto it = std::lower_bound(net.labels_.begin(), net.labels_.end(), label);
        return static_cast<NodeId>(it - net.labels_.begin());
    };
    auto warn_at = [&](const std::string& path, std::size_t line, const std::string& msg) {
        if (!warn) return;
        if (line)
            warn(path + ":" + std::to_string(line) + ": " + msg);
        else
            warn(msg);
    };

    // Edges: reject self-loops, deduplicate repeated rows per slice.
    std::vector<std::set<std::pair<NodeId, NodeId>>> slice_edges(theta);
    for (const auto& e : edges_) {
        NodeId u = id_of(e.u), v = id_of(e.v);
        if (u == v)
            throw DataError(edges_path_ + ":" + std::to_string(e.line) + ": self-loop on '" +
                            e.u + "' at slice " + std::to_string(e.t));
        auto key = std::minmax(u, v);
        if (!slice_edges[e.t - 1].insert({key.first, key.second}).second)
            warn_at(edges_path_, e.line,
                    "duplicate edge (" + e.u + "," + e.v + ") at slice " + std::to_string(e.t) +
                        ", ignoring repeat");
    }
    net.adj_.assign(theta, std::vector<std::vector<NodeId>>(n));
    for (std::uint32_t t = 0; t < theta; ++t) {
        for (auto [u, v] : slice_edges[t]) {
            net.adj_[t][u].push_back(v);
            net.adj_[t][v].push_back(u);
        }
        for (auto& row : net.adj_[t]) std::sort(row.begin(), row.end());
    }

    // Attributes: the name set is global; values are per (attr, slice, node).
    std::set<std::string> name_set;
    for (const auto& a : attrs_) name_set.insert(a.name);
    net.attr_names_.assign(name_set.begin(), name_set.end());
    constexpr double kAbsent = std::numeric_limits<double>::quiet_NaN();
    net.attr_.assign(net.attr_names_.size(),
                     std::vector<std::vector<double>>(theta, std::vector<double>(n, kAbsent)));
    for (const auto& a : attrs_) {
        auto it = std::lower_bound(net.attr_names_.begin(), net.attr_names_.end(), a.name);
        std::size_t ai = static_cast<std::size_t>(it - net.attr_names_.begin());
        double& slot = net.attr_[ai][a.t - 1][id_of(a.node)];
        if (!std::isnan(slot)) {
            if (slot == a.value) {
                warn_at(attrs_path_, a.line,
                        "duplicate attribute row (" + a.node + "," + a.name + ") at slice " +
                            std::to_string(a.t) + ", ignoring repeat");
                continue;
            }
            throw DataError(attrs_path_ + ":" + std::to_string(a.line) +
                            ": conflicting values for (" + a.node + "," + a.name +
                            ") at slice " + std::to_string(a.t));
        }
        slot = a.value;
    }

    return net;
}

DynamicNetwork load_network(const std::string& edges_path, const std::string& attrs_path,
                            const WarningSink& warn) {
    NetworkBuilder b;
    b.edges_path_ = edges_path;
    b.attrs_path_ = attrs_path;

    std::ifstream edges_in(edges_path);
    if (!edges_in) throw DataError(edges_path + ": cannot open");
    CsvReader edges(edges_in, edges_path, {"t", "u", "v"});
    while (auto row = edges.next()) {
        std::uint32_t t = parse_slice(row->fields[0], edges_path, row->line);
        check_label_text(row->fields[1], edges_path, row->line);
        check_label_text(row->fields[2], edges_path, row->line);
        b.edges_.push_back({t, row->fields[1], row->fields[2], row->line});
    }

    std::ifstream attrs_in(attrs_path);
    if (!attrs_in) throw DataError(attrs_path + ": cannot open");
    CsvReader attrs(attrs_in, attrs_path, {"t", "node", "attr", "value"});
    while (auto row = attrs.next()) {
        std::uint32_t t = parse_slice(row->fields[0], attrs_path, row->line);
        check_label_text(row->fields[1], attrs_path, row->line);
        check_label_text(row->fields[2], attrs_path, row->line);
        for (unsigned char c : row->fields[2])
            if (c == '=' || c == '(' || c == ')')
                throw DataError(attrs_path + ":" + std::to_string(row->line) +
                                ": attribute name '" + row->fields[2] +
                                "' may not contain '=', '(' or ')'");
        double v = parse_value(row->fields[3], attrs_path, row->line);
        b.attrs_.push_back({t, row->fields[1], row->fields[2], v, row->line});
    }

    return b.build(warn);
}

void save_network(const DynamicNetwork& net, const std::string& edges_path,
                  const std::string& attrs_path) {
    std::ofstream edges(edges_path);
    if (!edges) throw DataError(edges_path + ": cannot open for writing");
    edges << "t,u,v\n";
    for (std::uint32_t t = 1; t <= net.slice_count(); ++t)
        for (NodeId u = 0; u < net.node_count(); ++u)
            for (NodeId v : net.neighborhood(t, u))
                if (u < v) edges << t << ',' << net.label(u) << ',' << net.label(v) << '\n';
    if (!edges.flush()) throw DataError(edges_path + ": write failed");

    std::ofstream attrs(attrs_path);
    if (!attrs) throw DataError(attrs_path + ": cannot open for writing");
    attrs << "t,node,attr,value\n";
    const auto& names = net.attribute_names();
    for (std::uint32_t t = 1; t <= net.slice_count(); ++t)
        for (NodeId v = 0; v < net.node_count(); ++v)
            for (std::size_t a = 0; a < names.size(); ++a) {
                double value = net.attribute_raw(a, t, v);
                if (std::isnan(value)) continue;
                attrs << t << ',' << net.label(v) << ',' << names[a] << ','
                      << format_double(value) << '\n';
            }
    if (!attrs.flush()) throw DataError(attrs_path + ": write failed");
}

GlobalWeightedNetwork aggregate(const DynamicNetwork& net) {
    GlobalWeightedNetwork g;
    g.n = net.node_count();
    g.adj.assign(g.n, {});

    // Count slice occurrences per undirected pair.
    std::map<std::pair<NodeId, NodeId>, std::uint32_t> counts;
    for (std::uint32_t t = 1; t <= net.slice_count(); ++t)
        for (NodeId u = 0; u < g.n; ++u)
            for (NodeId v : net.neighborhood(t, u))
                if (u < v) ++counts[{u, v}];

    g.weighted_degree.assign(g.n, 0);
    for (auto& [pair, w] : counts) {
        auto [u, v] = pair;
        g.adj[u].push_back({v, w});
        g.adj[v].push_back({u, w});
        g.weighted_degree[u] += w;
        g.weighted_degree[v] += w;
        g.total_weight += w;
    }
    g.edge_count = counts.size();
    for (auto& row : g.adj)
        std::sort(row.begin(), row.end());
    return g;
}

}  // namespace comseq
