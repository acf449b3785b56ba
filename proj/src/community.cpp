#include "comseq/community.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <numeric>
#include <random>

#include "comseq/csv.hpp"

namespace comseq {

CommunityStructure CommunityStructure::from_assignment(std::vector<CommunityId> raw) {
    if (raw.empty()) throw DataError("empty community assignment");
    std::vector<CommunityId> distinct(raw);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

    CommunityStructure c;
    c.assignment.resize(raw.size());
    c.sizes.assign(distinct.size(), 0);
    for (std::size_t v = 0; v < raw.size(); ++v) {
        auto it = std::lower_bound(distinct.begin(), distinct.end(), raw[v]);
        CommunityId id = static_cast<CommunityId>(it - distinct.begin());
        c.assignment[v] = id;
        ++c.sizes[id];
    }
    return c;
}

std::vector<std::vector<NodeId>> CommunityStructure::members() const {
    std::vector<std::vector<NodeId>> out(community_count());
    for (std::size_t i = 0; i < community_count(); ++i) out[i].reserve(sizes[i]);
    for (NodeId v = 0; v < assignment.size(); ++v) out[assignment[v]].push_back(v);
    return out;
}

double modularity(const GlobalWeightedNetwork& g, const CommunityStructure& c) {
    if (g.total_weight == 0) throw DataError("modularity is undefined on a graph with no edges");
    if (c.assignment.size() != g.n)
        throw DataError("community assignment covers " + std::to_string(c.assignment.size()) +
                        " nodes, graph has " + std::to_string(g.n));

    const double two_m = 2.0 * static_cast<double>(g.total_weight);
    std::vector<double> intra(c.community_count(), 0.0);  // 2 * internal weight
    std::vector<double> total(c.community_count(), 0.0);  // sum of weighted degrees
    g.for_each_edge([&](NodeId u, NodeId v, std::uint32_t w) {
        if (c.assignment[u] == c.assignment[v]) intra[c.assignment[u]] += 2.0 * w;
    });
    for (NodeId v = 0; v < g.n; ++v)
        total[c.assignment[v]] += static_cast<double>(g.weighted_degree[v]);

    double q = 0.0;
    for (std::size_t i = 0; i < intra.size(); ++i) {
        double frac_tot = total[i] / two_m;
        q += intra[i] / two_m - frac_tot * frac_tot;
    }
    return q;
}

namespace {

// Aggregation levels carry self-loops (collapsed intra-community weight),
// which the input graph never has, so Louvain runs on its own structure.
struct LevelGraph {
    std::uint32_t n = 0;
    std::vector<std::vector<std::pair<std::uint32_t, double>>> adj;  // no self entries
    std::vector<double> self_loop;  // internal weight, counted once
    std::vector<double> wdeg;       // sum of adj weights + 2 * self_loop
    double total = 0;               // m
};

// One pass structure: local moves until stable, then report the node ->
// community map of this level (ids dense, ascending by first occurrence of
// the old community id).
struct LevelResult {
    std::vector<std::uint32_t> community;  // dense
    std::uint32_t count = 0;
    bool moved = false;
};

LevelResult local_moves(const LevelGraph& g, std::mt19937_64& rng) {
    std::vector<std::uint32_t> community(g.n);
    std::iota(community.begin(), community.end(), 0);
    std::vector<double> tot(g.wdeg);  // per community sum of weighted degrees

    std::vector<std::uint32_t> order(g.n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);

    const double two_m = 2.0 * g.total;
    std::vector<double> link(g.n, 0.0);  // weight from current node to community
    std::vector<std::uint32_t> touched;

    bool any_move = false;
    bool moved_this_pass = true;
    // The strict-improvement rule makes every move raise Q, so this loop
    // terminates; the cap only defends against float-noise cycles.
    for (int pass = 0; moved_this_pass && pass < 1000; ++pass) {
        moved_this_pass = false;
        for (std::uint32_t v : order) {
            std::uint32_t old_c = community[v];

            touched.clear();
            link[old_c] = 0.0;
            touched.push_back(old_c);
            for (auto [u, w] : g.adj[v]) {
                std::uint32_t c = community[u];
                // weights are strictly positive, so link[c] == 0 means unseen
                if (link[c] == 0.0 && c != old_c) touched.push_back(c);
                link[c] += w;
            }

            tot[old_c] -= g.wdeg[v];  // evaluate gains with v removed

            // gain(c) = link[c] - wdeg[v] * tot[c] / 2m, constant terms dropped.
            double stay_gain = link[old_c] - g.wdeg[v] * tot[old_c] / two_m;
            double best_gain = stay_gain;
            std::uint32_t best_c = old_c;
            for (std::uint32_t c : touched) {
                if (c == old_c) continue;
                double gain = link[c] - g.wdeg[v] * tot[c] / two_m;
                if (gain > best_gain || (gain == best_gain && best_c != old_c && c < best_c)) {
                    // strict improvement over staying; ties between
                    // improving candidates go to the lowest id
                    best_gain = gain;
                    best_c = c;
                }
            }

            tot[best_c] += g.wdeg[v];
            for (std::uint32_t c : touched) link[c] = 0.0;
            if (best_c != old_c) {
                community[v] = best_c;
                moved_this_pass = true;
                any_move = true;
            }
        }
    }

    // Renumber to dense ids, ascending by old community id.
    std::vector<std::uint32_t> remap(g.n, UINT32_MAX);
    std::vector<std::uint32_t> present(community);
    std::sort(present.begin(), present.end());
    present.erase(std::unique(present.begin(), present.end()), present.end());
    for (std::uint32_t i = 0; i < present.size(); ++i) remap[present[i]] = i;
    LevelResult r;
    r.community.resize(g.n);
    for (std::uint32_t v = 0; v < g.n; ++v) r.community[v] = remap[community[v]];
    r.count = static_cast<std::uint32_t>(present.size());
    r.moved = any_move;
    return r;
}

LevelGraph aggregate_level(const LevelGraph& g, const LevelResult& lvl) {
    LevelGraph out;
    out.n = lvl.count;
    out.adj.assign(out.n, {});
    out.self_loop.assign(out.n, 0.0);
    out.wdeg.assign(out.n, 0.0);
    out.total = g.total;

    std::map<std::pair<std::uint32_t, std::uint32_t>, double> between;
    for (std::uint32_t v = 0; v < g.n; ++v) {
        std::uint32_t cv = lvl.community[v];
        out.self_loop[cv] += g.self_loop[v];
        for (auto [u, w] : g.adj[v]) {
            if (u < v) continue;  // each edge once
            std::uint32_t cu = lvl.community[u];
            if (cu == cv)
                out.self_loop[cv] += w;
            else
                between[std::minmax(cv, cu)] += w;
        }
    }
    for (auto& [pair, w] : between) {
        out.adj[pair.first].push_back({pair.second, w});
        out.adj[pair.second].push_back({pair.first, w});
    }
    for (auto& row : out.adj) std::sort(row.begin(), row.end());
    for (std::uint32_t v = 0; v < out.n; ++v) {
        double d = 2.0 * out.self_loop[v];
        for (auto [u, w] : out.adj[v]) {
            (void)u;
            d += w;
        }
        out.wdeg[v] = d;
    }
    return out;
}

}  // namespace

CommunityStructure louvain(const GlobalWeightedNetwork& g, std::uint64_t seed) {
    if (g.total_weight == 0) throw DataError("community detection needs at least one edge");

    LevelGraph level;
    level.n = g.n;
    level.adj.assign(g.n, {});
    level.self_loop.assign(g.n, 0.0);
    level.wdeg.assign(g.n, 0.0);
    level.total = static_cast<double>(g.total_weight);
    for (NodeId v = 0; v < g.n; ++v) {
        level.adj[v].reserve(g.adj[v].size());
        for (auto [u, w] : g.adj[v]) level.adj[v].push_back({u, static_cast<double>(w)});
        level.wdeg[v] = static_cast<double>(g.weighted_degree[v]);
    }

    std::mt19937_64 rng(seed);
    std::vector<std::uint32_t> node_to_comm(g.n);
    std::iota(node_to_comm.begin(), node_to_comm.end(), 0);

    while (true) {
        LevelResult lvl = local_moves(level, rng);
        if (!lvl.moved) break;
        for (auto& c : node_to_comm) c = lvl.community[c];
        if (lvl.count == level.n) break;  // nothing merged; a further level is identical
        level = aggregate_level(level, lvl);
    }

    // Dense re-index by decreasing size; equal sizes by lowest member id.
    std::uint32_t count = *std::max_element(node_to_comm.begin(), node_to_comm.end()) + 1;
    std::vector<std::uint32_t> size(count, 0);
    std::vector<NodeId> first_member(count, UINT32_MAX);
    for (NodeId v = 0; v < g.n; ++v) {
        ++size[node_to_comm[v]];
        first_member[node_to_comm[v]] = std::min(first_member[node_to_comm[v]], v);
    }
    std::vector<std::uint32_t> order(count);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (size[a] != size[b]) return size[a] > size[b];
        return first_member[a] < first_member[b];
    });
    std::vector<CommunityId> remap(count);
    for (std::uint32_t i = 0; i < count; ++i) remap[order[i]] = i;

    CommunityStructure c;
    c.assignment.resize(g.n);
    c.sizes.assign(count, 0);
    for (NodeId v = 0; v < g.n; ++v) {
        c.assignment[v] = remap[node_to_comm[v]];
        ++c.sizes[c.assignment[v]];
    }
    return c;
}

std::vector<CommunityId> filter_small(const CommunityStructure& c, std::uint32_t min_size) {
    std::vector<CommunityId> keep;
    for (CommunityId i = 0; i < c.community_count(); ++i)
        if (c.sizes[i] >= min_size) keep.push_back(i);
    return keep;
}

void save_communities_csv(const CommunityStructure& c, const std::vector<std::string>& labels,
                          const std::string& path) {
    if (labels.size() != c.assignment.size())
        throw DataError("label list and assignment disagree on node count");
    std::ofstream out(path);
    if (!out) throw DataError(path + ": cannot open for writing");
    out << "node,community\n";
    for (NodeId v = 0; v < labels.size(); ++v)
        out << labels[v] << ',' << c.assignment[v] << '\n';
    if (!out.flush()) throw DataError(path + ": write failed");
}

CommunityStructure load_communities_csv(const std::string& path,
                                        const std::vector<std::string>& labels) {
    std::ifstream in(path);
    if (!in) throw DataError(path + ": cannot open");
    CsvReader csv(in, path, {"node", "community"});

    std::vector<CommunityId> raw(labels.size());
    std::vector<bool> seen(labels.size(), false);
    while (auto row = csv.next()) {
        auto it = std::lower_bound(labels.begin(), labels.end(), row->fields[0]);
        if (it == labels.end() || *it != row->fields[0])
            csv.fail(row->line, "unknown node '" + row->fields[0] + "'");
        NodeId v = static_cast<NodeId>(it - labels.begin());
        if (seen[v]) csv.fail(row->line, "node '" + row->fields[0] + "' assigned twice");
        const std::string& text = row->fields[1];
        CommunityId c = 0;
        auto res = std::from_chars(text.data(), text.data() + text.size(), c);
        if (res.ec != std::errc() || res.ptr != text.data() + text.size())
            csv.fail(row->line, "bad community id '" + text + "'");
        raw[v] = c;
        seen[v] = true;
    }
    for (NodeId v = 0; v < labels.size(); ++v)
        if (!seen[v]) throw DataError(path + ": node '" + labels[v] + "' has no community");
    return CommunityStructure::from_assignment(std::move(raw));
}

}  // namespace comseq
