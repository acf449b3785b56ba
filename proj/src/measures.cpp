#include "comseq/measures.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>

#include "comseq/csv.hpp"

namespace comseq {

namespace {

std::size_t sorted_intersection_size(std::span<const NodeId> a, std::span<const NodeId> b) {
    std::size_t count = 0, i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] < b[j])
            ++i;
        else if (b[j] < a[i])
            ++j;
        else {
            ++count;
            ++i;
            ++j;
        }
    }
    return count;
}

}  // namespace

std::uint32_t internal_degree(const DynamicNetwork& net, std::uint32_t t, NodeId v,
                              const CommunityStructure& comm) {
    CommunityId c = comm.community_of(v);
    std::uint32_t count = 0;
    for (NodeId u : net.neighborhood(t, v))
        if (comm.community_of(u) == c) ++count;
    return count;
}

double local_transitivity(const DynamicNetwork& net, std::uint32_t t, NodeId v) {
    auto nbrs = net.neighborhood(t, v);
    std::size_t d = nbrs.size();
    if (d < 2) return 0.0;
    // Each edge between two neighbours shows up in both endpoints' rows.
    std::size_t links_twice = 0;
    for (NodeId u : nbrs) links_twice += sorted_intersection_size(nbrs, net.neighborhood(t, u));
    double pairs = static_cast<double>(d) * static_cast<double>(d - 1) / 2.0;
    return static_cast<double>(links_twice) / 2.0 / pairs;
}

std::vector<std::pair<CommunityId, std::uint32_t>> community_degrees(
    const DynamicNetwork& net, std::uint32_t t, NodeId v, const CommunityStructure& comm) {
    std::vector<std::pair<CommunityId, std::uint32_t>> counts;
    for (NodeId u : net.neighborhood(t, v)) {
        CommunityId c = comm.community_of(u);
        auto it = std::lower_bound(counts.begin(), counts.end(), c,
                                   [](const auto& p, CommunityId x) { return p.first < x; });
        if (it != counts.end() && it->first == c)
            ++it->second;
        else
            counts.insert(it, {c, 1});
    }
    return counts;
}

double participation_coefficient(const DynamicNetwork& net, std::uint32_t t, NodeId v,
                                 const CommunityStructure& comm) {
    auto counts = community_degrees(net, t, v, comm);
    std::uint32_t d = 0;
    for (auto& [c, k] : counts) d += k;
    if (d == 0) return 0.0;
    double sum = 0.0;
    for (auto& [c, k] : counts) {
        double frac = static_cast<double>(k) / static_cast<double>(d);
        sum += frac * frac;
    }
    return 1.0 - sum;
}

double within_module_degree(const MeasureTable& table, std::uint32_t t, NodeId v,
                            const CommunityStructure& comm) {
    CommunityId c = comm.community_of(v);
    double sum = 0.0, sum_sq = 0.0;
    std::uint32_t count = 0;
    for (NodeId u = 0; u < table.n; ++u) {
        if (comm.community_of(u) != c) continue;
        double k = table.internal_degree_at(t, u);
        sum += k;
        sum_sq += k * k;
        ++count;
    }
    double mean = sum / count;
    double variance = sum_sq / count - mean * mean;
    double sigma = variance > 0.0 ? std::sqrt(variance) : 0.0;
    if (sigma == 0.0) return 0.0;
    return (static_cast<double>(table.internal_degree_at(t, v)) - mean) / sigma;
}

double embeddedness(const MeasureTable& table, std::uint32_t t, NodeId v) {
    std::uint32_t d = table.degree_at(t, v);
    if (d == 0) return 0.0;
    return static_cast<double>(table.internal_degree_at(t, v)) / static_cast<double>(d);
}

bool is_hub(const MeasureTable& table, std::uint32_t t, NodeId v) {
    return table.z_at(t, v) >= 2.5;
}

MeasureTable compute_measures(const DynamicNetwork& net, const CommunityStructure& comm,
                              unsigned threads) {
    if (comm.assignment.size() != net.node_count())
        throw DataError("community assignment covers " + std::to_string(comm.assignment.size()) +
                        " nodes, network has " + std::to_string(net.node_count()));

    MeasureTable table;
    table.n = net.node_count();
    table.theta = net.slice_count();
    std::size_t cells = static_cast<std::size_t>(table.n) * table.theta;
    table.degree.assign(cells, 0);
    table.internal_degree.assign(cells, 0);
    table.transitivity.assign(cells, 0.0);
    table.z.assign(cells, 0.0);
    table.participation.assign(cells, 0.0);
    table.embeddedness.assign(cells, 0.0);

    auto member_lists = comm.members();

    // Slices are independent, so they make the natural parallel unit.
    parallel_chunks(table.theta, threads, [&](std::size_t t_begin, std::size_t t_end) {
        for (std::size_t ti = t_begin; ti < t_end; ++ti) {
            std::uint32_t t = static_cast<std::uint32_t>(ti) + 1;
            for (NodeId v = 0; v < table.n; ++v) {
                std::size_t i = table.idx(t, v);
                table.degree[i] = net.degree(t, v);
                table.internal_degree[i] = internal_degree(net, t, v, comm);
                table.transitivity[i] = local_transitivity(net, t, v);
                table.participation[i] = participation_coefficient(net, t, v, comm);
                table.embeddedness[i] =
                    table.degree[i] == 0
                        ? 0.0
                        : static_cast<double>(table.internal_degree[i]) / table.degree[i];
            }
            // z needs community-wide internal-degree statistics at this slice.
            for (const auto& members : member_lists) {
                double sum = 0.0, sum_sq = 0.0;
                for (NodeId u : members) {
                    double k = table.internal_degree[table.idx(t, u)];
                    sum += k;
                    sum_sq += k * k;
                }
                double mean = sum / static_cast<double>(members.size());
                double variance = sum_sq / static_cast<double>(members.size()) - mean * mean;
                double sigma = variance > 0.0 ? std::sqrt(variance) : 0.0;
                for (NodeId u : members) {
                    std::size_t i = table.idx(t, u);
                    table.z[i] = sigma == 0.0 ? 0.0 : (table.internal_degree[i] - mean) / sigma;
                }
            }
        }
    });

    return table;
}

void save_measures_csv(const MeasureTable& table, const std::vector<std::string>& labels,
                       const std::string& path) {
    if (labels.size() != table.n) throw DataError("label list does not match measure table");
    std::ofstream out(path);
    if (!out) throw DataError(path + ": cannot open for writing");
    out << "t,node,degree,int_degree,transitivity,z,participation,embeddedness\n";
    for (std::uint32_t t = 1; t <= table.theta; ++t)
        for (NodeId v = 0; v < table.n; ++v) {
            std::size_t i = table.idx(t, v);
            out << t << ',' << labels[v] << ',' << table.degree[i] << ','
                << table.internal_degree[i] << ',' << format_double(table.transitivity[i]) << ','
                << format_double(table.z[i]) << ',' << format_double(table.participation[i])
                << ',' << format_double(table.embeddedness[i]) << '\n';
        }
    if (!out.flush()) throw DataError(path + ": write failed");
}

MeasuresFile load_measures_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError(path + ": cannot open");
    CsvReader csv(in, path,
                  {"t", "node", "degree", "int_degree", "transitivity", "z", "participation",
                   "embeddedness"});

    struct Cell {
        std::uint32_t t;
        std::string node;
        std::uint32_t degree, internal_degree;
        double transitivity, z, participation, embeddedness;
        std::size_t line;
    };
    std::vector<Cell> cells;
    std::set<std::string> label_set;
    std::uint32_t theta = 0;

    auto parse_u32 = [&](const std::string& s, std::size_t line) {
        std::uint32_t v = 0;
        auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size())
            csv.fail(line, "bad integer '" + s + "'");
        return v;
    };
    auto parse_f = [&](const std::string& s, std::size_t line) {
        char* end = nullptr;
        double v = std::strtod(s.c_str(), &end);
        if (s.empty() || end != s.c_str() + s.size() || std::isnan(v))
            csv.fail(line, "bad number '" + s + "'");
        return v;
    };

    while (auto row = csv.next()) {
        Cell c;
        c.t = parse_u32(row->fields[0], row->line);
        if (c.t == 0) csv.fail(row->line, "slice indexes are 1-based");
        c.node = row->fields[1];
        c.degree = parse_u32(row->fields[2], row->line);
        c.internal_degree = parse_u32(row->fields[3], row->line);
        c.transitivity = parse_f(row->fields[4], row->line);
        c.z = parse_f(row->fields[5], row->line);
        c.participation = parse_f(row->fields[6], row->line);
        c.embeddedness = parse_f(row->fields[7], row->line);
        c.line = row->line;
        theta = std::max(theta, c.t);
        label_set.insert(c.node);
        cells.push_back(std::move(c));
    }
    if (cells.empty()) throw DataError(path + ": no measure rows");

    MeasuresFile file;
    file.labels.assign(label_set.begin(), label_set.end());
    file.table.n = static_cast<std::uint32_t>(file.labels.size());
    file.table.theta = theta;
    std::size_t total = static_cast<std::size_t>(file.table.n) * theta;
    file.table.degree.assign(total, 0);
    file.table.internal_degree.assign(total, 0);
    file.table.transitivity.assign(total, 0.0);
    file.table.z.assign(total, 0.0);
    file.table.participation.assign(total, 0.0);
    file.table.embeddedness.assign(total, 0.0);

    std::vector<bool> seen(total, false);
    for (const auto& c : cells) {
        auto it = std::lower_bound(file.labels.begin(), file.labels.end(), c.node);
        NodeId v = static_cast<NodeId>(it - file.labels.begin());
        std::size_t i = file.table.idx(c.t, v);
        if (seen[i])
            throw DataError(path + ":" + std::to_string(c.line) + ": duplicate row for (" +
                            std::to_string(c.t) + "," + c.node + ")");
        seen[i] = true;
        file.table.degree[i] = c.degree;
        file.table.internal_degree[i] = c.internal_degree;
        file.table.transitivity[i] = c.transitivity;
        file.table.z[i] = c.z;
        file.table.participation[i] = c.participation;
        file.table.embeddedness[i] = c.embeddedness;
    }
    for (std::size_t i = 0; i < total; ++i)
        if (!seen[i]) throw DataError(path + ": missing rows, the (slice,node) grid is incomplete");

    return file;
}

}  // namespace comseq
