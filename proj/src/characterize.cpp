#include "comseq/characterize.hpp"

#include <algorithm>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace comseq {

double RankedPattern::growth() const {
    if (out_count == 0) return std::numeric_limits<double>::infinity();
    return sup_in() / sup_out();
}

bool growth_greater(const RankedPattern& a, const RankedPattern& b) {
    bool a_inf = a.out_count == 0;
    bool b_inf = b.out_count == 0;
    if (a_inf || b_inf) {
        if (a_inf && b_inf) return a.in_count > b.in_count;
        return a_inf;
    }
    // scope sizes agree within one community, so they cancel out of the ratio
    return static_cast<std::uint64_t>(a.in_count) * b.out_count >
           static_cast<std::uint64_t>(b.in_count) * a.out_count;
}

std::vector<RankedPattern> growth_rate(const std::vector<MinedPattern>& patterns,
                                       const SequenceDatabase& db, const CommunityStructure& comm,
                                       CommunityId community) {
    if (community >= comm.community_count())
        throw std::out_of_range("community id " + std::to_string(community) + " out of range");
    if (comm.community_count() < 2)
        throw DataError("growth rates need at least two communities (the complement is empty)");

    std::vector<RankedPattern> out;
    out.reserve(patterns.size());
    for (std::size_t i = 0; i < patterns.size(); ++i) {
        const MinedPattern& p = patterns[i];
        if (!p.class_tag || *p.class_tag != community)
            throw DataError("pattern " + std::to_string(i) + " is not tagged with community " +
                            std::to_string(community));
        SupportResult in = support(db, p.sequence, Scope::inside(community), &comm);
        if (in.count() != p.support)
            throw DataError("pattern " + std::to_string(i) + ": mined support " +
                            std::to_string(p.support) + " but the database recount gives " +
                            std::to_string(in.count()) +
                            "; the pattern and database artifacts disagree");
        SupportResult outside = support(db, p.sequence, Scope::outside(community), &comm);
        out.push_back({p, in.count(), outside.count(), in.scope_size, outside.scope_size,
                       std::move(in.supporters)});
    }
    return out;
}

std::size_t most_supported_index(const std::vector<RankedPattern>& ranked) {
    if (ranked.empty()) throw std::invalid_argument("no patterns to pick the most supported from");
    std::size_t best = 0;
    for (std::size_t i = 1; i < ranked.size(); ++i) {
        const Sequence& cur = ranked[i].pattern.sequence;
        const Sequence& top = ranked[best].pattern.sequence;
        if (ranked[i].in_count != ranked[best].in_count) {
            if (ranked[i].in_count > ranked[best].in_count) best = i;
        } else if (cur.size() != top.size()) {
            if (cur.size() > top.size()) best = i;
        } else if (canonical_less(cur, top)) {
            best = i;
        }
    }
    return best;
}

namespace {

struct Overlap {
    std::uint64_t common = 0;  // |S & K|
    std::uint64_t joint = 0;   // |S | K|
    std::uint64_t added = 0;   // |S \ K|
};

Overlap overlap(const std::vector<NodeId>& s, const std::vector<NodeId>& k) {
    Overlap o;
    std::size_t i = 0, j = 0;
    while (i < s.size() && j < k.size()) {
        if (s[i] == k[j]) ++o.common, ++i, ++j;
        else if (s[i] < k[j]) ++i;
        else ++j;
    }
    o.joint = s.size() + k.size() - o.common;
    o.added = s.size() - o.common;
    return o;
}

// Jaccard distance 1 - common/joint compared exactly: larger distance means
// a smaller common/joint ratio.
bool more_distant(const Overlap& a, const Overlap& b) {
    return a.common * b.joint < b.common * a.joint;
}
bool equally_distant(const Overlap& a, const Overlap& b) {
    return a.common * b.joint == b.common * a.joint;
}

bool seed_better(const RankedPattern& a, const RankedPattern& b) {
    if (growth_greater(a, b)) return true;
    if (growth_greater(b, a)) return false;
    if (a.in_count != b.in_count) return a.in_count > b.in_count;
    return canonical_less(a.pattern.sequence, b.pattern.sequence);
}

std::vector<NodeId> sorted_union(const std::vector<NodeId>& a, const std::vector<NodeId>& b) {
    std::vector<NodeId> out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

}  // namespace

std::vector<std::size_t> select_representatives(const std::vector<RankedPattern>& ranked,
                                                const std::vector<NodeId>& members,
                                                std::size_t max_patterns) {
    std::vector<std::size_t> emerging;
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        const RankedPattern& r = ranked[i];
        // growth > 1, exactly: in_count/in_scope > out_count/out_scope
        if (static_cast<std::uint64_t>(r.in_count) * r.out_scope >
            static_cast<std::uint64_t>(r.out_count) * r.in_scope)
            emerging.push_back(i);
    }
    if (emerging.empty()) return {};

    std::size_t seed = emerging[0];
    for (std::size_t idx : emerging)
        if (idx != seed && seed_better(ranked[idx], ranked[seed])) seed = idx;

    std::vector<std::size_t> chosen{seed};
    std::vector<NodeId> covered = ranked[seed].supporters_in;
    std::vector<char> used(ranked.size(), 0);
    used[seed] = 1;

    while (chosen.size() < max_patterns && covered.size() < members.size()) {
        std::size_t best = ranked.size();
        Overlap best_o;
        for (std::size_t idx : emerging) {
            if (used[idx]) continue;
            Overlap o = overlap(ranked[idx].supporters_in, covered);
            if (o.added == 0) continue;
            bool better;
            if (best == ranked.size()) {
                better = true;
            } else if (!equally_distant(o, best_o)) {
                better = more_distant(o, best_o);
            } else if (growth_greater(ranked[idx], ranked[best])) {
                better = true;
            } else if (growth_greater(ranked[best], ranked[idx])) {
                better = false;
            } else if (ranked[idx].in_count != ranked[best].in_count) {
                better = ranked[idx].in_count > ranked[best].in_count;
            } else {
                better = canonical_less(ranked[idx].pattern.sequence, ranked[best].pattern.sequence);
            }
            if (better) {
                best = idx;
                best_o = o;
            }
        }
        if (best == ranked.size()) break;
        used[best] = 1;
        chosen.push_back(best);
        covered = sorted_union(covered, ranked[best].supporters_in);
    }
    return chosen;
}

std::vector<NodeId> coverage_union(const std::vector<RankedPattern>& ranked,
                                   const std::vector<std::size_t>& chosen) {
    std::vector<NodeId> covered;
    for (std::size_t idx : chosen) covered = sorted_union(covered, ranked.at(idx).supporters_in);
    return covered;
}

std::vector<NodeId> detect_anomalies(const std::vector<NodeId>& members,
                                     const std::vector<NodeId>& covered) {
    std::vector<NodeId> out;
    std::set_difference(members.begin(), members.end(), covered.begin(), covered.end(),
                        std::back_inserter(out));
    return out;
}

CommunityReport build_report(CommunityId community, const std::vector<NodeId>& members,
                             const std::vector<RankedPattern>& ranked,
                             std::size_t max_patterns) {
    CommunityReport rep;
    rep.community = community;
    rep.size = static_cast<std::uint32_t>(members.size());
    rep.characterized = !ranked.empty();
    if (!ranked.empty()) {
        if (ranked.front().in_scope != members.size())
            throw DataError("ranked patterns and the member list disagree on community size");
        rep.most_supported = ranked[most_supported_index(ranked)];
        std::vector<std::size_t> chosen = select_representatives(ranked, members, max_patterns);
        if (!chosen.empty()) {
            rep.most_emerging = ranked[chosen[0]];
            for (std::size_t i = 1; i < chosen.size(); ++i)
                rep.supplementary.push_back(ranked[chosen[i]]);
        }
        rep.coverage = coverage_union(ranked, chosen);
    }
    rep.anomalies = detect_anomalies(members, rep.coverage);
    rep.anomalies_most_supported = detect_anomalies(
        members, rep.most_supported ? rep.most_supported->supporters_in : std::vector<NodeId>{});
    return rep;
}

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json label_array(const std::vector<NodeId>& nodes, const std::vector<std::string>& labels) {
    ordered_json arr = ordered_json::array();
    for (NodeId v : nodes) arr.push_back(labels.at(v));
    return arr;
}

ordered_json pattern_json(const RankedPattern& r, const ItemCatalog& catalog,
                          const std::vector<std::string>& labels) {
    ordered_json j;
    j["sequence"] = catalog.sequence_text(r.pattern.sequence);
    j["sup_in"] = {{"count", r.in_count}, {"scope", r.in_scope}, {"ratio", format_double(r.sup_in())}};
    j["sup_out"] = {
        {"count", r.out_count}, {"scope", r.out_scope}, {"ratio", format_double(r.sup_out())}};
    j["growth"] = format_double(r.growth());
    j["supporters"] = label_array(r.supporters_in, labels);
    return j;
}

void pattern_text(std::ostringstream& out, const RankedPattern& r, const ItemCatalog& catalog,
                  const std::vector<std::string>& labels) {
    out << "    " << catalog.sequence_text(r.pattern.sequence) << "\n";
    out << "    sup_in " << r.in_count << "/" << r.in_scope << " = " << format_double(r.sup_in())
        << ", sup_out " << r.out_count << "/" << r.out_scope << " = " << format_double(r.sup_out())
        << ", growth " << format_double(r.growth()) << "\n";
    out << "    supporters:";
    for (NodeId v : r.supporters_in) out << " " << labels.at(v);
    out << "\n";
}

void node_list_text(std::ostringstream& out, const std::vector<NodeId>& nodes,
                    const std::vector<std::string>& labels) {
    if (nodes.empty()) {
        out << " none";
    } else {
        for (NodeId v : nodes) out << " " << labels.at(v);
    }
    out << "\n";
}

}  // namespace

std::string report_json(const CommunityReport& report, const ItemCatalog& catalog,
                        const std::vector<std::string>& labels) {
    ordered_json j;
    j["community"] = report.community;
    j["size"] = report.size;
    j["characterized"] = report.characterized;
    j["most_supported"] = report.most_supported
                              ? pattern_json(*report.most_supported, catalog, labels)
                              : ordered_json(nullptr);
    j["most_emerging"] = report.most_emerging
                             ? pattern_json(*report.most_emerging, catalog, labels)
                             : ordered_json(nullptr);
    ordered_json extra = ordered_json::array();
    for (const RankedPattern& r : report.supplementary)
        extra.push_back(pattern_json(r, catalog, labels));
    j["supplementary"] = std::move(extra);
    double fraction = report.size == 0 ? 0.0
                                       : static_cast<double>(report.coverage.size()) / report.size;
    j["coverage"] = {{"count", report.coverage.size()},
                     {"fraction", format_double(fraction)},
                     {"nodes", label_array(report.coverage, labels)}};
    j["anomalies"] = label_array(report.anomalies, labels);
    j["anomalies_most_supported"] = label_array(report.anomalies_most_supported, labels);
    return j.dump(2) + "\n";
}

std::string report_text(const CommunityReport& report, const ItemCatalog& catalog,
                        const std::vector<std::string>& labels) {
    std::ostringstream out;
    out << "community " << report.community << ": " << report.size << " nodes\n";
    if (!report.characterized) {
        out << "  no patterns for this community at this minimum support\n";
        return out.str();
    }
    out << "  most supported:\n";
    pattern_text(out, *report.most_supported, catalog, labels);
    if (report.most_emerging) {
        out << "  most emerging:\n";
        pattern_text(out, *report.most_emerging, catalog, labels);
    } else {
        out << "  most emerging: none (no pattern with growth > 1)\n";
    }
    for (std::size_t i = 0; i < report.supplementary.size(); ++i) {
        out << "  supplementary " << (i + 1) << ":\n";
        pattern_text(out, report.supplementary[i], catalog, labels);
    }
    out << "  coverage: " << report.coverage.size() << "/" << report.size << " nodes\n";
    out << "  anomalies:";
    node_list_text(out, report.anomalies, labels);
    out << "  anomalies vs most supported:";
    node_list_text(out, report.anomalies_most_supported, labels);
    return out.str();
}

}  // namespace comseq
