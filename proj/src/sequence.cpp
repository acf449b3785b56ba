#include "comseq/sequence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <set>

namespace comseq {

std::size_t Sequence::item_count() const {
    std::size_t total = 0;
    for (const auto& s : itemsets) total += s.size();
    return total;
}

int canonical_compare(const Sequence& a, const Sequence& b) {
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const Itemset& x = a.itemsets[i];
        const Itemset& y = b.itemsets[i];
        if (x != y) return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end())
                               ? -1
                               : 1;
    }
    return 0;
}

bool canonical_less(const Sequence& a, const Sequence& b) { return canonical_compare(a, b) < 0; }

bool itemset_contains(const Itemset& big, const Itemset& small) {
    if (small.size() > big.size()) return false;
    std::size_t i = 0;
    for (ItemCode want : small) {
        while (i < big.size() && big[i] < want) ++i;
        if (i == big.size() || big[i] != want) return false;
        ++i;
    }
    return true;
}

bool is_subsequence(const Sequence& a, const Sequence& b) {
    std::size_t j = 0;
    for (const Itemset& itemset : a.itemsets) {
        while (j < b.size() && !itemset_contains(b.itemsets[j], itemset)) ++j;
        if (j == b.size()) return false;
        ++j;
    }
    return true;
}

namespace {

bool is_unit_integer_pair(double lo, double hi) {
    return lo == std::floor(lo) && hi == std::floor(hi) && hi == lo + 1.0;
}

}  // namespace

std::string DescriptorSpec::bin_label(std::size_t bin) const {
    if (bin == 0) return "<" + format_double(breakpoints.front());
    if (bin >= breakpoints.size()) return ">=" + format_double(breakpoints.back());
    double lo = breakpoints[bin - 1];
    double hi = breakpoints[bin];
    if (is_unit_integer_pair(lo, hi)) return format_double(lo);
    return format_double(lo) + "-" + format_double(hi);
}

void DescriptorSpec::validate() const {
    if (id.empty()) throw ConfigError("descriptor with empty id");
    if (id == "class") throw ConfigError("'class' is reserved and cannot name a descriptor");
    for (unsigned char c : id)
        if (c < 0x20 || c == ',' || c == '\t' || c == '=' || c == '(' || c == ')')
            throw ConfigError("descriptor id '" + id + "' contains a forbidden character");
    if (breakpoints.empty())
        throw ConfigError("descriptor '" + id + "' needs at least one breakpoint");
    for (double b : breakpoints)
        if (std::isnan(b) || std::isinf(b))
            throw ConfigError("descriptor '" + id + "' has a non-finite breakpoint");
    for (std::size_t i = 1; i < breakpoints.size(); ++i)
        if (breakpoints[i] <= breakpoints[i - 1])
            throw ConfigError("descriptor '" + id + "' breakpoints must be strictly increasing");
}

std::optional<std::uint32_t> discretize(const DescriptorSpec& spec, std::optional<double> value) {
    if (!value) return std::nullopt;
    if (std::isnan(*value)) throw DataError("descriptor '" + spec.id + "' got NaN");
    if (*value == 0.0 && !spec.emit_zero) return std::nullopt;
    auto it = std::upper_bound(spec.breakpoints.begin(), spec.breakpoints.end(), *value);
    return static_cast<std::uint32_t>(it - spec.breakpoints.begin());
}

ItemCatalog ItemCatalog::from_specs(const std::vector<DescriptorSpec>& specs) {
    std::vector<const DescriptorSpec*> enabled;
    for (const auto& s : specs) {
        s.validate();
        if (s.enabled) enabled.push_back(&s);
    }
    std::sort(enabled.begin(), enabled.end(),
              [](const DescriptorSpec* a, const DescriptorSpec* b) { return a->id < b->id; });
    for (std::size_t i = 1; i < enabled.size(); ++i)
        if (enabled[i]->id == enabled[i - 1]->id)
            throw ConfigError("duplicate descriptor id '" + enabled[i]->id + "'");

    ItemCatalog cat;
    for (const DescriptorSpec* spec : enabled)
        for (std::uint32_t bin = 0; bin < spec->bin_count(); ++bin)
            cat.rows_.push_back({spec->id, spec->bin_label(bin), bin});
    for (std::size_t code = 0; code < cat.rows_.size(); ++code)
        cat.by_text_[cat.rows_[code].descriptor + "=" + cat.rows_[code].label] =
            static_cast<ItemCode>(code);
    return cat;
}

namespace {

// Lower bound encoded by a bin label; used to put observed labels back into
// bin order without the original breakpoints.
double label_sort_key(const std::string& label, const std::string& text) {
    const char* start = label.c_str();
    if (label.rfind("<", 0) == 0)
        return -std::numeric_limits<double>::infinity();
    if (label.rfind(">=", 0) == 0)
        start += 2;
    char* end = nullptr;
    double v = std::strtod(start, &end);
    if (end == start) throw DataError("cannot order item '" + text + "' by its label");
    return v;
}

}  // namespace

ItemCatalog ItemCatalog::from_observed(const std::vector<std::string>& texts) {
    struct Observed {
        std::string descriptor, label;
        double key;
        bool ge;  // ">=x" sorts after "x-y" with the same lower bound
    };
    std::vector<Observed> seen;
    std::set<std::string> dedup;
    for (const auto& text : texts) {
        if (!dedup.insert(text).second) continue;
        std::size_t eq = text.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 >= text.size())
            throw DataError("malformed item text '" + text + "'");
        Observed o;
        o.descriptor = text.substr(0, eq);
        o.label = text.substr(eq + 1);
        if (o.descriptor == "class") continue;  // class items are virtual
        o.key = label_sort_key(o.label, text);
        o.ge = o.label.rfind(">=", 0) == 0;
        seen.push_back(std::move(o));
    }
    std::sort(seen.begin(), seen.end(), [](const Observed& a, const Observed& b) {
        if (a.descriptor != b.descriptor) return a.descriptor < b.descriptor;
        if (a.key != b.key) return a.key < b.key;
        return a.ge < b.ge;
    });

    ItemCatalog cat;
    for (auto& o : seen) cat.rows_.push_back({std::move(o.descriptor), std::move(o.label), 0});
    for (std::size_t code = 0; code < cat.rows_.size(); ++code) {
        auto& row = cat.rows_[code];
        row.bin = static_cast<std::uint32_t>(code);  // bins unknown; codes suffice
        cat.by_text_[row.descriptor + "=" + row.label] = static_cast<ItemCode>(code);
    }
    return cat;
}

std::string ItemCatalog::item_text(ItemCode code) const {
    if (is_class_item(code)) return "class=" + std::to_string(class_of_item(code));
    if (code >= rows_.size())
        throw std::out_of_range("item code " + std::to_string(code) + " not in catalog");
    return rows_[code].descriptor + "=" + rows_[code].label;
}

std::string ItemCatalog::itemset_text(const Itemset& itemset) const {
    std::string out = "(";
    for (std::size_t i = 0; i < itemset.size(); ++i) {
        if (i) out += ',';
        out += item_text(itemset[i]);
    }
    out += ')';
    return out;
}

std::string ItemCatalog::sequence_text(const Sequence& seq) const {
    std::string out;
    for (const auto& itemset : seq.itemsets) out += itemset_text(itemset);
    return out;
}

ItemCode ItemCatalog::code_for(std::string_view descriptor, std::uint32_t bin) const {
    for (std::size_t code = 0; code < rows_.size(); ++code)
        if (rows_[code].descriptor == descriptor && rows_[code].bin == bin)
            return static_cast<ItemCode>(code);
    throw std::out_of_range("no catalog entry for descriptor '" + std::string(descriptor) +
                            "' bin " + std::to_string(bin));
}

ItemCode ItemCatalog::parse_item(std::string_view text) const {
    if (text.rfind("class=", 0) == 0) {
        const char* start = text.data() + 6;
        char* end = nullptr;
        unsigned long id = std::strtoul(start, &end, 10);
        if (end != text.data() + text.size() || end == start)
            throw DataError("malformed class item '" + std::string(text) + "'");
        return make_class_item(static_cast<CommunityId>(id));
    }
    auto it = by_text_.find(text);
    if (it == by_text_.end()) throw DataError("unknown item '" + std::string(text) + "'");
    return it->second;
}

Sequence ItemCatalog::parse_sequence(std::string_view text) const {
    Sequence seq;
    std::size_t pos = 0;
    while (pos < text.size()) {
        if (text[pos] != '(')
            throw DataError("malformed sequence text near '" + std::string(text.substr(pos)) + "'");
        std::size_t close = text.find(')', pos);
        if (close == std::string_view::npos)
            throw DataError("unbalanced '(' in sequence text '" + std::string(text) + "'");
        std::string_view body = text.substr(pos + 1, close - pos - 1);
        Itemset itemset;
        if (!body.empty()) {
            std::size_t start = 0;
            while (true) {
                std::size_t comma = body.find(',', start);
                std::string_view item =
                    comma == std::string_view::npos ? body.substr(start)
                                                    : body.substr(start, comma - start);
                itemset.push_back(parse_item(item));
                if (comma == std::string_view::npos) break;
                start = comma + 1;
            }
            std::sort(itemset.begin(), itemset.end());
            if (std::adjacent_find(itemset.begin(), itemset.end()) != itemset.end())
                throw DataError("duplicate item inside itemset in '" + std::string(text) + "'");
        }
        seq.itemsets.push_back(std::move(itemset));
        pos = close + 1;
    }
    return seq;
}

namespace {

std::optional<double> measure_value(const MeasureTable& table, const std::string& id,
                                    std::uint32_t t, NodeId v) {
    if (id == "degree") return static_cast<double>(table.degree_at(t, v));
    if (id == "int_degree") return static_cast<double>(table.internal_degree_at(t, v));
    if (id == "transitivity") return table.transitivity_at(t, v);
    if (id == "z") return table.z_at(t, v);
    if (id == "participation") return table.participation_at(t, v);
    if (id == "embeddedness") return table.embeddedness_at(t, v);
    throw ConfigError("unknown measure descriptor '" + id + "'");
}

}  // namespace

Sequence node_sequence(const DynamicNetwork& net, const MeasureTable& table, NodeId v,
                       const std::vector<DescriptorSpec>& specs, const ItemCatalog& catalog) {
    Sequence seq;
    seq.itemsets.resize(table.theta);
    const auto& attr_names = net.attribute_names();
    for (std::uint32_t t = 1; t <= table.theta; ++t) {
        Itemset& itemset = seq.itemsets[t - 1];
        for (const auto& spec : specs) {
            if (!spec.enabled) continue;
            std::optional<double> value;
            if (spec.kind == DescriptorKind::Measure) {
                value = measure_value(table, spec.id, t, v);
            } else {
                auto it = std::lower_bound(attr_names.begin(), attr_names.end(), spec.id);
                if (it == attr_names.end() || *it != spec.id)
                    throw ConfigError("attribute descriptor '" + spec.id +
                                      "' not present in the network");
                double raw = net.attribute_raw(
                    static_cast<std::size_t>(it - attr_names.begin()), t, v);
                if (!std::isnan(raw)) value = raw;
            }
            auto bin = discretize(spec, value);
            if (bin) itemset.push_back(catalog.code_for(spec.id, *bin));
        }
        std::sort(itemset.begin(), itemset.end());
    }
    return seq;
}

SequenceDatabase build_database(const DynamicNetwork& net, const MeasureTable& table,
                                const CommunityStructure& comm,
                                const std::vector<DescriptorSpec>& specs,
                                const ItemCatalog& catalog) {
    if (net.node_count() != table.n || net.slice_count() != table.theta)
        throw DataError("measure table does not match the network");
    if (comm.assignment.size() != net.node_count())
        throw DataError("community assignment does not match the network");

    SequenceDatabase db;
    db.theta = net.slice_count();
    db.labels = net.node_labels();
    db.sequences.reserve(net.node_count());
    for (NodeId v = 0; v < net.node_count(); ++v) {
        Sequence seq = node_sequence(net, table, v, specs, catalog);
        seq.itemsets.push_back({make_class_item(comm.community_of(v))});
        db.sequences.push_back(std::move(seq));
    }
    return db;
}

SupportResult support(const SequenceDatabase& db, const Sequence& s, const Scope& scope,
                      const CommunityStructure* comm) {
    if (scope.kind != Scope::Kind::Whole && comm == nullptr)
        throw std::invalid_argument("scoped support needs a community structure");
    if (comm && comm->assignment.size() != db.sequences.size())
        throw DataError("community assignment does not match the sequence database");

    SupportResult res;
    for (NodeId v = 0; v < db.sequences.size(); ++v) {
        bool in_scope = true;
        if (scope.kind == Scope::Kind::Inside)
            in_scope = comm->community_of(v) == scope.community;
        else if (scope.kind == Scope::Kind::Outside)
            in_scope = comm->community_of(v) != scope.community;
        if (!in_scope) continue;
        ++res.scope_size;
        if (is_subsequence(s, db.sequences[v])) res.supporters.push_back(v);
    }
    if (res.scope_size == 0) throw DataError("support scope selects no entries");
    return res;
}

void dump_database(const SequenceDatabase& db, const ItemCatalog& catalog,
                   const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError(path + ": cannot open for writing");
    for (NodeId v = 0; v < db.sequences.size(); ++v)
        out << db.labels[v] << '\t' << catalog.sequence_text(db.sequences[v]) << '\n';
    if (!out.flush()) throw DataError(path + ": write failed");
}

LoadedDatabase load_database(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError(path + ": cannot open");

    struct RawEntry {
        std::string label, text;
        std::size_t line;
    };
    std::vector<RawEntry> raw;
    std::vector<std::string> item_texts;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::size_t tab = line.find('\t');
        if (tab == std::string::npos || tab == 0)
            throw DataError(path + ":" + std::to_string(line_no) + ": expected node<TAB>sequence");
        raw.push_back({line.substr(0, tab), line.substr(tab + 1), line_no});
        // collect item texts for the catalog
        const std::string& text = raw.back().text;
        std::size_t pos = 0;
        while ((pos = text.find('(', pos)) != std::string::npos) {
            std::size_t close = text.find(')', pos);
            if (close == std::string::npos) break;  // parse_sequence reports it properly
            std::string body = text.substr(pos + 1, close - pos - 1);
            std::size_t start = 0;
            while (start < body.size()) {
                std::size_t comma = body.find(',', start);
                std::string item = comma == std::string::npos ? body.substr(start)
                                                              : body.substr(start, comma - start);
                if (!item.empty()) item_texts.push_back(item);
                if (comma == std::string::npos) break;
                start = comma + 1;
            }
            pos = close + 1;
        }
    }
    if (raw.empty()) throw DataError(path + ": empty sequence database");

    LoadedDatabase out;
    out.catalog = ItemCatalog::from_observed(item_texts);

    std::sort(raw.begin(), raw.end(),
              [](const RawEntry& a, const RawEntry& b) { return a.label < b.label; });
    for (std::size_t i = 1; i < raw.size(); ++i)
        if (raw[i].label == raw[i - 1].label)
            throw DataError(path + ":" + std::to_string(raw[i].line) + ": duplicate node '" +
                            raw[i].label + "'");

    std::size_t length = 0;
    for (const auto& entry : raw) {
        Sequence seq = out.catalog.parse_sequence(entry.text);
        if (seq.size() < 2)
            throw DataError(path + ":" + std::to_string(entry.line) +
                            ": entry needs at least one slice itemset plus the class itemset");
        if (length == 0)
            length = seq.size();
        else if (seq.size() != length)
            throw DataError(path + ":" + std::to_string(entry.line) +
                            ": entries disagree on sequence length");
        const Itemset& last = seq.itemsets.back();
        if (last.size() != 1 || !is_class_item(last[0]))
            throw DataError(path + ":" + std::to_string(entry.line) +
                            ": entry must end with a singleton class itemset");
        for (std::size_t k = 0; k + 1 < seq.size(); ++k)
            for (ItemCode code : seq.itemsets[k])
                if (is_class_item(code))
                    throw DataError(path + ":" + std::to_string(entry.line) +
                                    ": class item before the final itemset");
        out.classes.push_back(class_of_item(last[0]));
        out.db.labels.push_back(entry.label);
        out.db.sequences.push_back(std::move(seq));
    }
    out.db.theta = static_cast<std::uint32_t>(length - 1);
    return out;
}

}  // namespace comseq
