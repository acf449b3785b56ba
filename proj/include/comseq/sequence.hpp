#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "comseq/common.hpp"
#include "comseq/community.hpp"
#include "comseq/measures.hpp"
#include "comseq/network.hpp"

namespace comseq {

// An item is a (descriptor, bin) pair packed into one integer so itemsets
// stay flat and comparisons are cheap. Class items (community membership
// markers) occupy the top range and therefore sort after every descriptor
// item, which keeps them in the final position of canonical itemsets.
using ItemCode = std::uint32_t;

inline constexpr ItemCode kClassFlag = 0x80000000u;

constexpr ItemCode make_class_item(CommunityId c) { return kClassFlag | c; }
constexpr bool is_class_item(ItemCode code) { return (code & kClassFlag) != 0; }
constexpr CommunityId class_of_item(ItemCode code) { return code & ~kClassFlag; }

using Itemset = std::vector<ItemCode>;  // sorted, unique

struct Sequence {
    std::vector<Itemset> itemsets;

    std::size_t size() const { return itemsets.size(); }  // itemset count
    std::size_t item_count() const;
    bool operator==(const Sequence&) const = default;
};

// size first, then itemset-wise lexicographic. Used for every tie-break that
// needs a stable pattern order.
int canonical_compare(const Sequence& a, const Sequence& b);
bool canonical_less(const Sequence& a, const Sequence& b);

bool itemset_contains(const Itemset& big, const Itemset& small);
// Order-preserving embedding with itemset containment, greedy left-most.
bool is_subsequence(const Sequence& a, const Sequence& b);

enum class DescriptorKind { Measure, Attribute };

// How one measure or attribute turns into items: left-closed right-open bins
// between the breakpoints, with open bins below the first and above the last.
struct DescriptorSpec {
    std::string id;
    DescriptorKind kind = DescriptorKind::Attribute;
    std::vector<double> breakpoints;  // strictly increasing, at least one
    bool emit_zero = true;            // false: value 0 emits no item
    bool enabled = true;

    std::size_t bin_count() const { return breakpoints.size() + 1; }
    std::string bin_label(std::size_t bin) const;  // "<3", "3-10", ">=30"; unit
                                                   // integer bins collapse to "3"
    void validate() const;
};

// Absent values (nullopt) emit nothing; NaN is a data error.
std::optional<std::uint32_t> discretize(const DescriptorSpec& spec, std::optional<double> value);

// Bidirectional map between item codes and their text form "descriptor=label".
// Codes are ordered by (descriptor id, bin); both construction paths use that
// order, so canonical mining order does not depend on where the catalog came
// from.
class ItemCatalog {
public:
    static ItemCatalog from_specs(const std::vector<DescriptorSpec>& specs);  // enabled only
    // Rebuilds a catalog from item texts observed in dumped artifacts.
    static ItemCatalog from_observed(const std::vector<std::string>& texts);

    std::size_t descriptor_item_count() const { return rows_.size(); }
    std::string item_text(ItemCode code) const;
    std::string itemset_text(const Itemset& itemset) const;
    std::string sequence_text(const Sequence& seq) const;
    ItemCode code_for(std::string_view descriptor, std::uint32_t bin) const;
    ItemCode parse_item(std::string_view text) const;
    // Parses "(a=1,b=2)()(class=3)" style text.
    Sequence parse_sequence(std::string_view text) const;

private:
    struct Row {
        std::string descriptor;
        std::string label;
        std::uint32_t bin = 0;
    };
    std::vector<Row> rows_;  // code = index
    std::map<std::string, ItemCode, std::less<>> by_text_;
};

// One entry per node: theta per-slice itemsets (possibly empty placeholders)
// followed by a singleton class itemset when built from a partition.
struct SequenceDatabase {
    std::uint32_t theta = 0;
    std::vector<std::string> labels;  // node id = index
    std::vector<Sequence> sequences;

    std::uint32_t size() const { return static_cast<std::uint32_t>(sequences.size()); }
};

// Itemsets of all enabled descriptors for one node, one per slice, without
// the class itemset.
Sequence node_sequence(const DynamicNetwork& net, const MeasureTable& table, NodeId v,
                       const std::vector<DescriptorSpec>& specs, const ItemCatalog& catalog);

SequenceDatabase build_database(const DynamicNetwork& net, const MeasureTable& table,
                                const CommunityStructure& comm,
                                const std::vector<DescriptorSpec>& specs,
                                const ItemCatalog& catalog);

struct Scope {
    enum class Kind { Whole, Inside, Outside };
    Kind kind = Kind::Whole;
    CommunityId community = 0;

    static Scope whole() { return {}; }
    static Scope inside(CommunityId c) { return {Kind::Inside, c}; }
    static Scope outside(CommunityId c) { return {Kind::Outside, c}; }
};

struct SupportResult {
    std::vector<NodeId> supporters;  // ascending node ids within the scope
    std::uint32_t scope_size = 0;

    std::uint32_t count() const { return static_cast<std::uint32_t>(supporters.size()); }
    double ratio() const { return static_cast<double>(supporters.size()) / scope_size; }
};

// Fraction of scope entries whose sequences contain s. Scoped queries need
// the partition; an empty scope is an error.
SupportResult support(const SequenceDatabase& db, const Sequence& s, const Scope& scope = {},
                      const CommunityStructure* comm = nullptr);

// Line-oriented dump: node<TAB>(item,item)(item)...(class=c)
void dump_database(const SequenceDatabase& db, const ItemCatalog& catalog,
                   const std::string& path);

struct LoadedDatabase {
    SequenceDatabase db;
    ItemCatalog catalog;
    std::vector<CommunityId> classes;  // raw class ids per node
};
LoadedDatabase load_database(const std::string& path);

}  // namespace comseq
