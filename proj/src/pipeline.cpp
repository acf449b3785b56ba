#include "comseq/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "comseq/characterize.hpp"
#include "comseq/community.hpp"
#include "comseq/measures.hpp"
#include "comseq/miner.hpp"
#include "comseq/network.hpp"

namespace fs = std::filesystem;

namespace comseq {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) return "";
    std::size_t e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
}

bool parse_double_field(const std::string& text, double& out) {
    auto res = std::from_chars(text.data(), text.data() + text.size(), out);
    return res.ec == std::errc() && res.ptr == text.data() + text.size();
}

template <typename T>
bool parse_uint_field(const std::string& text, T& out) {
    auto res = std::from_chars(text.data(), text.data() + text.size(), out);
    return res.ec == std::errc() && res.ptr == text.data() + text.size();
}

void check_descriptor_id(const std::string& id, std::vector<std::string>& errors) {
    if (id.empty()) {
        errors.push_back("descriptor override with an empty id");
        return;
    }
    if (id == "class") {
        errors.push_back("descriptor id 'class' is reserved");
        return;
    }
    for (unsigned char c : id)
        if (c < 0x20 || c == ',' || c == '\t' || c == '=' || c == '(' || c == ')') {
            errors.push_back("descriptor id '" + id + "' contains a forbidden character");
            return;
        }
}

void collect_semantic_errors(const PipelineConfig& cfg, std::vector<std::string>& errors) {
    if (!(cfg.min_sup > 0.0) || cfg.min_sup > 1.0)
        errors.push_back("min_sup must be in (0, 1], got " + format_double(cfg.min_sup));
    if (cfg.min_community_size < 1) errors.push_back("min_community_size must be at least 1");
    if (cfg.max_patterns < 1) errors.push_back("max_patterns must be at least 1");
    if (cfg.max_candidates < 1) errors.push_back("max_candidates must be at least 1");
    if (cfg.threads < 1) errors.push_back("threads must be at least 1");
    if (cfg.out_dir.empty()) errors.push_back("out directory must not be empty");
    for (const std::string* p : {&cfg.edges_path, &cfg.attrs_path}) {
        if (p->empty()) continue;
        std::ifstream probe(*p);
        if (!probe) errors.push_back(*p + ": not readable");
    }
    for (const auto& [id, ov] : cfg.overrides) {
        check_descriptor_id(id, errors);
        if (!ov.breakpoints) continue;
        const std::vector<double>& bp = *ov.breakpoints;
        if (bp.empty()) {
            errors.push_back("descriptor '" + id + "': breakpoints must not be empty");
            continue;
        }
        for (double b : bp)
            if (!std::isfinite(b)) {
                errors.push_back("descriptor '" + id + "': breakpoints must be finite");
                break;
            }
        for (std::size_t i = 1; i < bp.size(); ++i)
            if (!(bp[i - 1] < bp[i])) {
                errors.push_back("descriptor '" + id + "': breakpoints must be strictly increasing");
                break;
            }
    }
}

[[noreturn]] void throw_errors(const std::vector<std::string>& errors) {
    std::string joined;
    for (const std::string& e : errors) {
        if (!joined.empty()) joined += '\n';
        joined += e;
    }
    throw ConfigError(joined);
}

}  // namespace

PipelineConfig parse_config(const std::string& text, const std::string& source) {
    PipelineConfig cfg;
    std::vector<std::string> errors;
    std::set<std::string> seen;

    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        std::string where = source + ":" + std::to_string(line_no);

        std::size_t eq = stripped.find('=');
        if (eq == std::string::npos) {
            errors.push_back(where + ": expected 'key = value'");
            continue;
        }
        std::string key = trim(stripped.substr(0, eq));
        std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) {
            errors.push_back(where + ": empty key");
            continue;
        }
        if (!seen.insert(key).second) {
            errors.push_back(where + ": duplicate key '" + key + "'");
            continue;
        }

        auto bad = [&](const char* what) {
            errors.push_back(where + ": " + what + " for '" + key + "', got '" + value + "'");
        };
        if (key == "edges") {
            cfg.edges_path = value;
        } else if (key == "attrs") {
            cfg.attrs_path = value;
        } else if (key == "out") {
            cfg.out_dir = value;
        } else if (key == "min_sup") {
            if (!parse_double_field(value, cfg.min_sup)) bad("expected a number");
        } else if (key == "min_community_size") {
            if (!parse_uint_field(value, cfg.min_community_size)) bad("expected a count");
        } else if (key == "seed") {
            if (!parse_uint_field(value, cfg.seed)) bad("expected an integer");
        } else if (key == "max_patterns") {
            if (!parse_uint_field(value, cfg.max_patterns)) bad("expected a count");
        } else if (key == "max_candidates") {
            if (!parse_uint_field(value, cfg.max_candidates)) bad("expected a count");
        } else if (key == "threads") {
            if (!parse_uint_field(value, cfg.threads)) bad("expected a count");
        } else if (key.rfind("descriptor.", 0) == 0) {
            std::string rest = key.substr(11);
            std::size_t dot = rest.rfind('.');
            std::string field = dot == std::string::npos ? "" : rest.substr(dot + 1);
            if (field != "breakpoints" && field != "emit_zero" && field != "enabled") {
                errors.push_back(where + ": unknown descriptor setting '" + key +
                                 "' (want descriptor.<id>.breakpoints|emit_zero|enabled)");
                continue;
            }
            std::string id = rest.substr(0, dot);
            PipelineConfig::DescriptorOverride& ov = cfg.overrides[id];
            if (field == "breakpoints") {
                std::vector<double> bp;
                bool ok = !value.empty();
                std::size_t pos = 0;
                while (ok && pos <= value.size()) {
                    std::size_t comma = value.find(',', pos);
                    std::string part = trim(value.substr(
                        pos, comma == std::string::npos ? std::string::npos : comma - pos));
                    double b;
                    if (!parse_double_field(part, b)) {
                        ok = false;
                        break;
                    }
                    bp.push_back(b);
                    if (comma == std::string::npos) break;
                    pos = comma + 1;
                }
                if (!ok) bad("expected comma-separated numbers");
                else ov.breakpoints = std::move(bp);
            } else {
                bool flag;
                if (value == "true") flag = true;
                else if (value == "false") flag = false;
                else {
                    bad("expected true or false");
                    continue;
                }
                if (field == "emit_zero") ov.emit_zero = flag;
                else ov.enabled = flag;
            }
        } else {
            errors.push_back(where + ": unknown key '" + key + "'");
        }
    }

    collect_semantic_errors(cfg, errors);
    if (!errors.empty()) throw_errors(errors);
    return cfg;
}

PipelineConfig validate_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path);
}

std::string serialize_config(const PipelineConfig& cfg) {
    std::ostringstream out;
    out << "edges = " << cfg.edges_path << "\n";
    out << "attrs = " << cfg.attrs_path << "\n";
    out << "out = " << cfg.out_dir << "\n";
    out << "min_sup = " << format_double(cfg.min_sup) << "\n";
    out << "min_community_size = " << cfg.min_community_size << "\n";
    out << "seed = " << cfg.seed << "\n";
    out << "max_patterns = " << cfg.max_patterns << "\n";
    out << "max_candidates = " << cfg.max_candidates << "\n";
    out << "threads = " << cfg.threads << "\n";
    for (const auto& [id, ov] : cfg.overrides) {
        if (ov.breakpoints) {
            out << "descriptor." << id << ".breakpoints = ";
            for (std::size_t i = 0; i < ov.breakpoints->size(); ++i) {
                if (i) out << ",";
                out << format_double((*ov.breakpoints)[i]);
            }
            out << "\n";
        }
        if (ov.emit_zero)
            out << "descriptor." << id << ".emit_zero = " << (*ov.emit_zero ? "true" : "false")
                << "\n";
        if (ov.enabled)
            out << "descriptor." << id << ".enabled = " << (*ov.enabled ? "true" : "false") << "\n";
    }
    return out.str();
}

void check_config(const PipelineConfig& cfg) {
    std::vector<std::string> errors;
    collect_semantic_errors(cfg, errors);
    if (!errors.empty()) throw_errors(errors);
}

std::vector<DescriptorSpec> resolve_descriptors(const PipelineConfig& cfg,
                                                const std::vector<std::string>& attr_names) {
    std::vector<DescriptorSpec> specs;
    auto measure = [&](const char* id, std::vector<double> bp, bool enabled) {
        specs.push_back({id, DescriptorKind::Measure, std::move(bp), true, enabled});
    };
    measure("degree", {3, 10, 30}, true);
    measure("int_degree", {3, 10, 30}, false);
    measure("transitivity", {0.35, 0.5, 0.7}, true);
    measure("z", {2.5}, true);
    measure("participation", {0.05, 0.6, 0.8}, true);
    measure("embeddedness", {0.3, 0.7}, true);
    std::size_t measure_count = specs.size();

    for (const std::string& name : attr_names) {
        for (std::size_t i = 0; i < measure_count; ++i)
            if (specs[i].id == name)
                throw ConfigError("attribute '" + name +
                                  "' collides with a built-in measure descriptor; rename the "
                                  "attribute in the input");
        specs.push_back({name, DescriptorKind::Attribute, {1, 2, 3, 4, 5}, false, true});
    }

    for (const auto& [id, ov] : cfg.overrides) {
        auto it = std::find_if(specs.begin(), specs.end(),
                               [&](const DescriptorSpec& s) { return s.id == id; });
        if (it == specs.end())
            throw ConfigError("descriptor override '" + id +
                              "' matches no measure and no attribute of the input");
        if (ov.breakpoints) it->breakpoints = *ov.breakpoints;
        if (ov.emit_zero) it->emit_zero = *ov.emit_zero;
        if (ov.enabled) it->enabled = *ov.enabled;
    }

    for (const DescriptorSpec& s : specs)
        if (s.enabled) s.validate();
    return specs;
}

StagePaths stage_paths(const std::string& out_dir) {
    fs::path base(out_dir);
    StagePaths p;
    p.communities = (base / "communities.csv").string();
    p.measures = (base / "measures.csv").string();
    p.database = (base / "sequences.txt").string();
    p.patterns = (base / "patterns.txt").string();
    p.reports_dir = (base / "reports").string();
    p.manifest = (base / "manifest.json").string();
    return p;
}

StageGuard::~StageGuard() {
    if (!armed_) return;
    for (const std::string& path : outputs_) {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
}

namespace {

DynamicNetwork load_input_network(const PipelineConfig& cfg, const WarningSink& warn) {
    if (cfg.edges_path.empty() || cfg.attrs_path.empty())
        throw ConfigError("this stage needs both an edges file and an attributes file");
    return load_network(cfg.edges_path, cfg.attrs_path, warn);
}

void require_artifact(const std::string& path, const char* producer) {
    if (!fs::exists(path))
        throw DataError(path + ": not found; run the " + std::string(producer) + " stage first");
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw DataError(path + ": cannot open for writing");
    out << content;
    if (!out.flush()) throw DataError(path + ": write failed");
}

}  // namespace

void stage_communities(const PipelineConfig& cfg, const WarningSink& warn) {
    StagePaths paths = stage_paths(cfg.out_dir);
    fs::create_directories(cfg.out_dir);
    DynamicNetwork net = load_input_network(cfg, warn);
    CommunityStructure comm = louvain(aggregate(net), cfg.seed);
    StageGuard guard({paths.communities});
    save_communities_csv(comm, net.node_labels(), paths.communities);
    guard.done();
}

void stage_measures(const PipelineConfig& cfg, const WarningSink& warn) {
    StagePaths paths = stage_paths(cfg.out_dir);
    fs::create_directories(cfg.out_dir);
    DynamicNetwork net = load_input_network(cfg, warn);
    require_artifact(paths.communities, "communities");
    CommunityStructure comm = load_communities_csv(paths.communities, net.node_labels());
    MeasureTable table = compute_measures(net, comm, cfg.threads);
    StageGuard guard({paths.measures});
    save_measures_csv(table, net.node_labels(), paths.measures);
    guard.done();
}

void stage_mine(const PipelineConfig& cfg, const WarningSink& warn) {
    StagePaths paths = stage_paths(cfg.out_dir);
    fs::create_directories(cfg.out_dir);
    DynamicNetwork net = load_input_network(cfg, warn);
    require_artifact(paths.communities, "communities");
    CommunityStructure comm = load_communities_csv(paths.communities, net.node_labels());
    require_artifact(paths.measures, "measures");
    MeasuresFile mf = load_measures_csv(paths.measures);
    if (mf.labels != net.node_labels())
        throw DataError(paths.measures + ": node set disagrees with the input network");
    if (mf.table.theta != net.slice_count())
        throw DataError(paths.measures + ": slice count disagrees with the input network");

    std::vector<DescriptorSpec> specs = resolve_descriptors(cfg, net.attribute_names());
    ItemCatalog catalog = ItemCatalog::from_specs(specs);
    SequenceDatabase db = build_database(net, mf.table, comm, specs, catalog);
    std::vector<MinedPattern> patterns =
        mine_closed(db, cfg.min_sup, {static_cast<std::size_t>(cfg.max_candidates)});

    StageGuard guard({paths.database, paths.patterns});
    dump_database(db, catalog, paths.database);
    dump_patterns(patterns, catalog, paths.patterns);
    guard.done();
}

void stage_characterize(const PipelineConfig& cfg, const WarningSink&) {
    StagePaths paths = stage_paths(cfg.out_dir);
    fs::create_directories(cfg.out_dir);
    require_artifact(paths.database, "mine");
    require_artifact(paths.patterns, "mine");
    LoadedDatabase loaded = load_database(paths.database);
    CommunityStructure comm = CommunityStructure::from_assignment(loaded.classes);
    std::vector<MinedPattern> patterns = load_patterns(paths.patterns, loaded.catalog);
    ClassSplit split = split_by_class(patterns);
    for (const auto& [c, list] : split.per_community)
        if (c >= comm.community_count())
            throw DataError(paths.patterns + ": refers to community " + std::to_string(c) +
                            " which the database does not have");

    std::vector<std::vector<NodeId>> members = comm.members();
    std::vector<CommunityId> keep = filter_small(comm, cfg.min_community_size);

    std::error_code ec;
    fs::remove_all(paths.reports_dir, ec);
    fs::create_directories(paths.reports_dir);
    StageGuard guard({paths.reports_dir});
    for (CommunityId c : keep) {
        std::vector<RankedPattern> ranked;
        auto it = split.per_community.find(c);
        if (it != split.per_community.end())
            ranked = growth_rate(it->second, loaded.db, comm, c);
        CommunityReport rep = build_report(c, members[c], ranked, cfg.max_patterns);
        fs::path base = fs::path(paths.reports_dir) / ("community_" + std::to_string(c));
        write_text_file(base.string() + ".json", report_json(rep, loaded.catalog, loaded.db.labels));
        write_text_file(base.string() + ".txt", report_text(rep, loaded.catalog, loaded.db.labels));
    }
    guard.done();
}

void run_stages(const PipelineConfig& cfg, const std::vector<std::string>& stages,
                const WarningSink& warn) {
    struct Entry {
        const char* name;
        void (*fn)(const PipelineConfig&, const WarningSink&);
    };
    static const Entry all[] = {{"communities", stage_communities},
                                {"measures", stage_measures},
                                {"mine", stage_mine},
                                {"characterize", stage_characterize}};
    for (const std::string& s : stages) {
        bool known = std::any_of(std::begin(all), std::end(all),
                                 [&](const Entry& e) { return s == e.name; });
        if (!known) throw ConfigError("unknown stage '" + s + "'");
    }

    fs::create_directories(cfg.out_dir);
    nlohmann::ordered_json timings = nlohmann::ordered_json::array();
    bool resolved_specs = false;
    nlohmann::ordered_json descriptors = nlohmann::ordered_json::array();

    for (const Entry& e : all) {
        if (std::find(stages.begin(), stages.end(), e.name) == stages.end()) continue;
        auto t0 = std::chrono::steady_clock::now();
        e.fn(cfg, warn);
        double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        timings.push_back({{"name", e.name}, {"seconds", format_double(seconds)}});
        if (std::string(e.name) == "mine") resolved_specs = true;
    }

    if (resolved_specs) {
        DynamicNetwork net = load_input_network(cfg, {});
        for (const DescriptorSpec& s : resolve_descriptors(cfg, net.attribute_names())) {
            if (!s.enabled) continue;
            std::string bp;
            for (std::size_t i = 0; i < s.breakpoints.size(); ++i) {
                if (i) bp += ",";
                bp += format_double(s.breakpoints[i]);
            }
            descriptors.push_back({{"id", s.id},
                                   {"kind", s.kind == DescriptorKind::Measure ? "measure" : "attribute"},
                                   {"breakpoints", bp},
                                   {"emit_zero", s.emit_zero}});
        }
    }

    nlohmann::ordered_json manifest;
    manifest["version"] = kVersion;
    manifest["config"] = serialize_config(cfg);
    if (resolved_specs) manifest["descriptors"] = std::move(descriptors);
    manifest["stages"] = std::move(timings);
    write_text_file(stage_paths(cfg.out_dir).manifest, manifest.dump(2) + "\n");
}

void run_pipeline(const PipelineConfig& cfg, const WarningSink& warn) {
    run_stages(cfg, {"communities", "measures", "mine", "characterize"}, warn);
}

}  // namespace comseq
