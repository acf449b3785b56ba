#include "comseq/cli.hpp"

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "comseq/common.hpp"
#include "comseq/pipeline.hpp"

namespace comseq {

namespace {

// One value slot plus its option handle per setting, so that after parsing we
// know whether the value arrived (flag or environment) and may override the
// config file. Precedence: flag > environment > config file > default.
struct CommonOpts {
    std::string config_path;
    std::string edges, attrs, out;
    double min_sup = 0;
    std::uint64_t seed = 0;
    std::uint32_t min_community_size = 0;
    std::uint32_t max_patterns = 0;
    std::uint64_t max_candidates = 0;
    std::uint32_t threads = 0;

    CLI::Option* o_config = nullptr;
    CLI::Option* o_edges = nullptr;
    CLI::Option* o_attrs = nullptr;
    CLI::Option* o_out = nullptr;
    CLI::Option* o_min_sup = nullptr;
    CLI::Option* o_seed = nullptr;
    CLI::Option* o_min_community_size = nullptr;
    CLI::Option* o_max_patterns = nullptr;
    CLI::Option* o_max_candidates = nullptr;
    CLI::Option* o_threads = nullptr;
};

void add_common(CLI::App* sub, CommonOpts& o) {
    o.o_config = sub->add_option("--config", o.config_path, "key = value config file")
                     ->envname("COMSEQ_CONFIG");
    o.o_edges = sub->add_option("--edges", o.edges, "edges CSV with header t,u,v")
                    ->envname("COMSEQ_EDGES");
    o.o_attrs = sub->add_option("--attrs", o.attrs, "attributes CSV with header t,node,attr,value")
                    ->envname("COMSEQ_ATTRS");
    o.o_out = sub->add_option("--out", o.out, "output directory (default: out)")
                  ->envname("COMSEQ_OUT");
    o.o_min_sup = sub->add_option("--min-sup", o.min_sup, "minimum support in (0,1] (default: 0.02)")
                      ->envname("COMSEQ_MIN_SUP");
    o.o_seed = sub->add_option("--seed", o.seed, "community detection shuffle seed (default: 42)")
                   ->envname("COMSEQ_SEED");
    o.o_min_community_size =
        sub->add_option("--min-community-size", o.min_community_size,
                        "smallest community that gets a report (default: 2)")
            ->envname("COMSEQ_MIN_COMMUNITY_SIZE");
    o.o_max_patterns = sub->add_option("--max-patterns", o.max_patterns,
                                       "cap on representative patterns per report (default: 10)")
                           ->envname("COMSEQ_MAX_PATTERNS");
    o.o_max_candidates = sub->add_option("--max-candidates", o.max_candidates,
                                         "miner candidate cap (default: 1000000)")
                             ->envname("COMSEQ_MAX_CANDIDATES");
    o.o_threads = sub->add_option("--threads", o.threads,
                                  "worker cap for the measure pass (default: 1)")
                      ->envname("COMSEQ_THREADS");
}

PipelineConfig build_config(const CommonOpts& o) {
    PipelineConfig cfg;
    if (o.o_config->count()) cfg = validate_config(o.config_path);
    if (o.o_edges->count()) cfg.edges_path = o.edges;
    if (o.o_attrs->count()) cfg.attrs_path = o.attrs;
    if (o.o_out->count()) cfg.out_dir = o.out;
    if (o.o_min_sup->count()) cfg.min_sup = o.min_sup;
    if (o.o_seed->count()) cfg.seed = o.seed;
    if (o.o_min_community_size->count()) cfg.min_community_size = o.min_community_size;
    if (o.o_max_patterns->count()) cfg.max_patterns = o.max_patterns;
    if (o.o_max_candidates->count()) cfg.max_candidates = o.max_candidates;
    if (o.o_threads->count()) cfg.threads = o.threads;
    check_config(cfg);
    return cfg;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"characterizes communities of a dynamic attributed network by mining "
                 "emerging closed sequential patterns and flagging anomaly nodes"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    struct Stage {
        const char* name;
        const char* help;
    };
    static const Stage stages[] = {
        {"communities", "detect communities on the time-aggregated weighted network"},
        {"measures", "compute per-slice topological measures against the detected communities"},
        {"mine", "build the discretized sequence database and mine closed frequent patterns"},
        {"characterize", "rank patterns per community, pick representatives, list anomalies"},
        {"pipeline", "run all four stages in order"},
    };
    CommonOpts opts[5];
    CLI::App* subs[5];
    for (int i = 0; i < 5; ++i) {
        subs[i] = app.add_subcommand(stages[i].name, stages[i].help);
        add_common(subs[i], opts[i]);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        for (int i = 0; i < 5; ++i) {
            if (!subs[i]->parsed()) continue;
            PipelineConfig cfg = build_config(opts[i]);
            WarningSink warn = [](const std::string& m) { std::cerr << "warning: " << m << "\n"; };
            if (std::string(stages[i].name) == "pipeline")
                run_pipeline(cfg, warn);
            else
                run_stages(cfg, {stages[i].name}, warn);
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const ResourceLimitError& e) {
        std::cerr << "resource limit: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

}  // namespace comseq
