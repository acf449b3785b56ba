#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "comseq/cli.hpp"
#include "comseq/pipeline.hpp"
#include "comseq/sequence.hpp"
#include "doctest.h"
#include "helpers.hpp"
#include "nlohmann/json.hpp"

using namespace comseq;
namespace fs = std::filesystem;

namespace {

// the two-clique sample network shipped with the repository
const char* kSampleEdges = COMSEQ_SOURCE_DIR "/data/sample_edges.csv";
const char* kSampleAttrs = COMSEQ_SOURCE_DIR "/data/sample_attrs.csv";

PipelineConfig sample_config(const fs::path& out) {
    PipelineConfig cfg;
    cfg.edges_path = kSampleEdges;
    cfg.attrs_path = kSampleAttrs;
    cfg.out_dir = out.string();
    return cfg;
}

int run_cli(std::vector<std::string> args) {
    std::vector<const char*> argv{"comseq"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return cli_main(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_CASE("an empty config file leaves the built-in defaults in place") {
    PipelineConfig cfg = parse_config("", "<test>");
    CHECK(cfg == PipelineConfig{});
    CHECK(cfg.min_sup == 0.02);
    CHECK(cfg.min_community_size == 2);
    CHECK(cfg.seed == 42);
    CHECK(cfg.max_patterns == 10);
    CHECK(cfg.max_candidates == 1'000'000);
    CHECK(cfg.threads == 1);
    CHECK(cfg.out_dir == "out");
}

TEST_CASE("config text sets scalars and per-descriptor overrides") {
    auto dir = testutil::fresh_dir("cfg_scalars");
    std::string edges = (dir / "e.csv").string(), attrs = (dir / "a.csv").string();
    testutil::write_file(edges, "t,u,v\n");
    testutil::write_file(attrs, "t,node,attr,value\n");
    std::string text =
        "# run settings\n"
        "edges = " + edges + "\n" +
        "attrs = " + attrs + "\n" +
        "out = results\n"
        "min_sup = 0.1\n"
        "min_community_size = 3\n"
        "seed = 7\n"
        "max_patterns = 5\n"
        "max_candidates = 5000\n"
        "threads = 2\n"
        "\n"
        "descriptor.degree.breakpoints = 2, 5, 9\n"
        "descriptor.int_degree.enabled = true\n"
        "descriptor.conf.emit_zero = true\n";
    PipelineConfig cfg = parse_config(text, "<test>");
    CHECK(cfg.edges_path == edges);
    CHECK(cfg.attrs_path == attrs);
    CHECK(cfg.out_dir == "results");
    CHECK(cfg.min_sup == 0.1);
    CHECK(cfg.min_community_size == 3);
    CHECK(cfg.seed == 7);
    CHECK(cfg.max_patterns == 5);
    CHECK(cfg.max_candidates == 5000);
    CHECK(cfg.threads == 2);
    REQUIRE(cfg.overrides.count("degree"));
    CHECK(cfg.overrides.at("degree").breakpoints == std::vector<double>{2, 5, 9});
    CHECK(cfg.overrides.at("int_degree").enabled == true);
    CHECK(cfg.overrides.at("conf").emit_zero == true);
}

TEST_CASE("config parsing collects every problem into one error") {
    std::string text =
        "min_sup = 1.5\n"
        "threads = 0\n"
        "nonsense = 1\n"
        "min_sup = 0.2\n"
        "descriptor.degree.breakpoints = 5, 2\n"
        "descriptor.degree.sillyfield = 1\n";
    try {
        parse_config(text, "bad.conf");
        FAIL("expected a config error");
    } catch (const ConfigError& e) {
        std::string msg = e.what();
        CHECK(msg.find("min_sup") != std::string::npos);
        CHECK(msg.find("threads") != std::string::npos);
        CHECK(msg.find("nonsense") != std::string::npos);
        CHECK(msg.find("duplicate") != std::string::npos);
        CHECK(msg.find("degree") != std::string::npos);       // which descriptor broke
        CHECK(msg.find("sillyfield") != std::string::npos);
        CHECK(msg.find("bad.conf") != std::string::npos);
    }
}

TEST_CASE("config rejects malformed lines and values") {
    CHECK_THROWS_AS(parse_config("min_sup 0.5\n", "<t>"), ConfigError);      // no equals
    CHECK_THROWS_AS(parse_config("min_sup = abc\n", "<t>"), ConfigError);
    CHECK_THROWS_AS(parse_config("seed = -1\n", "<t>"), ConfigError);
    CHECK_THROWS_AS(parse_config("descriptor.x.breakpoints = \n", "<t>"), ConfigError);
    CHECK_THROWS_AS(parse_config("descriptor.x.breakpoints = 1,oops\n", "<t>"), ConfigError);
    CHECK_THROWS_AS(parse_config("descriptor.x.emit_zero = maybe\n", "<t>"), ConfigError);
    CHECK_THROWS_AS(parse_config("descriptor..enabled = true\n", "<t>"), ConfigError);
}

TEST_CASE("the serialized config parses back to an identical value") {
    auto dir = testutil::fresh_dir("cfg_echo");
    testutil::write_file(dir / "e.csv", "t,u,v\n");
    testutil::write_file(dir / "a.csv", "t,node,attr,value\n");
    PipelineConfig cfg;
    cfg.edges_path = (dir / "e.csv").string();
    cfg.attrs_path = (dir / "a.csv").string();
    cfg.out_dir = "somewhere/else";
    cfg.min_sup = 0.125;
    cfg.seed = 99;
    cfg.overrides["degree"].breakpoints = std::vector<double>{1.5, 4};
    cfg.overrides["conf"].enabled = false;
    cfg.overrides["conf"].emit_zero = true;

    std::string echo = serialize_config(cfg);
    PipelineConfig back = parse_config(echo, "<echo>");
    CHECK(back == cfg);
    CHECK(serialize_config(back) == echo);

    CHECK(parse_config(serialize_config(PipelineConfig{}), "<echo>") == PipelineConfig{});
}

TEST_CASE("semantic checks name the offending values") {
    PipelineConfig cfg;
    cfg.min_sup = 1.5;
    CHECK_THROWS_WITH_AS(check_config(cfg), doctest::Contains("min_sup"), ConfigError);
    cfg.min_sup = 0.5;
    cfg.max_patterns = 0;
    CHECK_THROWS_WITH_AS(check_config(cfg), doctest::Contains("max_patterns"), ConfigError);
    cfg.max_patterns = 10;
    cfg.out_dir = "";
    CHECK_THROWS_AS(check_config(cfg), ConfigError);
    cfg.out_dir = "out";
    cfg.edges_path = "/definitely/not/there.csv";
    CHECK_THROWS_WITH_AS(check_config(cfg), doctest::Contains("there.csv"), ConfigError);
}

TEST_CASE("descriptor resolution starts from the documented defaults") {
    PipelineConfig cfg;
    auto specs = resolve_descriptors(cfg, {"conf", "pubs"});

    REQUIRE(specs.size() == 8);  // six measures plus two attributes
    auto find = [&](const std::string& id) -> const DescriptorSpec& {
        for (const auto& s : specs)
            if (s.id == id) return s;
        FAIL(("missing descriptor " + id));
        return specs[0];
    };
    CHECK(find("degree").breakpoints == std::vector<double>{3, 10, 30});
    CHECK(find("degree").enabled);
    CHECK(find("degree").kind == DescriptorKind::Measure);
    CHECK(find("int_degree").enabled == false);
    CHECK(find("transitivity").breakpoints == std::vector<double>{0.35, 0.5, 0.7});
    CHECK(find("z").breakpoints == std::vector<double>{2.5});
    CHECK(find("participation").breakpoints == std::vector<double>{0.05, 0.6, 0.8});
    CHECK(find("embeddedness").breakpoints == std::vector<double>{0.3, 0.7});
    CHECK(find("conf").kind == DescriptorKind::Attribute);
    CHECK(find("conf").breakpoints == std::vector<double>{1, 2, 3, 4, 5});
    CHECK(find("conf").emit_zero == false);
    CHECK(find("pubs").emit_zero == false);

    cfg.overrides["degree"].breakpoints = std::vector<double>{1, 2};
    cfg.overrides["int_degree"].enabled = true;
    cfg.overrides["conf"].emit_zero = true;
    auto tuned = resolve_descriptors(cfg, {"conf", "pubs"});
    for (const auto& s : tuned) {
        if (s.id == "degree") CHECK(s.breakpoints == std::vector<double>{1, 2});
        if (s.id == "int_degree") CHECK(s.enabled);
        if (s.id == "conf") CHECK(s.emit_zero);
    }
}

TEST_CASE("descriptor resolution rejects unknown ids and attribute collisions") {
    PipelineConfig cfg;
    cfg.overrides["ghost"].enabled = false;
    CHECK_THROWS_WITH_AS(resolve_descriptors(cfg, {"conf"}), doctest::Contains("ghost"),
                         ConfigError);

    PipelineConfig clean;
    CHECK_THROWS_WITH_AS(resolve_descriptors(clean, {"degree"}),
                         doctest::Contains("collides"), ConfigError);

    PipelineConfig bad;
    bad.overrides["degree"].breakpoints = std::vector<double>{5, 1};
    CHECK_THROWS_AS(resolve_descriptors(bad, {}), ConfigError);
}

TEST_CASE("stage paths all live inside the output directory") {
    StagePaths p = stage_paths("somewhere");
    for (const std::string& path : {p.communities, p.measures, p.database, p.patterns,
                                    p.reports_dir, p.manifest})
        CHECK(path.rfind("somewhere/", 0) == 0);
}

TEST_CASE("a stage guard removes its outputs unless disarmed") {
    auto dir = testutil::fresh_dir("guard");
    auto keep = dir / "keep.txt", drop = dir / "drop.txt";
    testutil::write_file(keep, "kept");
    testutil::write_file(drop, "doomed");
    {
        StageGuard guard({keep.string()});
        guard.done();
    }
    CHECK(fs::exists(keep));
    {
        StageGuard guard({drop.string()});
    }
    CHECK_FALSE(fs::exists(drop));
}

TEST_CASE("the full pipeline writes every artifact and both report forms") {
    auto out = testutil::fresh_dir("pipe_full");
    PipelineConfig cfg = sample_config(out);
    run_pipeline(cfg);

    StagePaths p = stage_paths(cfg.out_dir);
    for (const std::string& path : {p.communities, p.measures, p.database, p.patterns, p.manifest})
        CHECK(fs::exists(path));
    CHECK(fs::exists(fs::path(p.reports_dir) / "community_0.json"));
    CHECK(fs::exists(fs::path(p.reports_dir) / "community_0.txt"));
    CHECK(fs::exists(fs::path(p.reports_dir) / "community_1.json"));

    // the two seven-node cliques must come out as the two communities
    auto communities = testutil::read_file(p.communities);
    for (const char* row : {"a1,0", "a7,0", "b1,1", "b7,1"})
        CHECK(communities.find(row) != std::string::npos);

    auto report = nlohmann::json::parse(
        testutil::read_file(fs::path(p.reports_dir) / "community_0.json"));
    CHECK(report["community"] == 0);
    CHECK(report["size"] == 7);
    CHECK(report["characterized"] == true);
    CHECK(report["most_supported"]["sup_in"]["count"] == 7);
    // the planted conference attribute separates the communities
    std::string emerging = report["most_emerging"]["sequence"];
    CHECK(emerging.find("confA") != std::string::npos);
    CHECK(report["most_emerging"]["growth"] == "inf");
}

TEST_CASE("reruns and staged runs produce byte-identical artifacts") {
    auto out1 = testutil::fresh_dir("pipe_a");
    auto out2 = testutil::fresh_dir("pipe_b");
    auto out3 = testutil::fresh_dir("pipe_c");

    run_pipeline(sample_config(out1));
    run_pipeline(sample_config(out2));
    PipelineConfig staged = sample_config(out3);
    stage_communities(staged);
    stage_measures(staged);
    stage_mine(staged);
    stage_characterize(staged);

    StagePaths p1 = stage_paths(out1.string());
    StagePaths p2 = stage_paths(out2.string());
    StagePaths p3 = stage_paths(out3.string());
    auto same = [](const std::string& a, const std::string& b) {
        CHECK(testutil::read_file(a) == testutil::read_file(b));
    };
    same(p1.communities, p2.communities);
    same(p1.measures, p2.measures);
    same(p1.database, p2.database);
    same(p1.patterns, p2.patterns);
    same(p1.communities, p3.communities);
    same(p1.measures, p3.measures);
    same(p1.database, p3.database);
    same(p1.patterns, p3.patterns);
    for (const auto& entry : fs::directory_iterator(p1.reports_dir)) {
        auto name = entry.path().filename();
        same(entry.path().string(), (fs::path(p2.reports_dir) / name).string());
        same(entry.path().string(), (fs::path(p3.reports_dir) / name).string());
    }
}

TEST_CASE("the manifest echoes a config that parses back to the one that ran") {
    auto out = testutil::fresh_dir("pipe_manifest");
    PipelineConfig cfg = sample_config(out);
    cfg.min_sup = 0.25;
    run_pipeline(cfg);

    auto manifest = nlohmann::json::parse(testutil::read_file(stage_paths(cfg.out_dir).manifest));
    CHECK(manifest["version"] == kVersion);
    PipelineConfig echoed = parse_config(manifest["config"], "<manifest>");
    CHECK(echoed == cfg);

    REQUIRE(manifest.contains("descriptors"));
    bool saw_degree = false;
    for (const auto& d : manifest["descriptors"]) {
        if (d["id"] == "degree") {
            saw_degree = true;
            CHECK(d["kind"] == "measure");
            CHECK(d["breakpoints"] == "3,10,30");
        }
        CHECK(d["id"] != "int_degree");  // disabled descriptors stay out
    }
    CHECK(saw_degree);

    REQUIRE(manifest.contains("stages"));
    std::vector<std::string> names;
    for (const auto& s : manifest["stages"]) names.push_back(s["name"]);
    CHECK(names == std::vector<std::string>{"communities", "measures", "mine", "characterize"});
}

TEST_CASE("a failing stage cleans up its partial outputs") {
    auto out = testutil::fresh_dir("pipe_fail");
    PipelineConfig cfg = sample_config(out);
    stage_communities(cfg);
    stage_measures(cfg);

    cfg.max_candidates = 1;  // the miner trips its cap immediately
    CHECK_THROWS_AS(stage_mine(cfg), ResourceLimitError);
    StagePaths p = stage_paths(cfg.out_dir);
    CHECK(fs::exists(p.communities));  // earlier artifacts stay
    CHECK_FALSE(fs::exists(p.database));
    CHECK_FALSE(fs::exists(p.patterns));

    cfg.max_candidates = 1'000'000;
    stage_mine(cfg);
    CHECK(fs::exists(p.database));
    CHECK(fs::exists(p.patterns));
}

TEST_CASE("stages demand their upstream artifacts by name") {
    auto out = testutil::fresh_dir("pipe_missing");
    PipelineConfig cfg = sample_config(out);
    CHECK_THROWS_WITH_AS(stage_measures(cfg), doctest::Contains("communities stage"), DataError);
    CHECK_THROWS_WITH_AS(stage_characterize(cfg), doctest::Contains("mine stage"), DataError);
}

TEST_CASE("run_stages rejects unknown stage names") {
    PipelineConfig cfg = sample_config("unused");
    CHECK_THROWS_WITH_AS(run_stages(cfg, {"communities", "polish"}),
                         doctest::Contains("polish"), ConfigError);
}

TEST_CASE("the mine stage refuses mismatched intermediate artifacts") {
    auto out = testutil::fresh_dir("pipe_mismatch");
    PipelineConfig cfg = sample_config(out);
    stage_communities(cfg);
    stage_measures(cfg);

    // measures recomputed for a different network shape
    auto other = testutil::fresh_dir("pipe_mismatch_other");
    testutil::write_file(other / "edges.csv", "t,u,v\n1,a,b\n");
    testutil::write_file(other / "attrs.csv", "t,node,attr,value\n");
    PipelineConfig alien = cfg;
    alien.edges_path = (other / "edges.csv").string();
    alien.attrs_path = (other / "attrs.csv").string();
    CHECK_THROWS_AS(stage_mine(alien), DataError);
}

TEST_CASE("the command line maps error classes onto distinct exit codes") {
    auto out = testutil::fresh_dir("cli_codes");

    CHECK(run_cli({"--version"}) == 0);
    CHECK(run_cli({"pipeline", "--edges", kSampleEdges, "--attrs", kSampleAttrs, "--out",
                   (out / "ok").string(), "--min-sup", "0.3"}) == 0);

    // config error: bad support range
    CHECK(run_cli({"pipeline", "--edges", kSampleEdges, "--attrs", kSampleAttrs, "--out",
                   (out / "bad").string(), "--min-sup", "1.5"}) == 1);
    // config error: unreadable input
    CHECK(run_cli({"pipeline", "--edges", "/missing.csv", "--attrs", kSampleAttrs, "--out",
                   (out / "bad").string()}) == 1);
    // usage error from the parser itself
    CHECK(run_cli({"pipeline", "--no-such-flag"}) == 1);
    CHECK(run_cli({}) == 1);
    // data error: artifacts missing for a later stage
    CHECK(run_cli({"characterize", "--edges", kSampleEdges, "--attrs", kSampleAttrs, "--out",
                   (out / "fresh").string()}) == 2);
    // resource error: candidate cap
    CHECK(run_cli({"pipeline", "--edges", kSampleEdges, "--attrs", kSampleAttrs, "--out",
                   (out / "capped").string(), "--max-candidates", "1"}) == 3);
}

TEST_CASE("command line flags outrank environment variables") {
    auto out = testutil::fresh_dir("cli_env");
    setenv("COMSEQ_MIN_SUP", "1.7", 1);  // invalid on its own
    int code = run_cli({"pipeline", "--edges", kSampleEdges, "--attrs", kSampleAttrs, "--out",
                        (out / "flag_wins").string(), "--min-sup", "0.3"});
    unsetenv("COMSEQ_MIN_SUP");
    CHECK(code == 0);

    setenv("COMSEQ_MIN_SUP", "1.7", 1);
    int bad = run_cli({"pipeline", "--edges", kSampleEdges, "--attrs", kSampleAttrs, "--out",
                       (out / "env_used").string()});
    unsetenv("COMSEQ_MIN_SUP");
    CHECK(bad == 1);

    setenv("COMSEQ_SEED", "43", 1);
    auto with_env = out / "env_seed";
    int ok = run_cli({"pipeline", "--edges", kSampleEdges, "--attrs", kSampleAttrs, "--out",
                      with_env.string(), "--min-sup", "0.3"});
    unsetenv("COMSEQ_SEED");
    CHECK(ok == 0);
    auto manifest = nlohmann::json::parse(
        testutil::read_file(stage_paths(with_env.string()).manifest));
    std::string echo = manifest["config"];
    CHECK(echo.find("seed = 43") != std::string::npos);
}

TEST_CASE("a config file feeds the run and flags still override it") {
    auto out = testutil::fresh_dir("cli_config");
    auto conf = out / "run.conf";
    testutil::write_file(conf, std::string("edges = ") + kSampleEdges + "\nattrs = " +
                                   kSampleAttrs + "\nout = " + (out / "from_file").string() +
                                   "\nmin_sup = 0.3\n");
    CHECK(run_cli({"pipeline", "--config", conf.string()}) == 0);
    CHECK(fs::exists(stage_paths((out / "from_file").string()).manifest));

    CHECK(run_cli({"pipeline", "--config", conf.string(), "--out",
                   (out / "flag_out").string()}) == 0);
    CHECK(fs::exists(stage_paths((out / "flag_out").string()).manifest));

    CHECK(run_cli({"pipeline", "--config", (out / "nope.conf").string()}) == 1);
}
