#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "comseq/common.hpp"
#include "comseq/sequence.hpp"

namespace comseq {

// Everything a run needs, resolved from defaults, a config file, environment
// variables and flags (in increasing precedence). Descriptor settings are
// stored as overrides; resolve_descriptors applies them to the defaults once
// the attribute names are known.
struct PipelineConfig {
    struct DescriptorOverride {
        std::optional<std::vector<double>> breakpoints;
        std::optional<bool> emit_zero;
        std::optional<bool> enabled;

        bool operator==(const DescriptorOverride&) const = default;
    };

    std::string edges_path;
    std::string attrs_path;
    std::string out_dir = "out";
    double min_sup = 0.02;
    std::uint32_t min_community_size = 2;
    std::uint64_t seed = 42;
    std::uint32_t max_patterns = 10;
    std::uint64_t max_candidates = 1'000'000;
    std::uint32_t threads = 1;
    std::map<std::string, DescriptorOverride> overrides;  // by descriptor id

    bool operator==(const PipelineConfig&) const = default;
};

// Key-value config text ("key = value", full-line # comments). Collects every
// problem before failing so a bad file is reported in one round.
PipelineConfig parse_config(const std::string& text, const std::string& source);
PipelineConfig validate_config(const std::string& path);

// Canonical echo; parse_config(serialize_config(c)) == c.
std::string serialize_config(const PipelineConfig& cfg);

// Semantic checks alone (ranges, breakpoint monotonicity, path readability);
// throws ConfigError listing every violation.
void check_config(const PipelineConfig& cfg);

// Default descriptor set (five measures enabled, int_degree available but
// off, one per-attribute spec) with the config's overrides applied.
std::vector<DescriptorSpec> resolve_descriptors(const PipelineConfig& cfg,
                                                const std::vector<std::string>& attr_names);

// Artifact locations inside the output directory.
struct StagePaths {
    std::string communities;
    std::string measures;
    std::string database;
    std::string patterns;
    std::string reports_dir;
    std::string manifest;
};
StagePaths stage_paths(const std::string& out_dir);

// Removes the registered outputs unless disarmed, so a failed stage never
// leaves partial artifacts behind.
class StageGuard {
public:
    explicit StageGuard(std::vector<std::string> outputs) : outputs_(std::move(outputs)) {}
    StageGuard(const StageGuard&) = delete;
    StageGuard& operator=(const StageGuard&) = delete;
    ~StageGuard();

    void done() { armed_ = false; }

private:
    std::vector<std::string> outputs_;
    bool armed_ = true;
};

void stage_communities(const PipelineConfig& cfg, const WarningSink& warn = {});
void stage_measures(const PipelineConfig& cfg, const WarningSink& warn = {});
void stage_mine(const PipelineConfig& cfg, const WarningSink& warn = {});
void stage_characterize(const PipelineConfig& cfg, const WarningSink& warn = {});

// Runs the named stages in canonical order and writes the run manifest
// (config echo, resolved descriptors when known, versions, timings).
void run_stages(const PipelineConfig& cfg, const std::vector<std::string>& stages,
                const WarningSink& warn = {});
void run_pipeline(const PipelineConfig& cfg, const WarningSink& warn = {});

}  // namespace comseq
