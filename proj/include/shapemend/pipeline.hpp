#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "shapemend/eval.hpp"
#include "shapemend/rules.hpp"
#include "shapemend/schema.hpp"

namespace shapemend {

struct OrganOverride {
    std::optional<int> keep_top;       // -1 in YAML means "unbounded"
    std::optional<int> min_component_voxels;
    std::optional<bool> mergeable;
};

struct PipelineConfig {
    std::vector<std::string> enabled_steps{
        "remove_small_components", "reassign_false_positives",
        "merge_fragmented_structure", "suppress_non_largest_components",
        "split_right_left"};
    Connectivity connectivity = Connectivity::Full26;
    std::size_t check_size_threshold = 500;
    double d_merge_mm = 10.0;
    int r_bridge_voxels = 1;
    int lateral_axis_fallback = 0;
    double merged_split_fraction = 0.6;
    int workers = 1;
    bool strict_labels = true;
    ReportFormat report_format = ReportFormat::Csv;
    std::map<std::string, OrganOverride> overrides;

    static PipelineConfig from_yaml_file(const std::string& path);
    static PipelineConfig from_yaml_string(const std::string& text);
    /// SHAPEMEND_WORKERS overrides the worker count when set.
    void apply_env_overrides();
    void validate() const;
    bool step_enabled(const std::string& name) const;
};

/// Canonical per-case correction: compiled plan applied in order with
/// per-step skip logging.
std::pair<SegmentationCase, CaseReport> process_case(const SegmentationCase& seg,
                                                     const RulePlan& plan,
                                                     const PipelineConfig& config);

struct BatchInput {
    std::string case_id;
    std::filesystem::path input;
    std::filesystem::path output; // empty = do not write
};

struct BatchReport {
    std::vector<CaseReport> cases; // input order
    std::size_t successes = 0;
    std::size_t failures = 0;
    int workers = 1;
    double wall_seconds = 0.0;
};

/// Process cases with a pool of `config.workers` workers, one case per
/// worker at a time. Output is a pure function of (inputs, schema,
/// config): independent of worker count and scheduling. Per-case failures
/// are recorded, never propagated.
BatchReport run_batch(const std::vector<BatchInput>& inputs,
                      const OrganSchema& schema, const PipelineConfig& config);

/// In-memory variant used by embedding hosts and tests; returns corrected
/// cases in input order.
std::vector<std::pair<SegmentationCase, CaseReport>> run_batch_cases(
    const std::vector<SegmentationCase>& cases, const OrganSchema& schema,
    const PipelineConfig& config);

} // namespace shapemend
