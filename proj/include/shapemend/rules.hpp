#pragma once

#include <string>
#include <vector>

#include "shapemend/schema.hpp"
#include "shapemend/shape_ops.hpp"

namespace shapemend {

struct PipelineConfig; // pipeline.hpp

enum class StepKind {
    RemoveSmall,
    ReassignFalsePositives,
    MergeFragments,
    Suppress,
    Lateralize,
};

const char* step_name(StepKind kind);
StepKind step_from_name(const std::string& name); // throws UnknownStep

/// One planned correction: a step bound to an organ scope and concrete
/// parameters. `organ` is a case key for mask-level steps, a schema organ
/// name for Suppress-on-paired-union and Lateralize, empty for the
/// case-level reassignment step.
struct PlanStep {
    StepKind kind;
    std::string organ;
    std::size_t threshold = 0; // RemoveSmall / ReassignFalsePositives
    int keep_top = 1;          // Suppress
    double d_merge_mm = 0.0;   // MergeFragments
    int r_bridge = 1;
    Connectivity conn = Connectivity::Full26;
    double merged_split_fraction = 0.6; // Lateralize
    int lateral_axis_fallback = 0;
};

struct RulePlan {
    std::vector<PlanStep> steps;
    AdjacencyMap adjacency; // expanded to case keys
};

struct StepRecord {
    std::string step;
    std::string organ;
    StepOutcome outcome;
};

/// Deterministic plan in canonical step order: remove small, reassign,
/// merge, suppress, lateralize. Paired organs automatically receive the
/// split + liver-validation step; the liver itself is capped at one
/// component. Throws UnknownOrgan / UnknownStep / MissingLiver.
RulePlan compile_plan(const OrganSchema& schema, const PipelineConfig& config);

/// Apply plan steps in order; a failing organ step aborts only that
/// organ's remaining steps and leaves its mask at the last valid state.
std::pair<SegmentationCase, std::vector<StepRecord>> apply_organ_rules(
    const SegmentationCase& seg, const RulePlan& plan);

} // namespace shapemend
