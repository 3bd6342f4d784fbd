#include "shapemend/rules.hpp"

#include <algorithm>
#include <set>

#include "shapemend/pipeline.hpp"

namespace shapemend {

const char* step_name(StepKind kind) {
    switch (kind) {
        case StepKind::RemoveSmall: return "remove_small_components";
        case StepKind::ReassignFalsePositives: return "reassign_false_positives";
        case StepKind::MergeFragments: return "merge_fragmented_structure";
        case StepKind::Suppress: return "suppress_non_largest_components";
        case StepKind::Lateralize: return "split_right_left";
    }
    return "?";
}

StepKind step_from_name(const std::string& name) {
    for (StepKind k :
         {StepKind::RemoveSmall, StepKind::ReassignFalsePositives,
          StepKind::MergeFragments, StepKind::Suppress, StepKind::Lateralize})
        if (name == step_name(k)) return k;
    throw UnknownStep("unknown step: " + name);
}

namespace {

struct EffectiveOrgan {
    std::optional<int> keep_top;
    int min_component_voxels = 0;
    bool mergeable = false;
};

EffectiveOrgan effective(const OrganSpec& spec, const PipelineConfig& config) {
    EffectiveOrgan e{spec.keep_top, spec.min_component_voxels, spec.mergeable};
    auto it = config.overrides.find(spec.name);
    if (it != config.overrides.end()) {
        if (it->second.keep_top) {
            // -1 lifts the cap entirely.
            if (*it->second.keep_top < 0)
                e.keep_top.reset();
            else
                e.keep_top = *it->second.keep_top;
        }
        if (it->second.min_component_voxels)
            e.min_component_voxels = *it->second.min_component_voxels;
        if (it->second.mergeable) e.mergeable = *it->second.mergeable;
    }
    return e;
}

} // namespace

RulePlan compile_plan(const OrganSchema& schema, const PipelineConfig& config) {
    for (const auto& name : config.enabled_steps) step_from_name(name);
    for (const auto& [organ, ov] : config.overrides)
        if (!schema.find(organ))
            throw UnknownOrgan("override references unknown organ: " + organ);

    RulePlan plan;
    const auto& keys = schema.case_keys();

    PlanStep base;
    base.conn = config.connectivity;
    base.r_bridge = config.r_bridge_voxels;
    base.merged_split_fraction = config.merged_split_fraction;
    base.lateral_axis_fallback = config.lateral_axis_fallback;

    const bool lateralize = config.step_enabled(step_name(StepKind::Lateralize));
    bool any_paired = false;
    for (const OrganSpec& o : schema.organs()) any_paired |= o.paired;
    if (lateralize && any_paired && !schema.find("liver"))
        throw MissingLiver("laterality validation requires a liver organ");

    if (config.step_enabled(step_name(StepKind::RemoveSmall))) {
        for (const CaseKey& k : keys) {
            const EffectiveOrgan e =
                effective(schema.organs()[k.organ_index], config);
            if (e.min_component_voxels <= 0) continue;
            PlanStep s = base;
            s.kind = StepKind::RemoveSmall;
            s.organ = k.key;
            s.threshold = static_cast<std::size_t>(e.min_component_voxels);
            plan.steps.push_back(std::move(s));
        }
    }

    if (config.step_enabled(step_name(StepKind::ReassignFalsePositives))) {
        // Expand schema adjacency (organ names) to case keys.
        for (const CaseKey& k : keys) {
            const OrganSpec& spec = schema.organs()[k.organ_index];
            if (spec.adjacency.empty()) continue;
            std::vector<std::string> neighbors;
            for (const std::string& adj : spec.adjacency) {
                const OrganSpec* other = schema.find(adj);
                if (other->paired) {
                    neighbors.push_back(other->name + "_right");
                    neighbors.push_back(other->name + "_left");
                } else {
                    neighbors.push_back(other->name);
                }
            }
            plan.adjacency[k.key] = std::move(neighbors);
        }
        if (!plan.adjacency.empty()) {
            PlanStep s = base;
            s.kind = StepKind::ReassignFalsePositives;
            s.threshold = config.check_size_threshold;
            plan.steps.push_back(std::move(s));
        }
    }

    if (config.step_enabled(step_name(StepKind::MergeFragments))) {
        for (const CaseKey& k : keys) {
            const EffectiveOrgan e =
                effective(schema.organs()[k.organ_index], config);
            if (!e.mergeable) continue;
            PlanStep s = base;
            s.kind = StepKind::MergeFragments;
            s.organ = k.key;
            s.d_merge_mm = config.d_merge_mm;
            plan.steps.push_back(std::move(s));
        }
    }

    if (config.step_enabled(step_name(StepKind::Suppress))) {
        for (const OrganSpec& o : schema.organs()) {
            EffectiveOrgan e = effective(o, config);
            if (lateralize && o.name == "liver")
                e.keep_top = 1; // the laterality anchor must be one component
            if (!e.keep_top) continue;
            PlanStep s = base;
            s.kind = StepKind::Suppress;
            s.organ = o.name; // paired organs: suppression over the side union
            s.keep_top = *e.keep_top;
            plan.steps.push_back(std::move(s));
        }
    }

    if (lateralize) {
        for (const OrganSpec& o : schema.organs()) {
            if (!o.paired) continue;
            PlanStep s = base;
            s.kind = StepKind::Lateralize;
            s.organ = o.name;
            plan.steps.push_back(std::move(s));
        }
    }

    return plan;
}

namespace {

BinaryMask union_masks(const BinaryMask& a, const BinaryMask& b) {
    std::vector<std::uint8_t> d(a.data());
    const auto& bd = b.data();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] |= bd[i];
    return BinaryMask(a.meta(), std::move(d));
}

BinaryMask intersect_masks(const BinaryMask& a, const BinaryMask& b) {
    std::vector<std::uint8_t> d(a.data());
    const auto& bd = b.data();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] &= bd[i];
    return BinaryMask(a.meta(), std::move(d));
}

} // namespace

std::pair<SegmentationCase, std::vector<StepRecord>> apply_organ_rules(
    const SegmentationCase& seg, const RulePlan& plan) {
    SegmentationCase current = seg;
    std::vector<StepRecord> records;
    std::set<std::string> failed_scopes;

    auto skipped = [](const std::string& why) {
        StepOutcome o;
        o.notes.push_back("skipped: " + why);
        return o;
    };

    for (const PlanStep& step : plan.steps) {
        StepRecord rec{step_name(step.kind), step.organ, {}};
        if (!step.organ.empty() && failed_scopes.count(step.organ)) {
            rec.outcome = skipped("earlier step for this organ failed");
            records.push_back(std::move(rec));
            continue;
        }
        try {
            switch (step.kind) {
                case StepKind::RemoveSmall: {
                    const BinaryMask& m = current.organ(step.organ);
                    if (m.empty()) {
                        rec.outcome = skipped("empty mask");
                        break;
                    }
                    MaskResult r =
                        remove_small_components(m, step.threshold, step.conn);
                    rec.outcome = std::move(r.outcome);
                    if (rec.outcome.changed)
                        current = current.with_organ(step.organ, std::move(r.mask));
                    break;
                }
                case StepKind::ReassignFalsePositives: {
                    CaseResult r = reassign_false_positives(
                        current, plan.adjacency, step.threshold, step.conn);
                    rec.outcome = std::move(r.outcome);
                    if (rec.outcome.changed) current = std::move(r.seg);
                    break;
                }
                case StepKind::MergeFragments: {
                    const BinaryMask& m = current.organ(step.organ);
                    if (m.empty()) {
                        rec.outcome = skipped("empty mask");
                        break;
                    }
                    MaskResult r = merge_fragmented_structure(
                        m, step.d_merge_mm, step.r_bridge, step.conn);
                    rec.outcome = std::move(r.outcome);
                    if (rec.outcome.changed) {
                        // Bridges may only claim background voxels.
                        bool conflict = false;
                        const auto& nd = r.mask.data();
                        const auto& od = m.data();
                        for (const auto& [other, omask] : current.organs()) {
                            if (other == step.organ || omask.empty()) continue;
                            const auto& x = omask.data();
                            for (std::size_t i = 0; i < nd.size() && !conflict; ++i)
                                if (nd[i] && !od[i] && x[i]) conflict = true;
                            if (conflict) break;
                        }
                        if (conflict) {
                            rec.outcome = skipped(
                                "bridge would overlap another organ");
                        } else {
                            current =
                                current.with_organ(step.organ, std::move(r.mask));
                        }
                    }
                    break;
                }
                case StepKind::Suppress: {
                    const std::string rkey = step.organ + "_right";
                    if (current.has_organ(rkey)) { // paired: act on the union
                        const std::string lkey = step.organ + "_left";
                        const BinaryMask& right = current.organ(rkey);
                        const BinaryMask& left = current.organ(lkey);
                        if (right.empty() && left.empty()) {
                            rec.outcome = skipped("empty mask");
                            break;
                        }
                        BinaryMask u = union_masks(right, left);
                        MaskResult r = suppress_non_largest_components(
                            u, step.keep_top, step.conn);
                        rec.outcome = std::move(r.outcome);
                        if (rec.outcome.changed)
                            current = current.with_organs(
                                {{rkey, intersect_masks(right, r.mask)},
                                 {lkey, intersect_masks(left, r.mask)}});
                    } else {
                        const BinaryMask& m = current.organ(step.organ);
                        if (m.empty()) {
                            rec.outcome = skipped("empty mask");
                            break;
                        }
                        MaskResult r = suppress_non_largest_components(
                            m, step.keep_top, step.conn);
                        rec.outcome = std::move(r.outcome);
                        if (rec.outcome.changed)
                            current =
                                current.with_organ(step.organ, std::move(r.mask));
                    }
                    break;
                }
                case StepKind::Lateralize: {
                    const std::string rkey = step.organ + "_right";
                    const std::string lkey = step.organ + "_left";
                    const BinaryMask& right = current.organ(rkey);
                    const BinaryMask& left = current.organ(lkey);
                    if (right.empty() && left.empty()) {
                        rec.outcome = skipped("empty mask");
                        break;
                    }
                    const BinaryMask& liver = current.organ("liver");
                    const int axis = current.meta().lateral_axis(
                        step.lateral_axis_fallback);
                    const BinaryMask u = union_masks(right, left);
                    SplitResult split = split_right_left(
                        u, axis, step.merged_split_fraction, step.conn);
                    LateralityResult lat = reassign_left_right_based_on_liver(
                        split.right, split.left, liver, axis);
                    rec.outcome = std::move(lat.outcome);
                    const bool changed =
                        !(lat.right == right) || !(lat.left == left);
                    rec.outcome.changed = changed;
                    if (changed) {
                        rec.outcome.voxels_relabeled =
                            lat.right.foreground_count() +
                            lat.left.foreground_count();
                        current = current.with_organs({{rkey, std::move(lat.right)},
                                                       {lkey, std::move(lat.left)}});
                    } else {
                        rec.outcome.voxels_relabeled = 0;
                    }
                    break;
                }
            }
        } catch (const std::exception& e) {
            rec.outcome = StepOutcome{};
            rec.outcome.notes.push_back(std::string("error: ") + e.what());
            if (!step.organ.empty()) failed_scopes.insert(step.organ);
        }
        records.push_back(std::move(rec));
    }
    return {std::move(current), std::move(records)};
}

} // namespace shapemend
