#pragma once

#include <map>
#include <string>
#include <vector>

#include "shapemend/morphology.hpp"
#include "shapemend/volume.hpp"

namespace shapemend {

/// Bookkeeping for one correction step; changed == false implies all
/// counters are zero and the output is bit-identical to the input.
struct StepOutcome {
    bool changed = false;
    std::size_t voxels_removed = 0;
    std::size_t voxels_added = 0;
    std::size_t voxels_relabeled = 0;
    std::vector<std::string> notes;
};

struct MaskResult {
    BinaryMask mask;
    StepOutcome outcome;
};

struct CaseResult {
    SegmentationCase seg;
    StepOutcome outcome;
};

/// Which case keys a misassigned component of a given key may move to.
using AdjacencyMap = std::map<std::string, std::vector<std::string>>;

/// Throws UnknownOrgan on a key not in `keys`, ConfigError on self edges.
void validate_adjacency(const AdjacencyMap& adjacency,
                        const std::vector<std::string>& keys);

/// Drop components smaller than `threshold` voxels.
MaskResult remove_small_components(const BinaryMask& mask, std::size_t threshold,
                                   Connectivity conn);

/// Keep only the `keep_top` largest components (module tie-break order).
MaskResult suppress_non_largest_components(const BinaryMask& mask, int keep_top,
                                           Connectivity conn);

/// Move components smaller than `check_size_threshold` to an adjacent
/// organ whose dominant component is strictly closer than their own
/// organ's dominant. Conserves total foreground exactly.
CaseResult reassign_false_positives(const SegmentationCase& seg,
                                    const AdjacencyMap& adjacency,
                                    std::size_t check_size_threshold,
                                    Connectivity conn);

/// Greedily bridge the closest component pair while any pair lies within
/// d_merge mm, until one component remains or all gaps exceed d_merge.
MaskResult merge_fragmented_structure(const BinaryMask& mask, double d_merge_mm,
                                      int r_bridge, Connectivity conn);

struct SplitResult {
    BinaryMask right;
    BinaryMask left;
};

/// Partition a symmetric-organ mask into right/left along `axis`. The
/// midline is the mean foreground coordinate; components go by their own
/// mean, except a dominant component spanning the midline (mass fraction
/// above `merged_split_fraction`) which is plane-split voxelwise.
SplitResult split_right_left(const BinaryMask& mask, int axis,
                             double merged_split_fraction, Connectivity conn);

struct LateralityResult {
    BinaryMask right;
    BinaryMask left;
    StepOutcome outcome;
};

/// Identity or swap of the two inputs, never any other voxel change:
/// swap when the provisional left centroid is strictly closer to the
/// liver centroid along `axis`. Empty liver skips with a note.
LateralityResult reassign_left_right_based_on_liver(const BinaryMask& right,
                                                    const BinaryMask& left,
                                                    const BinaryMask& liver,
                                                    int axis);

} // namespace shapemend
