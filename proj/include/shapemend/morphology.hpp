#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "shapemend/volume.hpp"

namespace shapemend {

enum class Connectivity : int { Faces6 = 6, Edges18 = 18, Full26 = 26 };

Connectivity connectivity_from_int(int v);

/// Neighbor offsets for a connectivity, deterministic order.
const std::vector<std::array<int, 3>>& neighbor_offsets(Connectivity conn);

struct ComponentStats {
    std::size_t size = 0;
    double size_mm3 = 0.0;
    std::array<double, 3> centroid{0, 0, 0};
    std::array<int, 3> bbox_min{0, 0, 0};
    std::array<int, 3> bbox_max{0, 0, 0};
    std::size_t first_voxel = 0; // row-major index, tie-break key
};

/// Labeled connected components of a mask. Ids 1..count are ordered by
/// descending size, ties by ascending row-major first voxel.
struct ComponentSet {
    int count = 0;
    GridMeta meta;
    std::vector<std::int32_t> label_grid;
    std::vector<ComponentStats> stats; // stats[i] describes component i+1

    std::vector<std::size_t> component_voxels(int id) const;
    BinaryMask component_mask(int id) const;
};

ComponentSet label_components(const BinaryMask& mask, Connectivity conn);

/// Stats for an externally supplied label grid (ids 1..count).
std::vector<ComponentStats> component_stats(const std::vector<std::int32_t>& label_grid,
                                            int count, const GridMeta& meta);

/// Voxels of a set with at least one 6-neighbor outside the set (grid
/// border voxels count as surface).
std::vector<std::size_t> surface_voxels(const GridMeta& meta,
                                        const std::vector<std::uint8_t>& occupancy,
                                        const std::vector<std::size_t>& voxels);
std::vector<std::size_t> surface_voxels(const BinaryMask& mask);

struct ClosestPair {
    std::size_t a = 0, b = 0; // row-major voxel indices
    double distance_mm = 0.0;
};

/// Minimum spacing-scaled distance between voxel centers of two voxel
/// lists, with the minimizing pair. Deterministic under ties.
ClosestPair closest_pair(const GridMeta& meta, const std::vector<std::size_t>& a,
                         const std::vector<std::size_t>& b);

/// Minimum surface distance in mm between two non-empty masks on the same
/// grid; 0 when they share a voxel. Throws EmptyMask.
double min_surface_distance(const BinaryMask& a, const BinaryMask& b);

/// Straight 3-D Bresenham segment from p to q dilated by a Euclidean ball
/// of `radius` voxels, clipped to the grid. 26-connected by construction.
BinaryMask bridge_segment(const GridMeta& meta, const std::array<int, 3>& p,
                          const std::array<int, 3>& q, int radius);

} // namespace shapemend
