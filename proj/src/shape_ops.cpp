#include "shapemend/shape_ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace shapemend {

void validate_adjacency(const AdjacencyMap& adjacency,
                        const std::vector<std::string>& keys) {
    auto known = [&](const std::string& k) {
        return std::find(keys.begin(), keys.end(), k) != keys.end();
    };
    for (const auto& [organ, neighbors] : adjacency) {
        if (!known(organ)) throw UnknownOrgan("adjacency organ not in case: " + organ);
        for (const auto& n : neighbors) {
            if (n == organ)
                throw ConfigError("organ " + organ + " lists itself as adjacent");
            if (!known(n))
                throw UnknownOrgan("adjacency neighbor not in case: " + n);
        }
    }
}

MaskResult remove_small_components(const BinaryMask& mask, std::size_t threshold,
                                   Connectivity conn) {
    MaskResult r{mask, {}};
    if (mask.empty() || threshold == 0) return r;
    const ComponentSet cs = label_components(mask, conn);
    if (cs.count == 0 || cs.stats.back().size >= threshold) return r;

    std::vector<std::uint8_t> keep(cs.count + 1, 0);
    for (int id = 1; id <= cs.count; ++id)
        keep[id] = cs.stats[id - 1].size >= threshold;
    std::vector<std::uint8_t> out(mask.data());
    std::size_t removed = 0;
    for (std::size_t i = 0; i < out.size(); ++i)
        if (out[i] && !keep[cs.label_grid[i]]) {
            out[i] = 0;
            ++removed;
        }
    r.mask = BinaryMask(mask.meta(), std::move(out));
    r.outcome.changed = removed > 0;
    r.outcome.voxels_removed = removed;
    return r;
}

MaskResult suppress_non_largest_components(const BinaryMask& mask, int keep_top,
                                           Connectivity conn) {
    if (keep_top < 1) throw ConfigError("keep_top must be >= 1");
    MaskResult r{mask, {}};
    if (mask.empty()) return r;
    const ComponentSet cs = label_components(mask, conn);
    if (cs.count <= keep_top) return r;

    std::vector<std::uint8_t> out(mask.data());
    std::size_t removed = 0;
    for (std::size_t i = 0; i < out.size(); ++i)
        if (out[i] && cs.label_grid[i] > keep_top) {
            out[i] = 0;
            ++removed;
        }
    r.mask = BinaryMask(mask.meta(), std::move(out));
    r.outcome.changed = removed > 0;
    r.outcome.voxels_removed = removed;
    return r;
}

CaseResult reassign_false_positives(const SegmentationCase& seg,
                                    const AdjacencyMap& adjacency,
                                    std::size_t check_size_threshold,
                                    Connectivity conn) {
    std::vector<std::string> keys;
    for (const auto& [key, mask] : seg.organs()) keys.push_back(key);
    validate_adjacency(adjacency, keys);

    CaseResult r{seg, {}};
    if (check_size_threshold == 0) return r;

    // Snapshot of components and dominant-component surfaces, so every
    // move decision reads the pre-step state.
    std::map<std::string, ComponentSet> comps;
    std::map<std::string, std::vector<std::size_t>> dominant_surface;
    for (const auto& [key, mask] : seg.organs()) {
        if (adjacency.count(key) == 0) {
            bool referenced = false;
            for (const auto& [o, ns] : adjacency)
                if (std::find(ns.begin(), ns.end(), key) != ns.end())
                    referenced = true;
            if (!referenced) continue;
        }
        if (mask.empty()) continue;
        ComponentSet cs = label_components(mask, conn);
        auto dom_vox = cs.component_voxels(1);
        dominant_surface[key] = surface_voxels(mask.meta(), mask.data(), dom_vox);
        comps.emplace(key, std::move(cs));
    }

    struct Move {
        std::string from;
        std::string to;
        std::vector<std::size_t> voxels;
    };
    std::vector<Move> moves;

    for (const auto& [key, mask] : seg.organs()) {
        auto adj_it = adjacency.find(key);
        if (adj_it == adjacency.end()) continue;
        auto cs_it = comps.find(key);
        if (cs_it == comps.end() || cs_it->second.count <= 1) continue;
        const ComponentSet& cs = cs_it->second;
        const auto& own_dom = dominant_surface.at(key);

        for (int id = 2; id <= cs.count; ++id) {
            if (cs.stats[id - 1].size >= check_size_threshold) continue;
            auto comp_vox = cs.component_voxels(id);
            auto comp_surf =
                surface_voxels(cs.meta, r.seg.organ(key).data(), comp_vox);
            const double own_dist =
                closest_pair(cs.meta, comp_surf, own_dom).distance_mm;
            std::string best = key;
            double best_dist = own_dist;
            for (const auto& neighbor : adj_it->second) {
                auto dom_it = dominant_surface.find(neighbor);
                if (dom_it == dominant_surface.end() || dom_it->second.empty())
                    continue;
                const double d =
                    closest_pair(cs.meta, comp_surf, dom_it->second).distance_mm;
                if (d < best_dist) { // ties keep the original label
                    best_dist = d;
                    best = neighbor;
                }
            }
            if (best != key) moves.push_back({key, best, std::move(comp_vox)});
        }
    }

    if (moves.empty()) return r;

    std::map<std::string, std::vector<std::uint8_t>> grids;
    for (const auto& [key, mask] : seg.organs()) grids[key] = mask.data();
    std::size_t relabeled = 0;
    for (const Move& m : moves) {
        for (std::size_t idx : m.voxels) {
            grids[m.from][idx] = 0;
            grids[m.to][idx] = 1;
        }
        relabeled += m.voxels.size();
        r.outcome.notes.push_back("moved " + std::to_string(m.voxels.size()) +
                                  " voxels from " + m.from + " to " + m.to);
    }
    std::vector<std::pair<std::string, BinaryMask>> updated;
    for (const auto& [key, mask] : seg.organs())
        updated.emplace_back(key, BinaryMask(seg.meta(), std::move(grids[key])));
    r.seg = SegmentationCase(seg.case_id(), seg.meta(), std::move(updated),
                             seg.provenance(), seg.unmapped());
    r.outcome.changed = true;
    r.outcome.voxels_relabeled = relabeled;
    return r;
}

MaskResult merge_fragmented_structure(const BinaryMask& mask, double d_merge_mm,
                                      int r_bridge, Connectivity conn) {
    if (d_merge_mm < 0) throw ConfigError("d_merge must be >= 0");
    if (r_bridge < 0) throw ConfigError("r_bridge must be >= 0");
    MaskResult r{mask, {}};
    if (mask.empty()) return r;

    const GridMeta& meta = mask.meta();
    std::vector<std::uint8_t> grid(mask.data());
    std::size_t added = 0;

    while (true) {
        const ComponentSet cs = label_components(BinaryMask(meta, grid), conn);
        if (cs.count <= 1) break;

        std::vector<std::vector<std::size_t>> surfaces(cs.count);
        for (int id = 1; id <= cs.count; ++id)
            surfaces[id - 1] =
                surface_voxels(meta, grid, cs.component_voxels(id));

        // Closest pair of components, deterministic under ties by (i, j).
        double best = std::numeric_limits<double>::infinity();
        ClosestPair best_pair{};
        for (int i = 0; i < cs.count; ++i)
            for (int j = i + 1; j < cs.count; ++j) {
                const ClosestPair cp =
                    closest_pair(meta, surfaces[i], surfaces[j]);
                if (cp.distance_mm < best) {
                    best = cp.distance_mm;
                    best_pair = cp;
                }
            }
        if (!(best <= d_merge_mm)) break;

        const BinaryMask bridge = bridge_segment(
            meta, meta.coords(best_pair.a), meta.coords(best_pair.b), r_bridge);
        const auto& bd = bridge.data();
        for (std::size_t i = 0; i < grid.size(); ++i)
            if (bd[i] && !grid[i]) {
                grid[i] = 1;
                ++added;
            }
    }

    if (added) {
        r.mask = BinaryMask(meta, std::move(grid));
        r.outcome.changed = true;
        r.outcome.voxels_added = added;
    }
    return r;
}

SplitResult split_right_left(const BinaryMask& mask, int axis,
                             double merged_split_fraction, Connectivity conn) {
    if (mask.empty()) throw EmptyMask("split_right_left requires a non-empty mask");
    if (axis < 0 || axis > 2) throw OutOfBounds("axis must be 0, 1 or 2");

    const GridMeta& meta = mask.meta();
    const auto& data = mask.data();
    double coord_sum = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i)
        if (data[i]) coord_sum += meta.coords(i)[axis];
    const double midline = coord_sum / mask.foreground_count();

    const ComponentSet cs = label_components(mask, conn);
    const std::size_t total = mask.foreground_count();
    const double grid_center = (meta.dims[axis] - 1) / 2.0;

    // side[id]: +1 right, -1 left, 0 plane-split at the midline.
    std::vector<int> side(cs.count + 1, 0);
    for (int id = 1; id <= cs.count; ++id) {
        const ComponentStats& s = cs.stats[id - 1];
        const bool dominant =
            static_cast<double>(s.size) > merged_split_fraction * total;
        // A lone component defines the midline itself; use the grid center
        // to decide whether it straddles the body axis or sits on one side.
        const double span_ref = cs.count == 1 ? grid_center : midline;
        const bool spans =
            s.bbox_min[axis] <= span_ref && s.bbox_max[axis] >= span_ref;
        if (dominant && spans) {
            side[id] = 0;
        } else {
            const double ref = cs.count == 1 ? grid_center : midline;
            side[id] = s.centroid[axis] < ref ? +1 : -1;
        }
    }

    std::vector<std::uint8_t> right(meta.voxel_count(), 0);
    std::vector<std::uint8_t> left(meta.voxel_count(), 0);
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (!data[i]) continue;
        const int s = side[cs.label_grid[i]];
        if (s > 0 || (s == 0 && meta.coords(i)[axis] < midline))
            right[i] = 1;
        else
            left[i] = 1;
    }
    return SplitResult{BinaryMask(meta, std::move(right)),
                       BinaryMask(meta, std::move(left))};
}

LateralityResult reassign_left_right_based_on_liver(const BinaryMask& right,
                                                    const BinaryMask& left,
                                                    const BinaryMask& liver,
                                                    int axis) {
    LateralityResult r{right, left, {}};
    if (liver.empty()) {
        r.outcome.notes.push_back("liver missing; laterality check skipped");
        return r;
    }
    auto axis_centroid = [&](const BinaryMask& m) {
        double sum = 0.0;
        const auto& d = m.data();
        for (std::size_t i = 0; i < d.size(); ++i)
            if (d[i]) sum += m.meta().coords(i)[axis];
        return sum / m.foreground_count();
    };
    const double liver_c = axis_centroid(liver);
    const double inf = std::numeric_limits<double>::infinity();
    const double right_d =
        right.empty() ? inf : std::abs(axis_centroid(right) - liver_c);
    const double left_d =
        left.empty() ? inf : std::abs(axis_centroid(left) - liver_c);
    if (left_d < right_d) {
        std::swap(r.right, r.left);
        if (!(r.right == right)) {
            r.outcome.changed = true;
            r.outcome.voxels_relabeled =
                right.foreground_count() + left.foreground_count();
            r.outcome.notes.push_back("sides swapped (liver proximity)");
        }
    }
    return r;
}

} // namespace shapemend
