#include "shapemend/morphology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace shapemend {

Connectivity connectivity_from_int(int v) {
    switch (v) {
        case 6: return Connectivity::Faces6;
        case 18: return Connectivity::Edges18;
        case 26: return Connectivity::Full26;
        default:
            throw ConfigError("connectivity must be 6, 18 or 26, got " +
                              std::to_string(v));
    }
}

const std::vector<std::array<int, 3>>& neighbor_offsets(Connectivity conn) {
    static const auto make = [](int max_manhattan) {
        std::vector<std::array<int, 3>> offs;
        for (int a = -1; a <= 1; ++a)
            for (int b = -1; b <= 1; ++b)
                for (int c = -1; c <= 1; ++c) {
                    const int m = std::abs(a) + std::abs(b) + std::abs(c);
                    if (m >= 1 && m <= max_manhattan) offs.push_back({a, b, c});
                }
        return offs;
    };
    static const std::vector<std::array<int, 3>> n6 = make(1);
    static const std::vector<std::array<int, 3>> n18 = make(2);
    static const std::vector<std::array<int, 3>> n26 = make(3);
    switch (conn) {
        case Connectivity::Faces6: return n6;
        case Connectivity::Edges18: return n18;
        default: return n26;
    }
}

std::vector<std::size_t> ComponentSet::component_voxels(int id) const {
    std::vector<std::size_t> out;
    if (id >= 1 && id <= count) out.reserve(stats[id - 1].size);
    for (std::size_t i = 0; i < label_grid.size(); ++i)
        if (label_grid[i] == id) out.push_back(i);
    return out;
}

BinaryMask ComponentSet::component_mask(int id) const {
    std::vector<std::uint8_t> d(label_grid.size(), 0);
    for (std::size_t i = 0; i < label_grid.size(); ++i)
        if (label_grid[i] == id) d[i] = 1;
    return BinaryMask(meta, std::move(d));
}

std::vector<ComponentStats> component_stats(
    const std::vector<std::int32_t>& label_grid, int count, const GridMeta& meta) {
    std::vector<ComponentStats> stats(count);
    for (auto& s : stats) {
        s.bbox_min = {meta.dims[0], meta.dims[1], meta.dims[2]};
        s.bbox_max = {-1, -1, -1};
        s.first_voxel = std::numeric_limits<std::size_t>::max();
    }
    std::vector<std::array<double, 3>> sums(count, {0, 0, 0});
    for (std::size_t i = 0; i < label_grid.size(); ++i) {
        const std::int32_t id = label_grid[i];
        if (id == 0) continue;
        ComponentStats& s = stats[id - 1];
        const auto c = meta.coords(i);
        if (s.size == 0) s.first_voxel = i;
        ++s.size;
        for (int a = 0; a < 3; ++a) {
            sums[id - 1][a] += c[a];
            s.bbox_min[a] = std::min(s.bbox_min[a], c[a]);
            s.bbox_max[a] = std::max(s.bbox_max[a], c[a]);
        }
    }
    for (int id = 0; id < count; ++id) {
        ComponentStats& s = stats[id];
        s.size_mm3 = static_cast<double>(s.size) * meta.voxel_volume_mm3();
        if (s.size)
            for (int a = 0; a < 3; ++a) s.centroid[a] = sums[id][a] / s.size;
    }
    return stats;
}

ComponentSet label_components(const BinaryMask& mask, Connectivity conn) {
    const GridMeta& meta = mask.meta();
    ComponentSet cs;
    cs.meta = meta;
    cs.label_grid.assign(meta.voxel_count(), 0);
    if (mask.empty()) return cs;

    const auto& data = mask.data();
    const auto& offs = neighbor_offsets(conn);
    const int d1 = meta.dims[1], d2 = meta.dims[2];
    std::vector<std::ptrdiff_t> strides;
    strides.reserve(offs.size());
    for (const auto& o : offs)
        strides.push_back((static_cast<std::ptrdiff_t>(o[0]) * d1 + o[1]) * d2 +
                          o[2]);

    std::vector<std::size_t> stack;
    std::int32_t next_id = 0;
    for (std::size_t seed = 0; seed < data.size(); ++seed) {
        if (!data[seed] || cs.label_grid[seed]) continue;
        const std::int32_t id = ++next_id;
        cs.label_grid[seed] = id;
        stack.push_back(seed);
        while (!stack.empty()) {
            const std::size_t cur = stack.back();
            stack.pop_back();
            const auto c = meta.coords(cur);
            for (std::size_t n = 0; n < offs.size(); ++n) {
                const int i = c[0] + offs[n][0];
                const int j = c[1] + offs[n][1];
                const int k = c[2] + offs[n][2];
                if (i < 0 || i >= meta.dims[0] || j < 0 || j >= d1 || k < 0 ||
                    k >= d2)
                    continue;
                const std::size_t ni = cur + strides[n];
                if (data[ni] && !cs.label_grid[ni]) {
                    cs.label_grid[ni] = id;
                    stack.push_back(ni);
                }
            }
        }
    }

    auto stats = component_stats(cs.label_grid, next_id, meta);
    // Reorder ids: descending size, ties by ascending first voxel. Discovery
    // order is already ascending first voxel, so a stable sort suffices.
    std::vector<int> order(next_id);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return stats[a].size > stats[b].size;
    });
    std::vector<std::int32_t> remap(next_id + 1, 0);
    cs.stats.resize(next_id);
    for (int rank = 0; rank < next_id; ++rank) {
        remap[order[rank] + 1] = rank + 1;
        cs.stats[rank] = stats[order[rank]];
    }
    for (auto& v : cs.label_grid) v = remap[v];
    cs.count = next_id;
    return cs;
}

std::vector<std::size_t> surface_voxels(const GridMeta& meta,
                                        const std::vector<std::uint8_t>& occupancy,
                                        const std::vector<std::size_t>& voxels) {
    std::vector<std::size_t> out;
    const int d1 = meta.dims[1], d2 = meta.dims[2];
    const std::ptrdiff_t stride0 = static_cast<std::ptrdiff_t>(d1) * d2;
    for (std::size_t idx : voxels) {
        const auto c = meta.coords(idx);
        bool surf = c[0] == 0 || c[0] == meta.dims[0] - 1 || c[1] == 0 ||
                    c[1] == d1 - 1 || c[2] == 0 || c[2] == d2 - 1;
        if (!surf)
            surf = !occupancy[idx - stride0] || !occupancy[idx + stride0] ||
                   !occupancy[idx - d2] || !occupancy[idx + d2] ||
                   !occupancy[idx - 1] || !occupancy[idx + 1];
        if (surf) out.push_back(idx);
    }
    return out;
}

std::vector<std::size_t> surface_voxels(const BinaryMask& mask) {
    std::vector<std::size_t> fg;
    fg.reserve(mask.foreground_count());
    const auto& d = mask.data();
    for (std::size_t i = 0; i < d.size(); ++i)
        if (d[i]) fg.push_back(i);
    return surface_voxels(mask.meta(), d, fg);
}

ClosestPair closest_pair(const GridMeta& meta, const std::vector<std::size_t>& a,
                         const std::vector<std::size_t>& b) {
    if (a.empty() || b.empty())
        throw EmptyMask("closest_pair requires non-empty voxel lists");
    const double sx = meta.spacing[0], sy = meta.spacing[1], sz = meta.spacing[2];
    std::vector<std::array<double, 3>> bp;
    bp.reserve(b.size());
    for (std::size_t idx : b) {
        const auto c = meta.coords(idx);
        bp.push_back({c[0] * sx, c[1] * sy, c[2] * sz});
    }
    ClosestPair best{a[0], b[0], std::numeric_limits<double>::infinity()};
    double best_sq = std::numeric_limits<double>::infinity();
    for (std::size_t ai : a) {
        const auto c = meta.coords(ai);
        const double px = c[0] * sx, py = c[1] * sy, pz = c[2] * sz;
        for (std::size_t bi = 0; bi < bp.size(); ++bi) {
            const double dx = px - bp[bi][0];
            const double dy = py - bp[bi][1];
            const double dz = pz - bp[bi][2];
            const double sq = dx * dx + dy * dy + dz * dz;
            if (sq < best_sq) {
                best_sq = sq;
                best = {ai, b[bi], 0.0};
                if (sq == 0.0) {
                    best.distance_mm = 0.0;
                    return best;
                }
            }
        }
    }
    best.distance_mm = std::sqrt(best_sq);
    return best;
}

double min_surface_distance(const BinaryMask& a, const BinaryMask& b) {
    if (a.empty() || b.empty())
        throw EmptyMask("min_surface_distance requires non-empty masks");
    if (!(a.meta() == b.meta()))
        throw DimensionMismatch("masks live on different grids");
    // Shared voxel => 0 without any pair search.
    const auto& da = a.data();
    const auto& db = b.data();
    for (std::size_t i = 0; i < da.size(); ++i)
        if (da[i] && db[i]) return 0.0;
    return closest_pair(a.meta(), surface_voxels(a), surface_voxels(b))
        .distance_mm;
}

namespace {

std::vector<std::array<int, 3>> bresenham3d(const std::array<int, 3>& p,
                                            const std::array<int, 3>& q) {
    std::vector<std::array<int, 3>> pts;
    std::array<int, 3> cur = p;
    const std::array<int, 3> d{std::abs(q[0] - p[0]), std::abs(q[1] - p[1]),
                               std::abs(q[2] - p[2])};
    const std::array<int, 3> s{q[0] > p[0] ? 1 : -1, q[1] > p[1] ? 1 : -1,
                               q[2] > p[2] ? 1 : -1};
    int axis = 0;
    if (d[1] >= d[0] && d[1] >= d[2]) axis = 1;
    else if (d[2] >= d[0] && d[2] >= d[1]) axis = 2;
    const int o1 = (axis + 1) % 3, o2 = (axis + 2) % 3;
    int e1 = 2 * d[o1] - d[axis];
    int e2 = 2 * d[o2] - d[axis];
    pts.push_back(cur);
    for (int step = 0; step < d[axis]; ++step) {
        if (e1 > 0) {
            cur[o1] += s[o1];
            e1 -= 2 * d[axis];
        }
        if (e2 > 0) {
            cur[o2] += s[o2];
            e2 -= 2 * d[axis];
        }
        e1 += 2 * d[o1];
        e2 += 2 * d[o2];
        cur[axis] += s[axis];
        pts.push_back(cur);
    }
    return pts;
}

} // namespace

BinaryMask bridge_segment(const GridMeta& meta, const std::array<int, 3>& p,
                          const std::array<int, 3>& q, int radius) {
    if (!meta.contains(p) || !meta.contains(q))
        throw OutOfBounds("bridge endpoints must lie inside the grid");
    if (radius < 0) throw OutOfBounds("bridge radius must be >= 0");

    std::vector<std::array<int, 3>> ball;
    for (int a = -radius; a <= radius; ++a)
        for (int b = -radius; b <= radius; ++b)
            for (int c = -radius; c <= radius; ++c)
                if (a * a + b * b + c * c <= radius * radius)
                    ball.push_back({a, b, c});

    std::vector<std::uint8_t> out(meta.voxel_count(), 0);
    for (const auto& pt : bresenham3d(p, q))
        for (const auto& o : ball) {
            const std::array<int, 3> v{pt[0] + o[0], pt[1] + o[1], pt[2] + o[2]};
            if (meta.contains(v)) out[meta.index(v[0], v[1], v[2])] = 1;
        }
    return BinaryMask(meta, std::move(out));
}

} // namespace shapemend
