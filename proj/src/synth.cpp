#include "shapemend/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <queue>
#include <random>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "shapemend/morphology.hpp"

namespace shapemend {

OrganSchema reference_schema() {
    std::vector<OrganSpec> organs;
    auto solid = [](std::string name, int label,
                    std::vector<std::string> adjacency) {
        OrganSpec o;
        o.name = std::move(name);
        o.label = label;
        o.keep_top = 1;
        o.min_component_voxels = 50;
        o.adjacency = std::move(adjacency);
        return o;
    };
    organs.push_back(solid("liver", 1, {"stomach", "gall_bladder"}));
    organs.push_back(solid("spleen", 2, {"stomach"}));
    organs.push_back(solid("stomach", 3, {"liver", "spleen", "pancreas", "colon"}));
    organs.push_back(solid("gall_bladder", 4, {"liver"}));
    organs.push_back(solid("pancreas", 5, {"stomach", "colon"}));
    {
        OrganSpec colon;
        colon.name = "colon";
        colon.label = 6;
        colon.min_component_voxels = 50; // keep_top unbounded: elongated organ
        colon.mergeable = true;
        colon.adjacency = {"stomach", "pancreas"};
        organs.push_back(std::move(colon));
    }
    auto paired = [](std::string name, int right, int left) {
        OrganSpec o;
        o.name = std::move(name);
        o.paired = true;
        o.right_label = right;
        o.left_label = left;
        o.keep_top = 2;
        o.min_component_voxels = 50;
        return o;
    };
    organs.push_back(paired("lung", 7, 8));
    organs.push_back(paired("kidney", 9, 10));
    return OrganSchema(std::move(organs));
}

namespace {

using Rng = std::mt19937_64;

double jitter(Rng& rng, double amount) {
    return std::uniform_real_distribution<double>(-amount, amount)(rng);
}

struct Frac3 {
    double x, y, z;
};

EllipsoidGeometry ellipsoid(Rng& rng, const std::array<int, 3>& dims, Frac3 c,
                            Frac3 r) {
    const double scale =
        std::uniform_real_distribution<double>(0.97, 1.03)(rng);
    EllipsoidGeometry g;
    g.center = {(c.x + jitter(rng, 0.01)) * dims[0],
                (c.y + jitter(rng, 0.01)) * dims[1],
                (c.z + jitter(rng, 0.01)) * dims[2]};
    g.radii = {r.x * scale * dims[0], r.y * scale * dims[1],
               r.z * scale * dims[2]};
    return g;
}

void paint_ellipsoid(std::vector<std::uint8_t>& grid, const GridMeta& meta,
                     const EllipsoidGeometry& g) {
    const auto lo = [&](int a) {
        return std::max(0, static_cast<int>(std::floor(g.center[a] - g.radii[a])));
    };
    const auto hi = [&](int a) {
        return std::min(meta.dims[a] - 1,
                        static_cast<int>(std::ceil(g.center[a] + g.radii[a])));
    };
    for (int i = lo(0); i <= hi(0); ++i)
        for (int j = lo(1); j <= hi(1); ++j)
            for (int k = lo(2); k <= hi(2); ++k) {
                const double u = (i - g.center[0]) / g.radii[0];
                const double v = (j - g.center[1]) / g.radii[1];
                const double w = (k - g.center[2]) / g.radii[2];
                if (u * u + v * v + w * w <= 1.0)
                    grid[meta.index(i, j, k)] = 1;
            }
}

double dist_point_segment(const std::array<double, 3>& p,
                          const std::array<double, 3>& a,
                          const std::array<double, 3>& b) {
    std::array<double, 3> ab{b[0] - a[0], b[1] - a[1], b[2] - a[2]};
    std::array<double, 3> ap{p[0] - a[0], p[1] - a[1], p[2] - a[2]};
    const double len2 = ab[0] * ab[0] + ab[1] * ab[1] + ab[2] * ab[2];
    double t = len2 > 0 ? (ap[0] * ab[0] + ap[1] * ab[1] + ap[2] * ab[2]) / len2
                        : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double dx = p[0] - (a[0] + t * ab[0]);
    const double dy = p[1] - (a[1] + t * ab[1]);
    const double dz = p[2] - (a[2] + t * ab[2]);
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

void paint_tube(std::vector<std::uint8_t>& grid, const GridMeta& meta,
                const TubeGeometry& g) {
    double lo[3] = {1e9, 1e9, 1e9}, hi[3] = {-1e9, -1e9, -1e9};
    for (const auto& p : g.path)
        for (int a = 0; a < 3; ++a) {
            lo[a] = std::min(lo[a], p[a] - g.radius);
            hi[a] = std::max(hi[a], p[a] + g.radius);
        }
    for (int i = std::max(0, (int)std::floor(lo[0]));
         i <= std::min(meta.dims[0] - 1, (int)std::ceil(hi[0])); ++i)
        for (int j = std::max(0, (int)std::floor(lo[1]));
             j <= std::min(meta.dims[1] - 1, (int)std::ceil(hi[1])); ++j)
            for (int k = std::max(0, (int)std::floor(lo[2]));
                 k <= std::min(meta.dims[2] - 1, (int)std::ceil(hi[2])); ++k) {
                const std::array<double, 3> p{(double)i, (double)j, (double)k};
                for (std::size_t s = 0; s + 1 < g.path.size(); ++s)
                    if (dist_point_segment(p, g.path[s], g.path[s + 1]) <=
                        g.radius) {
                        grid[meta.index(i, j, k)] = 1;
                        break;
                    }
            }
}

} // namespace

Phantom generate_phantom(std::uint64_t seed, std::array<int, 3> dims,
                         std::array<double, 3> spacing) {
    for (int a = 0; a < 3; ++a)
        if (dims[a] < 32)
            throw DimsTooSmall("phantom dims must be >= 32 per axis");

    GridMeta meta;
    meta.dims = dims;
    meta.spacing = spacing;
    meta.orientation = {AxisCode::LeftRight, AxisCode::AnteriorPosterior,
                        AxisCode::SuperiorInferior};
    meta.validate();

    Rng rng(seed * 0x9E3779B97F4A7C15ULL + 1);
    Phantom ph;
    ph.seed = seed;

    std::vector<std::pair<std::string, BinaryMask>> organs;
    std::vector<std::uint8_t> occupancy(meta.voxel_count(), 0);

    auto add = [&](const std::string& key, OrganGeometry geom) {
        std::vector<std::uint8_t> grid(meta.voxel_count(), 0);
        if (auto* e = std::get_if<EllipsoidGeometry>(&geom.shape))
            paint_ellipsoid(grid, meta, *e);
        else
            paint_tube(grid, meta, std::get<TubeGeometry>(geom.shape));
        for (std::size_t i = 0; i < grid.size(); ++i)
            if (grid[i]) {
                if (occupancy[i])
                    throw RecipeInfeasible("phantom geometry overlap at organ " +
                                           key);
                occupancy[i] = 1;
            }
        geom.key = key;
        ph.geometry.push_back(geom);
        organs.emplace_back(key, BinaryMask(meta, std::move(grid)));
    };

    auto E = [&](Frac3 c, Frac3 r) {
        OrganGeometry g;
        g.shape = ellipsoid(rng, dims, c, r);
        return g;
    };

    add("liver", E({0.28, 0.45, 0.52}, {0.15, 0.17, 0.09}));
    add("spleen", E({0.76, 0.45, 0.52}, {0.08, 0.09, 0.07}));
    add("stomach", E({0.55, 0.40, 0.54}, {0.07, 0.08, 0.07}));
    add("gall_bladder", E({0.30, 0.72, 0.52}, {0.05, 0.05, 0.05}));
    add("pancreas", E({0.50, 0.55, 0.30}, {0.17, 0.05, 0.04}));
    {
        OrganGeometry g;
        TubeGeometry tube;
        const double z = (0.12 + jitter(rng, 0.005)) * dims[2];
        tube.path = {{0.25 * dims[0], 0.30 * dims[1], z},
                     {0.25 * dims[0], 0.70 * dims[1], z},
                     {0.75 * dims[0], 0.70 * dims[1], z},
                     {0.75 * dims[0], 0.30 * dims[1], z}};
        tube.radius = 0.045 * std::min({dims[0], dims[1], dims[2]});
        g.shape = std::move(tube);
        add("colon", g);
    }
    add("lung_right", E({0.27, 0.45, 0.80}, {0.12, 0.14, 0.12}));
    add("lung_left", E({0.73, 0.45, 0.80}, {0.12, 0.14, 0.12}));
    add("kidney_right", E({0.28, 0.72, 0.30}, {0.05, 0.06, 0.08}));
    add("kidney_left", E({0.72, 0.72, 0.30}, {0.05, 0.06, 0.08}));

    // Case key order must follow the schema expansion.
    const OrganSchema schema = reference_schema();
    std::vector<std::pair<std::string, BinaryMask>> ordered;
    for (const CaseKey& k : schema.case_keys()) {
        auto it = std::find_if(organs.begin(), organs.end(),
                               [&](const auto& p) { return p.first == k.key; });
        ordered.push_back(std::move(*it));
    }

    ph.clean = SegmentationCase("phantom-" + std::to_string(seed), meta,
                                std::move(ordered), "synthetic");
    return ph;
}

// ---------------------------------------------------------------------------
// Injection

namespace {

struct InjectState {
    GridMeta meta;
    std::map<std::string, std::vector<std::uint8_t>> grids; // per case key
    std::vector<std::uint8_t> occupancy;
    Rng rng;
};

/// Deterministic quasi-spherical blob of `size` background voxels at least
/// `margin` voxels (Chebyshev) clear of all current foreground.
std::vector<std::size_t> place_blob(InjectState& st, int size, int margin,
                                    const char* what) {
    const int radius_bound = static_cast<int>(std::ceil(
                                 std::cbrt(size * 3.0 / (4.0 * 3.14159)))) +
                             1;
    for (int attempt = 0; attempt < 10000; ++attempt) {
        std::array<int, 3> c;
        bool fits = true;
        for (int a = 0; a < 3; ++a) {
            if (st.meta.dims[a] <= 2 * radius_bound) {
                fits = false;
                break;
            }
            c[a] = std::uniform_int_distribution<int>(
                radius_bound, st.meta.dims[a] - 1 - radius_bound)(st.rng);
        }
        if (!fits) break;
        // Ball prefix by distance from the center: connected for any size.
        std::vector<std::pair<double, std::size_t>> cand;
        for (int i = c[0] - radius_bound; i <= c[0] + radius_bound; ++i)
            for (int j = c[1] - radius_bound; j <= c[1] + radius_bound; ++j)
                for (int k = c[2] - radius_bound; k <= c[2] + radius_bound; ++k) {
                    const double d2 = double(i - c[0]) * (i - c[0]) +
                                      double(j - c[1]) * (j - c[1]) +
                                      double(k - c[2]) * (k - c[2]);
                    cand.emplace_back(d2, st.meta.index(i, j, k));
                }
        std::sort(cand.begin(), cand.end());
        if (static_cast<int>(cand.size()) < size) continue;
        std::vector<std::size_t> out;
        out.reserve(size);
        for (int n = 0; n < size; ++n) out.push_back(cand[n].second);
        // Clearance check around the voxels actually taken.
        bool clear = true;
        for (std::size_t idx : out) {
            const auto v = st.meta.coords(idx);
            for (int i = std::max(0, v[0] - margin);
                 clear && i <= std::min(st.meta.dims[0] - 1, v[0] + margin); ++i)
                for (int j = std::max(0, v[1] - margin);
                     clear && j <= std::min(st.meta.dims[1] - 1, v[1] + margin);
                     ++j)
                    for (int k = std::max(0, v[2] - margin);
                         k <= std::min(st.meta.dims[2] - 1, v[2] + margin); ++k)
                        if (st.occupancy[st.meta.index(i, j, k)]) {
                            clear = false;
                            break;
                        }
            if (!clear) break;
        }
        if (clear) return out;
    }
    throw RecipeInfeasible(std::string("no room to place ") + what);
}

void claim(InjectState& st, const std::string& key,
           const std::vector<std::size_t>& voxels) {
    auto& g = st.grids.at(key);
    for (std::size_t idx : voxels) {
        g[idx] = 1;
        st.occupancy[idx] = 1;
    }
}

std::array<double, 3> grid_centroid(const GridMeta& meta,
                                    const std::vector<std::uint8_t>& grid) {
    std::array<double, 3> sum{0, 0, 0};
    std::size_t n = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!grid[i]) continue;
        const auto c = meta.coords(i);
        for (int a = 0; a < 3; ++a) sum[a] += c[a];
        ++n;
    }
    if (n) for (int a = 0; a < 3; ++a) sum[a] /= n;
    return sum;
}

int components_of(const GridMeta& meta, const std::vector<std::uint8_t>& grid) {
    return label_components(BinaryMask(meta, grid), Connectivity::Full26).count;
}

void apply_artifact(InjectState& st, const ArtifactInjection& inj,
                    const std::vector<std::string>& keys) {
    if (inj.count < 0 || inj.size_min < 1 || inj.size_max < inj.size_min)
        throw RecipeInfeasible("bad artifact parameters");
    for (int n = 0; n < inj.count; ++n) {
        const int size = std::uniform_int_distribution<int>(
            inj.size_min, inj.size_max)(st.rng);
        std::string organ = inj.organ;
        if (organ.empty())
            organ = keys[std::uniform_int_distribution<std::size_t>(
                0, keys.size() - 1)(st.rng)];
        if (!st.grids.count(organ))
            throw RecipeInfeasible("artifact organ not in case: " + organ);
        claim(st, organ, place_blob(st, size, 3, "artifact cluster"));
    }
}

void apply_false_positive(InjectState& st, const FalsePositiveInjection& inj) {
    auto src = st.grids.find(inj.source);
    auto tgt = st.grids.find(inj.target);
    if (src == st.grids.end() || tgt == st.grids.end())
        throw RecipeInfeasible("false_positive organs not in case");
    if (inj.blob_size < 1) throw RecipeInfeasible("blob_size must be >= 1");

    std::vector<std::size_t> tgt_vox;
    for (std::size_t i = 0; i < tgt->second.size(); ++i)
        if (tgt->second[i]) tgt_vox.push_back(i);
    if (static_cast<int>(tgt_vox.size()) <= inj.blob_size * 2)
        throw RecipeInfeasible("target too small for blob carve");

    // Seed the carve on the target surface voxel facing the source body.
    const auto src_c = grid_centroid(st.meta, src->second);
    auto surf = surface_voxels(st.meta, tgt->second, tgt_vox);
    std::size_t seed_vox = surf[0];
    double best = 1e18;
    for (std::size_t idx : surf) {
        const auto c = st.meta.coords(idx);
        const double dx = c[0] - src_c[0], dy = c[1] - src_c[1],
                     dz = c[2] - src_c[2];
        const double d2 = dx * dx + dy * dy + dz * dz;
        if (d2 < best) {
            best = d2;
            seed_vox = idx;
        }
    }

    // Grow the blob inside the target, nearest-to-seed first, staying
    // connected (priority flood from the seed).
    const auto sc = st.meta.coords(seed_vox);
    using Entry = std::pair<double, std::size_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> pq;
    std::vector<std::uint8_t> seen(st.meta.voxel_count(), 0);
    pq.push({0.0, seed_vox});
    seen[seed_vox] = 1;
    std::vector<std::size_t> blob;
    const auto& offs = neighbor_offsets(Connectivity::Faces6);
    while (!pq.empty() && static_cast<int>(blob.size()) < inj.blob_size) {
        const auto [d, idx] = pq.top();
        pq.pop();
        blob.push_back(idx);
        const auto c = st.meta.coords(idx);
        for (const auto& o : offs) {
            const std::array<int, 3> v{c[0] + o[0], c[1] + o[1], c[2] + o[2]};
            if (!st.meta.contains(v)) continue;
            const std::size_t ni = st.meta.index(v[0], v[1], v[2]);
            if (seen[ni] || !tgt->second[ni]) continue;
            seen[ni] = 1;
            const double dx = v[0] - sc[0], dy = v[1] - sc[1], dz = v[2] - sc[2];
            pq.push({dx * dx + dy * dy + dz * dz, ni});
        }
    }
    if (static_cast<int>(blob.size()) < inj.blob_size)
        throw RecipeInfeasible("could not carve a connected blob");

    auto remaining = tgt->second;
    for (std::size_t idx : blob) remaining[idx] = 0;
    // The ragged carve boundary can orphan a few voxels from the target
    // body; fold such slivers into the blob so the target stays whole.
    const ComponentSet rem =
        label_components(BinaryMask(st.meta, remaining), Connectivity::Full26);
    if (rem.count == 0)
        throw RecipeInfeasible("carve would consume the target organ");
    for (std::size_t i = 0; i < remaining.size(); ++i)
        if (rem.label_grid[i] > 1) {
            remaining[i] = 0;
            blob.push_back(i);
        }

    tgt->second = std::move(remaining);
    for (std::size_t idx : blob) src->second[idx] = 1; // occupancy unchanged
}

void apply_redundant(InjectState& st, const RedundantInjection& inj) {
    if (!st.grids.count(inj.organ))
        throw RecipeInfeasible("redundant organ not in case: " + inj.organ);
    if (inj.size < 1) throw RecipeInfeasible("redundant size must be >= 1");
    claim(st, inj.organ, place_blob(st, inj.size, 3, "redundant lobe"));
}

void apply_fragment(InjectState& st, const FragmentInjection& inj) {
    auto it = st.grids.find(inj.organ);
    if (it == st.grids.end())
        throw RecipeInfeasible("fragment organ not in case: " + inj.organ);
    if (inj.gap_voxels < 1) throw RecipeInfeasible("gap must be >= 1");

    const ComponentSet cs =
        label_components(BinaryMask(st.meta, it->second), Connectivity::Full26);
    if (cs.count < 1) throw RecipeInfeasible("fragment organ is empty");
    const ComponentStats& dom = cs.stats[0];
    int axis = 0;
    int extent = -1;
    for (int a = 0; a < 3; ++a) {
        const int e = dom.bbox_max[a] - dom.bbox_min[a];
        if (e > extent) {
            extent = e;
            axis = a;
        }
    }
    const int center = static_cast<int>(std::lround(dom.centroid[axis]));
    for (int shift : {0, 1, -1, 2, -2, 3, -3}) {
        const int cut = center + shift;
        // Erase the slab from the dominant component only: satellites from
        // earlier injections must not influence the cut.
        auto dom_grid = std::vector<std::uint8_t>(st.meta.voxel_count(), 0);
        auto grid = it->second;
        std::size_t erased = 0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (cs.label_grid[i] != 1) continue;
            dom_grid[i] = 1;
            const int c = st.meta.coords(i)[axis];
            if (c >= cut && c < cut + inj.gap_voxels) {
                grid[i] = 0;
                dom_grid[i] = 0;
                ++erased;
            }
        }
        if (!erased) continue;
        // Erode the rim of both cut faces so the mutually closest voxel pair
        // across the gap lies on the organ's medial axis; a thin bridge laid
        // between interior face voxels then stays inside the original organ.
        const auto& pre = it->second;
        auto fg = [&](const std::array<int, 3>& v) {
            for (int a = 0; a < 3; ++a)
                if (v[a] < 0 || v[a] >= st.meta.dims[a]) return false;
            return pre[st.meta.index(v[0], v[1], v[2])] != 0;
        };
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (!dom_grid[i]) continue;
            const auto v = st.meta.coords(i);
            if (v[axis] != cut - 1 && v[axis] != cut + inj.gap_voxels) continue;
            bool rim = false;
            for (int a = 0; a < 3 && !rim; ++a)
                for (int s : {-1, 1}) {
                    auto nb = v;
                    nb[a] += s;
                    if (!fg(nb)) {
                        rim = true;
                        break;
                    }
                }
            if (rim) {
                grid[i] = 0;
                dom_grid[i] = 0;
            }
        }
        const ComponentSet pieces =
            label_components(BinaryMask(st.meta, dom_grid), Connectivity::Full26);
        if (pieces.count == 2 && pieces.stats.back().size >= 50) {
            for (std::size_t i = 0; i < grid.size(); ++i)
                if (it->second[i] && !grid[i]) st.occupancy[i] = 0;
            it->second = std::move(grid);
            return;
        }
    }
    throw RecipeInfeasible("no cut position fragments organ " + inj.organ);
}

void apply_swap(InjectState& st, const std::string& organ) {
    auto r = st.grids.find(organ + "_right");
    auto l = st.grids.find(organ + "_left");
    if (r == st.grids.end() || l == st.grids.end())
        throw RecipeInfeasible("laterality injection needs a paired organ: " +
                               organ);
    std::swap(r->second, l->second);
}

void apply_merge_sides(InjectState& st, const std::string& organ) {
    auto r = st.grids.find(organ + "_right");
    auto l = st.grids.find(organ + "_left");
    if (r == st.grids.end() || l == st.grids.end())
        throw RecipeInfeasible("laterality injection needs a paired organ: " +
                               organ);
    for (std::size_t i = 0; i < r->second.size(); ++i) {
        r->second[i] |= l->second[i];
        l->second[i] = 0;
    }
}

} // namespace

SegmentationCase inject(const Phantom& phantom, const InjectionRecipe& recipe) {
    InjectState st{phantom.clean.meta(), {}, {}, Rng(recipe.seed * 31 + 7)};
    st.occupancy.assign(st.meta.voxel_count(), 0);
    std::vector<std::string> keys;
    for (const auto& [key, mask] : phantom.clean.organs()) {
        st.grids[key] = mask.data();
        keys.push_back(key);
        const auto& d = mask.data();
        for (std::size_t i = 0; i < d.size(); ++i)
            if (d[i]) st.occupancy[i] = 1;
    }

    for (const Injection& inj : recipe.injections) {
        std::visit(
            [&](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, ArtifactInjection>)
                    apply_artifact(st, v, keys);
                else if constexpr (std::is_same_v<T, FalsePositiveInjection>)
                    apply_false_positive(st, v);
                else if constexpr (std::is_same_v<T, RedundantInjection>)
                    apply_redundant(st, v);
                else if constexpr (std::is_same_v<T, FragmentInjection>)
                    apply_fragment(st, v);
                else if constexpr (std::is_same_v<T, LateralitySwapInjection>)
                    apply_swap(st, v.organ);
                else
                    apply_merge_sides(st, v.organ);
            },
            inj);
    }

    std::vector<std::pair<std::string, BinaryMask>> organs;
    for (const std::string& key : keys)
        organs.emplace_back(key,
                            BinaryMask(st.meta, std::move(st.grids.at(key))));
    return SegmentationCase(phantom.clean.case_id() + "-corrupted", st.meta,
                            std::move(organs), "synthetic");
}

// ---------------------------------------------------------------------------
// Recipe YAML

InjectionRecipe InjectionRecipe::from_yaml_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open recipe file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return from_yaml_string(buf.str());
}

InjectionRecipe InjectionRecipe::from_yaml_string(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("recipe YAML parse error: ") + e.what());
    }
    InjectionRecipe r;
    r.seed = root["seed"].as<std::uint64_t>(0);
    if (root["injections"])
        for (const auto& n : root["injections"]) {
            const auto type = n["type"].as<std::string>();
            if (type == "artifact") {
                ArtifactInjection a;
                a.count = n["count"].as<int>(a.count);
                a.size_min = n["size_min"].as<int>(a.size_min);
                a.size_max = n["size_max"].as<int>(a.size_max);
                a.organ = n["organ"].as<std::string>("");
                r.injections.push_back(a);
            } else if (type == "false_positive") {
                FalsePositiveInjection f;
                f.source = n["source"].as<std::string>();
                f.target = n["target"].as<std::string>();
                f.blob_size = n["blob_size"].as<int>(f.blob_size);
                r.injections.push_back(f);
            } else if (type == "redundant") {
                RedundantInjection d;
                d.organ = n["organ"].as<std::string>();
                d.size = n["size"].as<int>(d.size);
                r.injections.push_back(d);
            } else if (type == "fragment") {
                FragmentInjection f;
                f.organ = n["organ"].as<std::string>();
                f.gap_voxels = n["gap_voxels"].as<int>(f.gap_voxels);
                r.injections.push_back(f);
            } else if (type == "laterality_swap") {
                r.injections.push_back(
                    LateralitySwapInjection{n["organ"].as<std::string>()});
            } else if (type == "laterality_merge") {
                r.injections.push_back(
                    LateralityMergeInjection{n["organ"].as<std::string>()});
            } else {
                throw ConfigError("unknown injection type: " + type);
            }
        }
    return r;
}

std::string InjectionRecipe::to_yaml() const {
    YAML::Emitter out;
    out << YAML::BeginMap;
    out << YAML::Key << "seed" << YAML::Value << seed;
    out << YAML::Key << "injections" << YAML::Value << YAML::BeginSeq;
    for (const Injection& inj : injections) {
        out << YAML::BeginMap;
        std::visit(
            [&](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, ArtifactInjection>) {
                    out << YAML::Key << "type" << YAML::Value << "artifact";
                    out << YAML::Key << "count" << YAML::Value << v.count;
                    out << YAML::Key << "size_min" << YAML::Value << v.size_min;
                    out << YAML::Key << "size_max" << YAML::Value << v.size_max;
                    if (!v.organ.empty())
                        out << YAML::Key << "organ" << YAML::Value << v.organ;
                } else if constexpr (std::is_same_v<T, FalsePositiveInjection>) {
                    out << YAML::Key << "type" << YAML::Value << "false_positive";
                    out << YAML::Key << "source" << YAML::Value << v.source;
                    out << YAML::Key << "target" << YAML::Value << v.target;
                    out << YAML::Key << "blob_size" << YAML::Value << v.blob_size;
                } else if constexpr (std::is_same_v<T, RedundantInjection>) {
                    out << YAML::Key << "type" << YAML::Value << "redundant";
                    out << YAML::Key << "organ" << YAML::Value << v.organ;
                    out << YAML::Key << "size" << YAML::Value << v.size;
                } else if constexpr (std::is_same_v<T, FragmentInjection>) {
                    out << YAML::Key << "type" << YAML::Value << "fragment";
                    out << YAML::Key << "organ" << YAML::Value << v.organ;
                    out << YAML::Key << "gap_voxels" << YAML::Value
                        << v.gap_voxels;
                } else if constexpr (std::is_same_v<T,
                                                    LateralitySwapInjection>) {
                    out << YAML::Key << "type" << YAML::Value
                        << "laterality_swap";
                    out << YAML::Key << "organ" << YAML::Value << v.organ;
                } else {
                    out << YAML::Key << "type" << YAML::Value
                        << "laterality_merge";
                    out << YAML::Key << "organ" << YAML::Value << v.organ;
                }
            },
            inj);
        out << YAML::EndMap;
    }
    out << YAML::EndSeq << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

} // namespace shapemend
