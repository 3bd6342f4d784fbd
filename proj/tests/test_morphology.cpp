#include "doctest.h"

#include <set>

#include "oracles.hpp"
#include "shapemend/errors.hpp"
#include "shapemend/morphology.hpp"

using namespace shapemend;

namespace {

std::set<std::set<std::size_t>> partition_of(const ComponentSet& cs) {
    std::set<std::set<std::size_t>> parts;
    std::map<std::int32_t, std::set<std::size_t>> by_id;
    for (std::size_t i = 0; i < cs.label_grid.size(); ++i)
        if (cs.label_grid[i] > 0) by_id[cs.label_grid[i]].insert(i);
    for (auto& [id, vox] : by_id) parts.insert(std::move(vox));
    return parts;
}

} // namespace

TEST_CASE("empty mask labels to zero components") {
    const BinaryMask m = oracle::empty_mask({4, 4, 4});
    const ComponentSet cs = label_components(m, Connectivity::Full26);
    CHECK(cs.count == 0);
    CHECK(cs.stats.empty());
}

TEST_CASE("diagonal cubes: one component under 26, two under 6") {
    BinaryMask m = oracle::empty_mask({5, 5, 5});
    oracle::stamp_box(m, {0, 0, 0}, {1, 1, 1});
    oracle::stamp_box(m, {2, 2, 2}, {3, 3, 3});
    CHECK(label_components(m, Connectivity::Full26).count == 1);
    CHECK(label_components(m, Connectivity::Faces6).count == 2);
}

TEST_CASE("labeling partition equals flood-fill oracle on random masks") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 30; ++trial) {
        const BinaryMask m = oracle::random_mask(rng, {20, 20, 20}, 0.25);
        for (int conn : {6, 18, 26}) {
            const ComponentSet cs =
                label_components(m, connectivity_from_int(conn));
            CHECK(partition_of(cs) == oracle::flood_fill_partition(m, conn));
        }
    }
}

TEST_CASE("component ids: descending size, row-major first-voxel tie-break") {
    BinaryMask m = oracle::empty_mask({10, 10, 10});
    oracle::stamp_box(m, {7, 7, 7}, {9, 9, 9}); // 27 voxels, later in scan
    oracle::stamp_box(m, {0, 0, 0}, {1, 1, 1}); // 8 voxels, first in scan
    oracle::stamp_box(m, {0, 5, 0}, {1, 6, 1}); // 8 voxels, second in scan
    const ComponentSet cs = label_components(m, Connectivity::Full26);
    REQUIRE(cs.count == 3);
    CHECK(cs.stats[0].size == 27);
    CHECK(cs.stats[1].first_voxel < cs.stats[2].first_voxel);
    CHECK(cs.stats[1].first_voxel == m.meta().index(0, 0, 0));
    // Sizes sum to the foreground count.
    std::size_t total = 0;
    for (const auto& s : cs.stats) total += s.size;
    CHECK(total == m.foreground_count());
}

TEST_CASE("component stats: single voxel and cube centroids") {
    BinaryMask single = oracle::empty_mask({8, 8, 8});
    oracle::stamp_box(single, {3, 4, 5}, {3, 4, 5});
    const ComponentSet cs1 = label_components(single, Connectivity::Full26);
    REQUIRE(cs1.count == 1);
    CHECK(cs1.stats[0].size == 1);
    CHECK(cs1.stats[0].centroid == std::array<double, 3>{3, 4, 5});

    BinaryMask cube = oracle::empty_mask({8, 8, 8}, {1, 1, 2.5});
    oracle::stamp_box(cube, {0, 0, 0}, {1, 1, 1});
    const ComponentSet cs2 = label_components(cube, Connectivity::Full26);
    REQUIRE(cs2.count == 1);
    CHECK(cs2.stats[0].size == 8);
    CHECK(cs2.stats[0].centroid[0] == doctest::Approx(0.5));
    CHECK(cs2.stats[0].centroid[2] == doctest::Approx(0.5));
    CHECK(cs2.stats[0].size_mm3 == doctest::Approx(20.0)); // 8 x 2.5 mm^3
}

TEST_CASE("min surface distance: exact values and empty-mask error") {
    BinaryMask a = oracle::empty_mask({8, 8, 8});
    oracle::stamp_box(a, {0, 0, 0}, {0, 0, 0});
    BinaryMask b = oracle::empty_mask({8, 8, 8});
    oracle::stamp_box(b, {3, 4, 0}, {3, 4, 0});
    CHECK(min_surface_distance(a, b) == doctest::Approx(5.0));

    BinaryMask a2 = oracle::empty_mask({8, 8, 8}, {2, 1, 1});
    oracle::stamp_box(a2, {0, 0, 0}, {0, 0, 0});
    BinaryMask b2 = oracle::empty_mask({8, 8, 8}, {2, 1, 1});
    oracle::stamp_box(b2, {3, 4, 0}, {3, 4, 0});
    CHECK(min_surface_distance(a2, b2) ==
          doctest::Approx(7.2111).epsilon(1e-4)); // |(6,4,0)|

    CHECK(min_surface_distance(a, a) == 0.0); // shared voxels
    CHECK_THROWS_AS(min_surface_distance(a, oracle::empty_mask({8, 8, 8})),
                    EmptyMask);
}

TEST_CASE("min surface distance matches all-pairs oracle and is symmetric") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const BinaryMask a = oracle::random_mask(rng, {9, 9, 9}, 0.05);
        const BinaryMask b = oracle::random_mask(rng, {9, 9, 9}, 0.05);
        if (a.empty() || b.empty()) continue;
        const double d = min_surface_distance(a, b);
        CHECK(d == doctest::Approx(oracle::all_pairs_min_distance(a, b)));
        CHECK(d == doctest::Approx(min_surface_distance(b, a)));
    }
}

TEST_CASE("bridge segment: degenerate, axis line, dilation, bounds") {
    GridMeta m;
    m.dims = {8, 8, 8};

    const BinaryMask point = bridge_segment(m, {2, 2, 2}, {2, 2, 2}, 0);
    CHECK(point.foreground_count() == 1);
    CHECK(point.at(m.index(2, 2, 2)));

    const BinaryMask line = bridge_segment(m, {0, 0, 0}, {5, 0, 0}, 0);
    CHECK(line.foreground_count() == 6);
    for (int i = 0; i <= 5; ++i) CHECK(line.at(m.index(i, 0, 0)));

    const BinaryMask fat = bridge_segment(m, {1, 2, 3}, {6, 5, 4}, 1);
    const BinaryMask thin = bridge_segment(m, {1, 2, 3}, {6, 5, 4}, 0);
    for (std::size_t i = 0; i < thin.data().size(); ++i)
        if (thin.at(i)) CHECK(fat.at(i));
    CHECK(label_components(fat, Connectivity::Full26).count == 1);
    CHECK(label_components(thin, Connectivity::Full26).count == 1);

    CHECK_THROWS_AS(bridge_segment(m, {0, 0, 0}, {8, 0, 0}, 0), OutOfBounds);
}

TEST_CASE("surface voxels: interior of a solid cube is excluded") {
    BinaryMask m = oracle::empty_mask({8, 8, 8});
    oracle::stamp_box(m, {1, 1, 1}, {5, 5, 5}); // 125 voxels, 27 interior
    CHECK(surface_voxels(m).size() == 125 - 27);

    // Grid-border voxels count as surface.
    BinaryMask full = oracle::empty_mask({3, 3, 3});
    oracle::stamp_box(full, {0, 0, 0}, {2, 2, 2});
    CHECK(surface_voxels(full).size() == 26); // all but the center voxel
}
