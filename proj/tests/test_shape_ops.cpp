#include "doctest.h"

#include "oracles.hpp"
#include "shapemend/errors.hpp"
#include "shapemend/shape_ops.hpp"

using namespace shapemend;
using oracle::empty_mask;
using oracle::stamp_box;

namespace {
constexpr Connectivity C26 = Connectivity::Full26;

bool subset(const BinaryMask& small, const BinaryMask& big) {
    for (std::size_t i = 0; i < small.data().size(); ++i)
        if (small.at(i) && !big.at(i)) return false;
    return true;
}
} // namespace

TEST_CASE("remove_small_components") {
    SUBCASE("empty mask is a no-op") {
        const auto r = remove_small_components(empty_mask({6, 6, 6}), 10, C26);
        CHECK_FALSE(r.outcome.changed);
        CHECK(r.mask.empty());
    }
    SUBCASE("sizes {1000, 3} with threshold 10 drops the speck") {
        BinaryMask m = empty_mask({12, 12, 12});
        stamp_box(m, {0, 0, 0}, {9, 9, 9});   // 1000 voxels
        stamp_box(m, {11, 11, 9}, {11, 11, 11}); // 3 voxels
        const auto r = remove_small_components(m, 10, C26);
        CHECK(r.outcome.changed);
        CHECK(r.outcome.voxels_removed == 3);
        CHECK(r.mask.foreground_count() == 1000);
        CHECK(subset(r.mask, m));
        // Idempotent.
        const auto again = remove_small_components(r.mask, 10, C26);
        CHECK_FALSE(again.outcome.changed);
        CHECK(again.mask == r.mask);
    }
    SUBCASE("threshold 0 is vacuous and bit-identical") {
        std::mt19937_64 rng(3);
        const BinaryMask m = oracle::random_mask(rng, {10, 10, 10}, 0.2);
        const auto r = remove_small_components(m, 0, C26);
        CHECK_FALSE(r.outcome.changed);
        CHECK(r.mask == m);
    }
}

TEST_CASE("suppress_non_largest_components") {
    SUBCASE("single component is untouched") {
        BinaryMask m = empty_mask({8, 8, 8});
        stamp_box(m, {0, 0, 0}, {2, 2, 2});
        const auto r = suppress_non_largest_components(m, 2, C26);
        CHECK_FALSE(r.outcome.changed);
        CHECK(r.mask == m);
    }
    SUBCASE("sizes {500, 200, 50} with keep_top 2") {
        BinaryMask m = empty_mask({24, 24, 24});
        stamp_box(m, {0, 0, 0}, {4, 9, 9});    // 500
        stamp_box(m, {12, 0, 0}, {13, 9, 9});  // 200
        stamp_box(m, {20, 12, 12}, {21, 16, 16}); // 50
        const auto r = suppress_non_largest_components(m, 2, C26);
        CHECK(r.outcome.changed);
        CHECK(r.outcome.voxels_removed == 50);
        CHECK(r.mask.foreground_count() == 700);
    }
    SUBCASE("equal twins with keep_top 1: earlier scan-order component wins") {
        BinaryMask m = empty_mask({12, 12, 12});
        stamp_box(m, {0, 0, 0}, {3, 3, 3}); // first voxel (0,0,0)
        stamp_box(m, {8, 8, 8}, {11, 11, 11});
        const auto r = suppress_non_largest_components(m, 1, C26);
        CHECK(r.mask.foreground_count() == 64);
        CHECK(r.mask.at(m.meta().index(0, 0, 0)));
        CHECK_FALSE(r.mask.at(m.meta().index(8, 8, 8)));
    }
}

namespace {

/// Scene: organ A = dominant body + small satellite; organ B = body close
/// to the satellite. Distances verified against the all-pairs oracle.
SegmentationCase satellite_scene(int satellite_edge) {
    GridMeta meta;
    meta.dims = {48, 16, 16};
    BinaryMask a = empty_mask(meta.dims);
    stamp_box(a, {40, 0, 0}, {47, 9, 9}); // A body, 800 voxels
    stamp_box(a, {9, 0, 0},
              {9 + satellite_edge - 1, satellite_edge - 1,
               satellite_edge - 1});      // A satellite 2 mm from B
    BinaryMask b = empty_mask(meta.dims);
    stamp_box(b, {0, 0, 0}, {7, 9, 9});   // B body, 2 mm from satellite
    return SegmentationCase("scene", a.meta(), {{"a", a}, {"b", b}}, "memory");
}

} // namespace

TEST_CASE("reassign_false_positives") {
    const AdjacencyMap adj{{"a", {"b"}}, {"b", {"a"}}};

    SUBCASE("single-component organs never move") {
        GridMeta meta;
        meta.dims = {16, 16, 16};
        BinaryMask a = empty_mask(meta.dims);
        stamp_box(a, {0, 0, 0}, {3, 3, 3});
        BinaryMask b = empty_mask(meta.dims);
        stamp_box(b, {10, 10, 10}, {12, 12, 12});
        const SegmentationCase seg("s", a.meta(), {{"a", a}, {"b", b}},
                                   "memory");
        const auto r = reassign_false_positives(seg, adj, 500, C26);
        CHECK_FALSE(r.outcome.changed);
        CHECK(r.seg == seg);
    }
    SUBCASE("close small satellite moves to the adjacent organ") {
        const SegmentationCase seg = satellite_scene(5); // 125-voxel satellite
        const double to_b = min_surface_distance(
            BinaryMask(seg.meta(), [&] {
                auto g = seg.organ("a").data();
                for (std::size_t i = seg.meta().index(40, 0, 0); i < g.size();
                     ++i)
                    g[i] = 0; // satellite only
                return g;
            }()),
            seg.organ("b"));
        CHECK(to_b == doctest::Approx(2.0));

        const auto r = reassign_false_positives(seg, adj, 500, C26);
        CHECK(r.outcome.changed);
        CHECK(r.outcome.voxels_relabeled == 125);
        CHECK(r.seg.organ("a").foreground_count() == 800);
        CHECK(r.seg.organ("b").foreground_count() == 800 + 125);
        CHECK(r.seg.total_foreground() == seg.total_foreground());
    }
    SUBCASE("satellite at or above check_size_threshold stays") {
        const SegmentationCase seg = satellite_scene(9); // 729 >= 500
        const auto r = reassign_false_positives(seg, adj, 500, C26);
        CHECK_FALSE(r.outcome.changed);
        CHECK(r.seg == seg);
    }
    SUBCASE("foreground conservation on random scenes") {
        std::mt19937_64 rng(5);
        for (int trial = 0; trial < 25; ++trial) {
            const BinaryMask a = oracle::random_mask(rng, {12, 12, 12}, 0.10);
            auto bg = oracle::random_mask(rng, {12, 12, 12}, 0.10).data();
            for (std::size_t i = 0; i < bg.size(); ++i)
                if (a.at(i)) bg[i] = 0;
            const BinaryMask b(a.meta(), bg);
            const SegmentationCase seg("r", a.meta(), {{"a", a}, {"b", b}},
                                       "memory");
            const auto r = reassign_false_positives(seg, adj, 500, C26);
            CHECK(r.seg.total_foreground() == seg.total_foreground());
        }
    }
}

TEST_CASE("merge_fragmented_structure") {
    SUBCASE("single component is a no-op") {
        BinaryMask m = empty_mask({8, 8, 8});
        stamp_box(m, {0, 0, 0}, {2, 2, 2});
        const auto r = merge_fragmented_structure(m, 10.0, 1, C26);
        CHECK_FALSE(r.outcome.changed);
        CHECK(r.mask == m);
    }
    SUBCASE("two blobs 3 voxels apart bridge into one component") {
        BinaryMask m = empty_mask({16, 8, 8});
        stamp_box(m, {0, 0, 0}, {2, 2, 2});
        stamp_box(m, {6, 0, 0}, {8, 2, 2});
        const auto r = merge_fragmented_structure(m, 10.0, 1, C26);
        CHECK(r.outcome.changed);
        CHECK(label_components(r.mask, C26).count == 1);
        CHECK(subset(m, r.mask));
        CHECK(r.outcome.voxels_added ==
              r.mask.foreground_count() - m.foreground_count());
        // Idempotent at fixed parameters.
        const auto again = merge_fragmented_structure(r.mask, 10.0, 1, C26);
        CHECK_FALSE(again.outcome.changed);
    }
    SUBCASE("blobs beyond d_merge stay apart") {
        BinaryMask m = empty_mask({60, 8, 8});
        stamp_box(m, {0, 0, 0}, {2, 2, 2});
        stamp_box(m, {53, 0, 0}, {55, 2, 2}); // 50 voxels away
        const auto r = merge_fragmented_structure(m, 10.0, 1, C26);
        CHECK_FALSE(r.outcome.changed);
        CHECK(r.mask == m);
    }
}

TEST_CASE("split_right_left") {
    SUBCASE("single one-sided blob goes entirely right") {
        BinaryMask m = empty_mask({64, 8, 8});
        stamp_box(m, {2, 0, 0}, {6, 3, 3}); // low axis-0 coordinates
        const auto r = split_right_left(m, 0, 0.6, C26);
        CHECK(r.right == m);
        CHECK(r.left.empty());
    }
    SUBCASE("two blobs split by their own means") {
        BinaryMask m = empty_mask({64, 8, 8});
        stamp_box(m, {9, 0, 0}, {11, 2, 2});  // mean 10
        stamp_box(m, {49, 0, 0}, {51, 2, 2}); // mean 50
        const auto r = split_right_left(m, 0, 0.6, C26);
        CHECK(r.right.foreground_count() == 27);
        CHECK(r.left.foreground_count() == 27);
        CHECK(r.right.at(m.meta().index(10, 1, 1)));
        CHECK(r.left.at(m.meta().index(50, 1, 1)));
    }
    SUBCASE("merged slab is plane-split at the midline") {
        BinaryMask m = empty_mask({64, 8, 8});
        stamp_box(m, {0, 0, 0}, {63, 3, 3}); // spans the whole axis
        const auto r = split_right_left(m, 0, 0.6, C26);
        // Exact partition.
        CHECK(r.right.foreground_count() + r.left.foreground_count() ==
              m.foreground_count());
        for (std::size_t i = 0; i < m.data().size(); ++i) {
            CHECK(int(r.right.at(i)) + int(r.left.at(i)) == int(m.at(i)));
            if (r.right.at(i)) CHECK(m.meta().coords(i)[0] < 32);
            if (r.left.at(i)) CHECK(m.meta().coords(i)[0] >= 32);
        }
    }
    SUBCASE("empty mask is rejected") {
        CHECK_THROWS_AS(split_right_left(empty_mask({8, 8, 8}), 0, 0.6, C26),
                        EmptyMask);
    }
}

TEST_CASE("reassign_left_right_based_on_liver") {
    auto blob_at = [](int x) {
        BinaryMask m = empty_mask({64, 8, 8});
        stamp_box(m, {x - 1, 0, 0}, {x + 1, 2, 2});
        return m;
    };
    const BinaryMask liver = blob_at(10);

    SUBCASE("consistent sides are the identity") {
        const auto r =
            reassign_left_right_based_on_liver(blob_at(12), blob_at(50), liver, 0);
        CHECK_FALSE(r.outcome.changed);
        CHECK(r.right == blob_at(12));
        CHECK(r.left == blob_at(50));
    }
    SUBCASE("flipped sides swap, and only swap") {
        const auto r =
            reassign_left_right_based_on_liver(blob_at(50), blob_at(12), liver, 0);
        CHECK(r.outcome.changed);
        CHECK(r.right == blob_at(12)); // permutation property
        CHECK(r.left == blob_at(50));
    }
    SUBCASE("empty liver skips with a note") {
        const auto r = reassign_left_right_based_on_liver(
            blob_at(50), blob_at(12), empty_mask({64, 8, 8}), 0);
        CHECK_FALSE(r.outcome.changed);
        CHECK(r.right == blob_at(50));
        REQUIRE_FALSE(r.outcome.notes.empty());
        CHECK(r.outcome.notes[0].find("liver") != std::string::npos);
    }
}
