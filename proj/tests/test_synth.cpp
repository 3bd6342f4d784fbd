#include "doctest.h"

#include "oracles.hpp"
#include "shapemend/errors.hpp"
#include "shapemend/eval.hpp"
#include "shapemend/morphology.hpp"
#include "shapemend/pipeline.hpp"
#include "shapemend/synth.hpp"

using namespace shapemend;

TEST_CASE("same seed gives bit-identical phantoms") {
    const Phantom a = generate_phantom(7, {48, 48, 48});
    const Phantom b = generate_phantom(7, {48, 48, 48});
    CHECK(a.clean == b.clean);
    const Phantom c = generate_phantom(8, {48, 48, 48});
    CHECK_FALSE(a.clean == c.clean);
}

TEST_CASE("dims below 32 are rejected") {
    CHECK_THROWS_AS(generate_phantom(1, {16, 16, 16}), DimsTooSmall);
    CHECK_THROWS_AS(generate_phantom(1, {64, 64, 31}), DimsTooSmall);
}

TEST_CASE("clean phantom satisfies its own invariants") {
    const Phantom ph = generate_phantom(7, {64, 64, 64});
    double liver_c0 = -1;
    for (const auto& [key, mask] : ph.clean.organs()) {
        REQUIRE_FALSE(mask.empty());
        const ComponentSet cs = label_components(mask, Connectivity::Full26);
        CHECK(cs.count == 1); // one component per case key
        if (key == "liver") liver_c0 = cs.stats[0].centroid[0];
    }
    // Liver centroid strictly on the low half of the lateral axis.
    CHECK(liver_c0 < 63.0 / 2.0);
}

TEST_CASE("smallest supported grid still yields whole organs") {
    const Phantom ph = generate_phantom(3, {32, 32, 32});
    for (const auto& [key, mask] : ph.clean.organs()) {
        REQUIRE_FALSE(mask.empty());
        CHECK(label_components(mask, Connectivity::Full26).count == 1);
    }
}

TEST_CASE("empty recipe leaves the case equal to clean") {
    const Phantom ph = generate_phantom(2, {48, 48, 48});
    InjectionRecipe recipe;
    recipe.seed = 2;
    const SegmentationCase out = inject(ph, recipe);
    for (const auto& [key, mask] : ph.clean.organs())
        CHECK(out.organ(key) == mask);
}

TEST_CASE("artifact injection adds small isolated clusters only") {
    const Phantom ph = generate_phantom(9, {64, 64, 64});
    InjectionRecipe recipe;
    recipe.seed = 9;
    recipe.injections = {ArtifactInjection{5, 1, 5, "liver"}};
    const SegmentationCase out = inject(ph, recipe);

    // Difference mask = injected voxels only.
    auto diff = out.organ("liver").data();
    std::size_t extra = 0;
    for (std::size_t i = 0; i < diff.size(); ++i) {
        if (ph.clean.organ("liver").at(i)) diff[i] = 0;
        extra += diff[i];
    }
    const BinaryMask diff_mask(ph.clean.meta(), diff);
    const ComponentSet cs = label_components(diff_mask, Connectivity::Full26);
    CHECK(cs.count == 5);
    for (const auto& s : cs.stats) CHECK(s.size <= 5);
    CHECK(extra == diff_mask.foreground_count());
    // Clusters sit outside every clean organ.
    for (const auto& [key, mask] : ph.clean.organs())
        for (std::size_t i = 0; i < diff.size(); ++i)
            if (diff[i]) CHECK_FALSE(mask.at(i));
}

TEST_CASE("laterality swap exchanges exactly the side masks") {
    const Phantom ph = generate_phantom(12, {64, 64, 64});
    InjectionRecipe recipe;
    recipe.seed = 12;
    recipe.injections = {LateralitySwapInjection{"lung"}};
    const SegmentationCase out = inject(ph, recipe);
    CHECK(out.organ("lung_right") == ph.clean.organ("lung_left"));
    CHECK(out.organ("lung_left") == ph.clean.organ("lung_right"));

    // The default pipeline restores both sides exactly.
    const PipelineConfig cfg;
    const auto [fixed, rep] =
        process_case(out, compile_plan(reference_schema(), cfg), cfg);
    CHECK(dsc(fixed.organ("lung_right"), ph.clean.organ("lung_right")) == 1.0);
    CHECK(dsc(fixed.organ("lung_left"), ph.clean.organ("lung_left")) == 1.0);
}

TEST_CASE("fragment injection produces exactly one extra component") {
    const Phantom ph = generate_phantom(21, {64, 64, 64});
    InjectionRecipe recipe;
    recipe.seed = 21;
    recipe.injections = {FragmentInjection{"colon", 3}};
    const SegmentationCase out = inject(ph, recipe);
    CHECK(label_components(out.organ("colon"), Connectivity::Full26).count == 2);
}

TEST_CASE("infeasible recipes are rejected") {
    const Phantom ph = generate_phantom(4, {48, 48, 48});
    InjectionRecipe bad;
    bad.seed = 4;
    bad.injections = {LateralitySwapInjection{"liver"}}; // unpaired organ
    CHECK_THROWS_AS(inject(ph, bad), RecipeInfeasible);

    InjectionRecipe bad2;
    bad2.seed = 4;
    bad2.injections = {FalsePositiveInjection{"stomach", "nonexistent", 100}};
    CHECK_THROWS_AS(inject(ph, bad2), RecipeInfeasible);
}

TEST_CASE("recipe YAML round trip preserves every injection") {
    InjectionRecipe r;
    r.seed = 99;
    r.injections = {
        ArtifactInjection{3, 2, 9, "spleen"},
        FalsePositiveInjection{"stomach", "liver", 150},
        RedundantInjection{"lung_left", 700},
        FragmentInjection{"colon", 4},
        LateralitySwapInjection{"kidney"},
        LateralityMergeInjection{"lung"},
    };
    const InjectionRecipe back =
        InjectionRecipe::from_yaml_string(r.to_yaml());
    CHECK(back.seed == 99);
    REQUIRE(back.injections.size() == 6);
    CHECK(back.to_yaml() == r.to_yaml());

    // Replaying a parsed recipe yields a bit-identical corrupted case.
    const Phantom ph = generate_phantom(99, {64, 64, 64});
    CHECK(inject(ph, r) == inject(ph, back));
}

TEST_CASE("unknown injection type in YAML is a config error") {
    CHECK_THROWS_AS(InjectionRecipe::from_yaml_string(
                        "seed: 1\ninjections:\n  - type: wormhole\n"),
                    ConfigError);
}
