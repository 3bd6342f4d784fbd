#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "shapemend/schema.hpp"
#include "shapemend/volume.hpp"

namespace shapemend {

struct EllipsoidGeometry {
    std::array<double, 3> center; // voxel coordinates
    std::array<double, 3> radii;  // voxels
};

struct TubeGeometry {
    std::vector<std::array<double, 3>> path; // polyline, voxel coordinates
    double radius;                           // voxels
};

struct OrganGeometry {
    std::string key; // case key
    std::variant<EllipsoidGeometry, TubeGeometry> shape;
};

/// Error-free synthetic abdomen: ellipsoidal solid organs with the liver
/// on the anatomical right, paired lungs and kidneys, a midline pancreas
/// and a tubular colon.
struct Phantom {
    SegmentationCase clean;
    std::uint64_t seed = 0;
    std::vector<OrganGeometry> geometry;
};

/// Schema matching the phantom organ set; also shipped as
/// configs/reference_schema.yaml.
OrganSchema reference_schema();

Phantom generate_phantom(std::uint64_t seed, std::array<int, 3> dims,
                         std::array<double, 3> spacing = {1.0, 1.0, 1.0});

struct ArtifactInjection {
    int count = 5;
    int size_min = 1;
    int size_max = 20;
    std::string organ; // empty = seeded choice per cluster
};
struct FalsePositiveInjection {
    std::string source; // organ wrongly credited with the blob
    std::string target; // organ the blob is carved from
    int blob_size = 200;
};
struct RedundantInjection {
    std::string organ;
    int size = 600;
};
struct FragmentInjection {
    std::string organ;
    int gap_voxels = 3;
};
struct LateralitySwapInjection {
    std::string organ; // paired schema organ name
};
struct LateralityMergeInjection {
    std::string organ;
};

using Injection =
    std::variant<ArtifactInjection, FalsePositiveInjection, RedundantInjection,
                 FragmentInjection, LateralitySwapInjection,
                 LateralityMergeInjection>;

struct InjectionRecipe {
    std::uint64_t seed = 0;
    std::vector<Injection> injections;

    static InjectionRecipe from_yaml_file(const std::string& path);
    static InjectionRecipe from_yaml_string(const std::string& text);
    std::string to_yaml() const;
};

/// Replay a recipe deterministically against a phantom; the phantom's
/// clean case is the ground truth. Throws RecipeInfeasible.
SegmentationCase inject(const Phantom& phantom, const InjectionRecipe& recipe);

} // namespace shapemend
