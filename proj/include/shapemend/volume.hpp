#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "shapemend/errors.hpp"

namespace shapemend {

/// Anatomical direction carried by a voxel axis, when known.
enum class AxisCode : std::uint8_t {
    Unknown = 0,
    LeftRight,
    AnteriorPosterior,
    SuperiorInferior,
};

/// Grid geometry shared by every voxel container: extent, physical voxel
/// size in mm, and the anatomical meaning of each axis.
struct GridMeta {
    std::array<int, 3> dims{0, 0, 0};
    std::array<double, 3> spacing{1.0, 1.0, 1.0};
    std::array<AxisCode, 3> orientation{AxisCode::Unknown, AxisCode::Unknown,
                                        AxisCode::Unknown};

    void validate() const;

    std::size_t voxel_count() const {
        return static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
    }
    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(i) * dims[1] + j) * dims[2] + k;
    }
    std::array<int, 3> coords(std::size_t idx) const {
        const int k = static_cast<int>(idx % dims[2]);
        const std::size_t r = idx / dims[2];
        return {static_cast<int>(r / dims[1]), static_cast<int>(r % dims[1]), k};
    }
    bool contains(const std::array<int, 3>& p) const {
        return p[0] >= 0 && p[0] < dims[0] && p[1] >= 0 && p[1] < dims[1] &&
               p[2] >= 0 && p[2] < dims[2];
    }
    double voxel_volume_mm3() const { return spacing[0] * spacing[1] * spacing[2]; }

    /// Axis carrying the left-right code; `fallback` when no axis does.
    int lateral_axis(int fallback) const;

    bool operator==(const GridMeta&) const = default;
};

/// Dense 3-D grid of non-negative integer label ids, 0 = background.
class LabelVolume {
  public:
    LabelVolume(GridMeta meta, std::vector<std::int32_t> data);

    const GridMeta& meta() const { return meta_; }
    const std::vector<std::int32_t>& data() const { return data_; }
    std::int32_t at(std::size_t idx) const { return data_[idx]; }

    bool operator==(const LabelVolume&) const = default;

  private:
    GridMeta meta_;
    std::vector<std::int32_t> data_;
};

/// Dense 3-D boolean grid for a single organ; foreground count is cached.
class BinaryMask {
  public:
    BinaryMask() = default;
    BinaryMask(GridMeta meta, std::vector<std::uint8_t> data);
    static BinaryMask zeros(const GridMeta& meta);

    const GridMeta& meta() const { return meta_; }
    const std::vector<std::uint8_t>& data() const { return data_; }
    bool at(std::size_t idx) const { return data_[idx] != 0; }
    std::size_t foreground_count() const { return fg_count_; }
    bool empty() const { return fg_count_ == 0; }

    bool same_grid(const BinaryMask& other) const { return meta_ == other.meta_; }
    bool operator==(const BinaryMask&) const = default;

  private:
    GridMeta meta_;
    std::vector<std::uint8_t> data_;
    std::size_t fg_count_ = 0;
};

class OrganSchema; // schema.hpp

/// Organ-wise view of a multi-label volume. Masks are pairwise disjoint;
/// this is verified at construction, not assumed.
class SegmentationCase {
  public:
    SegmentationCase() = default; // empty case, no grid
    SegmentationCase(std::string case_id, GridMeta meta,
                     std::vector<std::pair<std::string, BinaryMask>> organs,
                     std::string provenance,
                     std::vector<std::int32_t> unmapped = {});

    const std::string& case_id() const { return case_id_; }
    const GridMeta& meta() const { return meta_; }
    const std::string& provenance() const { return provenance_; }
    const std::vector<std::pair<std::string, BinaryMask>>& organs() const {
        return organs_;
    }
    /// Labels that were outside the schema (non-strict decompose); empty
    /// grid means none.
    const std::vector<std::int32_t>& unmapped() const { return unmapped_; }

    bool has_organ(const std::string& key) const;
    const BinaryMask& organ(const std::string& key) const;
    SegmentationCase with_organ(const std::string& key, BinaryMask mask) const;
    SegmentationCase with_organs(
        const std::vector<std::pair<std::string, BinaryMask>>& replacements) const;

    std::size_t total_foreground() const;
    bool operator==(const SegmentationCase&) const = default;

  private:
    std::string case_id_;
    GridMeta meta_;
    std::vector<std::pair<std::string, BinaryMask>> organs_;
    std::string provenance_;
    std::vector<std::int32_t> unmapped_;
};

/// One binary mask per schema organ (paired organs yield `<name>_right`
/// and `<name>_left` entries). Unknown labels are rejected in strict mode
/// and preserved under the case's unmapped grid otherwise.
SegmentationCase decompose(const LabelVolume& volume, const OrganSchema& schema,
                           bool strict, const std::string& case_id = "case",
                           const std::string& provenance = "memory");

/// Inverse of decompose: each voxel gets the label of the unique organ
/// covering it, else 0 (plus any preserved unmapped labels).
LabelVolume recompose(const SegmentationCase& c, const OrganSchema& schema);

} // namespace shapemend
