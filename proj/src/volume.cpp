#include "shapemend/volume.hpp"

#include <algorithm>
#include <set>

#include "shapemend/schema.hpp"

namespace shapemend {

void GridMeta::validate() const {
    for (int a = 0; a < 3; ++a) {
        if (dims[a] <= 0)
            throw DimensionMismatch("dims must be positive, got " +
                                    std::to_string(dims[a]) + " on axis " +
                                    std::to_string(a));
        if (!(spacing[a] > 0.0))
            throw DimensionMismatch("spacing must be positive on axis " +
                                    std::to_string(a));
    }
    for (int a = 0; a < 3; ++a)
        for (int b = a + 1; b < 3; ++b)
            if (orientation[a] != AxisCode::Unknown &&
                orientation[a] == orientation[b])
                throw DimensionMismatch("duplicate anatomical direction code");
}

int GridMeta::lateral_axis(int fallback) const {
    for (int a = 0; a < 3; ++a)
        if (orientation[a] == AxisCode::LeftRight) return a;
    return fallback;
}

LabelVolume::LabelVolume(GridMeta meta, std::vector<std::int32_t> data)
    : meta_(meta), data_(std::move(data)) {
    meta_.validate();
    if (data_.size() != meta_.voxel_count())
        throw DimensionMismatch("label data extent does not match dims");
    for (std::int32_t v : data_)
        if (v < 0) throw DimensionMismatch("negative label id");
}

BinaryMask::BinaryMask(GridMeta meta, std::vector<std::uint8_t> data)
    : meta_(meta), data_(std::move(data)) {
    meta_.validate();
    if (data_.size() != meta_.voxel_count())
        throw DimensionMismatch("mask data extent does not match dims");
    fg_count_ = 0;
    for (auto& v : data_) {
        if (v > 1) v = 1;
        fg_count_ += v;
    }
}

BinaryMask BinaryMask::zeros(const GridMeta& meta) {
    return BinaryMask(meta, std::vector<std::uint8_t>(meta.voxel_count(), 0));
}

SegmentationCase::SegmentationCase(
    std::string case_id, GridMeta meta,
    std::vector<std::pair<std::string, BinaryMask>> organs,
    std::string provenance, std::vector<std::int32_t> unmapped)
    : case_id_(std::move(case_id)),
      meta_(meta),
      organs_(std::move(organs)),
      provenance_(std::move(provenance)),
      unmapped_(std::move(unmapped)) {
    meta_.validate();
    if (!unmapped_.empty() && unmapped_.size() != meta_.voxel_count())
        throw DimensionMismatch("unmapped grid extent does not match dims");
    std::set<std::string> names;
    for (const auto& [name, mask] : organs_) {
        if (!names.insert(name).second)
            throw DimensionMismatch("duplicate organ key: " + name);
        if (!(mask.meta() == meta_))
            throw DimensionMismatch("organ " + name +
                                    " does not share the case grid");
    }
    // Disjointness is checked, not assumed.
    std::vector<const std::string*> owner(meta_.voxel_count(), nullptr);
    for (const auto& [name, mask] : organs_) {
        if (mask.empty()) continue;
        const auto& d = mask.data();
        for (std::size_t i = 0; i < d.size(); ++i) {
            if (!d[i]) continue;
            if (owner[i]) {
                const auto c = meta_.coords(i);
                throw OverlapConflict(
                    "voxel (" + std::to_string(c[0]) + "," + std::to_string(c[1]) +
                    "," + std::to_string(c[2]) + ") claimed by both " + *owner[i] +
                    " and " + name);
            }
            owner[i] = &name;
        }
    }
    if (!unmapped_.empty()) {
        for (std::size_t i = 0; i < unmapped_.size(); ++i)
            if (unmapped_[i] != 0 && owner[i])
                throw OverlapConflict("unmapped label overlaps organ " +
                                      *owner[i]);
    }
}

bool SegmentationCase::has_organ(const std::string& key) const {
    for (const auto& [name, mask] : organs_)
        if (name == key) return true;
    return false;
}

const BinaryMask& SegmentationCase::organ(const std::string& key) const {
    for (const auto& [name, mask] : organs_)
        if (name == key) return mask;
    throw UnknownOrgan("no organ mask for key: " + key);
}

SegmentationCase SegmentationCase::with_organ(const std::string& key,
                                              BinaryMask mask) const {
    return with_organs({{key, std::move(mask)}});
}

SegmentationCase SegmentationCase::with_organs(
    const std::vector<std::pair<std::string, BinaryMask>>& replacements) const {
    auto organs = organs_;
    for (const auto& [key, mask] : replacements) {
        bool found = false;
        for (auto& [name, existing] : organs) {
            if (name == key) {
                existing = mask;
                found = true;
                break;
            }
        }
        if (!found) throw UnknownOrgan("no organ mask for key: " + key);
    }
    return SegmentationCase(case_id_, meta_, std::move(organs), provenance_,
                            unmapped_);
}

std::size_t SegmentationCase::total_foreground() const {
    std::size_t n = 0;
    for (const auto& [name, mask] : organs_) n += mask.foreground_count();
    return n;
}

SegmentationCase decompose(const LabelVolume& volume, const OrganSchema& schema,
                           bool strict, const std::string& case_id,
                           const std::string& provenance) {
    const GridMeta& meta = volume.meta();
    const auto& keys = schema.case_keys();

    std::map<int, std::size_t> label_to_slot;
    for (std::size_t s = 0; s < keys.size(); ++s)
        label_to_slot[keys[s].label] = s;

    std::vector<std::vector<std::uint8_t>> grids(
        keys.size(), std::vector<std::uint8_t>(meta.voxel_count(), 0));
    std::vector<std::int32_t> unmapped;

    const auto& data = volume.data();
    for (std::size_t i = 0; i < data.size(); ++i) {
        const std::int32_t v = data[i];
        if (v == 0) continue;
        auto it = label_to_slot.find(v);
        if (it != label_to_slot.end()) {
            grids[it->second][i] = 1;
        } else if (strict) {
            throw UnknownLabel(v);
        } else {
            if (unmapped.empty()) unmapped.assign(meta.voxel_count(), 0);
            unmapped[i] = v;
        }
    }

    std::vector<std::pair<std::string, BinaryMask>> organs;
    organs.reserve(keys.size());
    for (std::size_t s = 0; s < keys.size(); ++s)
        organs.emplace_back(keys[s].key, BinaryMask(meta, std::move(grids[s])));
    return SegmentationCase(case_id, meta, std::move(organs), provenance,
                            std::move(unmapped));
}

LabelVolume recompose(const SegmentationCase& c, const OrganSchema& schema) {
    const GridMeta& meta = c.meta();
    std::vector<std::int32_t> out(meta.voxel_count(), 0);
    for (const auto& [key, mask] : c.organs()) {
        const CaseKey* ck = schema.find_key(key);
        if (!ck) throw UnknownOrgan("case key not in schema: " + key);
        const auto& d = mask.data();
        for (std::size_t i = 0; i < d.size(); ++i) {
            if (!d[i]) continue;
            if (out[i] != 0)
                throw OverlapConflict("recompose: voxel already labeled " +
                                      std::to_string(out[i]));
            out[i] = ck->label;
        }
    }
    if (!c.unmapped().empty()) {
        const auto& u = c.unmapped();
        for (std::size_t i = 0; i < u.size(); ++i) {
            if (u[i] == 0) continue;
            if (out[i] != 0)
                throw OverlapConflict("recompose: unmapped label collides");
            out[i] = u[i];
        }
    }
    return LabelVolume(meta, std::move(out));
}

} // namespace shapemend
