#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "shapemend/eval.hpp"
#include "shapemend/morphology.hpp"
#include "shapemend/shape_ops.hpp"
#include "shapemend/synth.hpp"

namespace py = pybind11;
using namespace shapemend;

namespace {

using Mask3d = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

BinaryMask to_mask(const Mask3d& arr, const std::array<double, 3>& spacing) {
    if (arr.ndim() != 3)
        throw py::value_error("mask must be a 3-D array");
    GridMeta meta;
    meta.dims = {static_cast<int>(arr.shape(0)), static_cast<int>(arr.shape(1)),
                 static_cast<int>(arr.shape(2))};
    meta.spacing = spacing;
    meta.validate();
    std::vector<std::uint8_t> data(arr.data(), arr.data() + arr.size());
    return BinaryMask(meta, std::move(data));
}

py::array_t<std::uint8_t> from_mask(const BinaryMask& mask) {
    const auto& d = mask.meta().dims;
    py::array_t<std::uint8_t> out({d[0], d[1], d[2]});
    std::copy(mask.data().begin(), mask.data().end(), out.mutable_data());
    return out;
}

py::dict outcome_dict(const StepOutcome& o) {
    py::dict d;
    d["changed"] = o.changed;
    d["voxels_removed"] = o.voxels_removed;
    d["voxels_added"] = o.voxels_added;
    d["voxels_relabeled"] = o.voxels_relabeled;
    d["notes"] = o.notes;
    return d;
}

} // namespace

PYBIND11_MODULE(_shapemend, m) {
    m.doc() = "Anatomical shape correction for multi-organ segmentation masks";

    const std::array<double, 3> unit{1.0, 1.0, 1.0};

    m.def(
        "remove_small_components",
        [=](const Mask3d& mask, std::size_t threshold, int connectivity,
            std::array<double, 3> spacing) {
            auto r = remove_small_components(to_mask(mask, spacing), threshold,
                                             connectivity_from_int(connectivity));
            return py::make_tuple(from_mask(r.mask), outcome_dict(r.outcome));
        },
        py::arg("mask"), py::arg("threshold"), py::arg("connectivity") = 26,
        py::arg("spacing") = unit,
        "Drop connected components smaller than `threshold` voxels.");

    m.def(
        "suppress_non_largest_components",
        [=](const Mask3d& mask, int keep_top, int connectivity,
            std::array<double, 3> spacing) {
            auto r = suppress_non_largest_components(
                to_mask(mask, spacing), keep_top,
                connectivity_from_int(connectivity));
            return py::make_tuple(from_mask(r.mask), outcome_dict(r.outcome));
        },
        py::arg("mask"), py::arg("keep_top") = 2, py::arg("connectivity") = 26,
        py::arg("spacing") = unit,
        "Keep only the `keep_top` largest connected components.");

    m.def(
        "merge_fragmented_structure",
        [=](const Mask3d& mask, double d_merge_mm, int r_bridge,
            int connectivity, std::array<double, 3> spacing) {
            auto r = merge_fragmented_structure(
                to_mask(mask, spacing), d_merge_mm, r_bridge,
                connectivity_from_int(connectivity));
            return py::make_tuple(from_mask(r.mask), outcome_dict(r.outcome));
        },
        py::arg("mask"), py::arg("d_merge_mm") = 10.0, py::arg("r_bridge") = 1,
        py::arg("connectivity") = 26, py::arg("spacing") = unit,
        "Bridge fragments whose surface gap is within d_merge_mm.");

    m.def(
        "split_right_left",
        [=](const Mask3d& mask, int axis, double merged_split_fraction,
            int connectivity, std::array<double, 3> spacing) {
            auto r = split_right_left(to_mask(mask, spacing), axis,
                                      merged_split_fraction,
                                      connectivity_from_int(connectivity));
            return py::make_tuple(from_mask(r.right), from_mask(r.left));
        },
        py::arg("mask"), py::arg("axis") = 0,
        py::arg("merged_split_fraction") = 0.6, py::arg("connectivity") = 26,
        py::arg("spacing") = unit,
        "Partition a mask into (right, left) along the lateral axis.");

    m.def(
        "reassign_left_right_based_on_liver",
        [=](const Mask3d& right, const Mask3d& left, const Mask3d& liver,
            int axis, std::array<double, 3> spacing) {
            auto r = reassign_left_right_based_on_liver(
                to_mask(right, spacing), to_mask(left, spacing),
                to_mask(liver, spacing), axis);
            return py::make_tuple(from_mask(r.right), from_mask(r.left),
                                  outcome_dict(r.outcome));
        },
        py::arg("right"), py::arg("left"), py::arg("liver"), py::arg("axis") = 0,
        py::arg("spacing") = unit,
        "Swap sides when the liver anchor says the labels are flipped.");

    m.def(
        "label_components",
        [=](const Mask3d& mask, int connectivity,
            std::array<double, 3> spacing) {
            const BinaryMask m3 = to_mask(mask, spacing);
            const ComponentSet cs =
                label_components(m3, connectivity_from_int(connectivity));
            const auto& d = m3.meta().dims;
            py::array_t<std::int32_t> labels({d[0], d[1], d[2]});
            std::copy(cs.label_grid.begin(), cs.label_grid.end(),
                      labels.mutable_data());
            return py::make_tuple(labels, cs.count);
        },
        py::arg("mask"), py::arg("connectivity") = 26, py::arg("spacing") = unit,
        "Label components (1..count, descending size); returns (labels, count).");

    m.def(
        "dsc",
        [=](const Mask3d& a, const Mask3d& b) {
            return dsc(to_mask(a, unit), to_mask(b, unit));
        },
        py::arg("a"), py::arg("b"),
        "Dice-Sorensen coefficient of two binary masks.");
}
