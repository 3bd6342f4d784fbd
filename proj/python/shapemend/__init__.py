"""Anatomical shape correction for multi-organ 3-D segmentation masks."""

from ._shapemend import (
    dsc,
    label_components,
    merge_fragmented_structure,
    reassign_left_right_based_on_liver,
    remove_small_components,
    split_right_left,
    suppress_non_largest_components,
)

__all__ = [
    "dsc",
    "label_components",
    "merge_fragmented_structure",
    "reassign_left_right_based_on_liver",
    "remove_small_components",
    "split_right_left",
    "suppress_non_largest_components",
]
