#pragma once

#include <string>

#include "shapemend/volume.hpp"

namespace shapemend {

/// Reads a .nii or .nii.gz label volume (NIfTI-1, single file, datatypes
/// uint8/int16/uint16/int32). Byte-swapped headers are handled; scaled or
/// floating-point label data is rejected.
LabelVolume read_label_volume(const std::string& path);

/// Writes NIfTI-1 with the smallest of uint8/uint16/int32 that fits the
/// labels, vox_offset 352, sform from spacing + orientation. Gzip when
/// `compress` (or the path ends in .gz).
void write_label_volume(const LabelVolume& volume, const std::string& path,
                        bool compress);

} // namespace shapemend
