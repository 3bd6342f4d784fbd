#include "doctest.h"

#include <cstring>
#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "shapemend/errors.hpp"
#include "shapemend/nifti_io.hpp"

using namespace shapemend;
namespace fs = std::filesystem;

namespace {

fs::path tmp_dir() {
    const fs::path d = fs::temp_directory_path() / "shapemend_nifti_tests";
    fs::create_directories(d);
    return d;
}

/// Minimal hand-built 2x2x2 uint8 NIfTI-1 file, independent of the writer.
std::string minimal_nifti_bytes() {
    std::string h(348, '\0');
    auto poke = [&](std::size_t off, const void* src, std::size_t n) {
        std::memcpy(h.data() + off, src, n);
    };
    const std::int32_t sizeof_hdr = 348;
    poke(0, &sizeof_hdr, 4);
    const std::int16_t dim[8] = {3, 2, 2, 2, 1, 1, 1, 1};
    poke(40, dim, sizeof(dim));
    const std::int16_t datatype = 2, bitpix = 8; // DT_UINT8
    poke(70, &datatype, 2);
    poke(72, &bitpix, 2);
    const float pixdim[8] = {1, 1.5f, 2.0f, 2.5f, 0, 0, 0, 0};
    poke(76, pixdim, sizeof(pixdim));
    const float vox_offset = 352;
    poke(108, &vox_offset, 4);
    poke(344, "n+1\0", 4);

    std::string payload = h;
    payload.append(4, '\0'); // extender
    for (int v = 1; v <= 8; ++v) payload.push_back(static_cast<char>(v));
    return payload;
}

void write_file(const fs::path& p, const std::string& bytes) {
    std::ofstream out(p, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

} // namespace

TEST_CASE("hand-built minimal file reads back exactly") {
    const fs::path p = tmp_dir() / "minimal.nii";
    write_file(p, minimal_nifti_bytes());
    const LabelVolume v = read_label_volume(p.string());
    CHECK(v.meta().dims == std::array<int, 3>{2, 2, 2});
    CHECK(v.meta().spacing[0] == doctest::Approx(1.5));
    CHECK(v.meta().spacing[2] == doctest::Approx(2.5));
    for (int i = 0; i < 8; ++i) CHECK(v.data()[i] == i + 1);
}

TEST_CASE("gzipped variant decodes to the identical volume") {
    const fs::path raw = tmp_dir() / "minimal2.nii";
    write_file(raw, minimal_nifti_bytes());
    const LabelVolume plain = read_label_volume(raw.string());

    const fs::path gz = tmp_dir() / "minimal2.nii.gz";
    REQUIRE(std::system(("gzip -kf " + raw.string()).c_str()) == 0);
    CHECK(read_label_volume(gz.string()) == plain);
}

TEST_CASE("byte-swapped header parses identically") {
    std::string bytes = minimal_nifti_bytes();
    auto swap = [&](std::size_t off, std::size_t width, std::size_t count) {
        for (std::size_t n = 0; n < count; ++n)
            std::reverse(bytes.begin() + off + n * width,
                         bytes.begin() + off + (n + 1) * width);
    };
    swap(0, 4, 1);   // sizeof_hdr
    swap(40, 2, 8);  // dim
    swap(70, 2, 2);  // datatype, bitpix
    swap(76, 4, 8);  // pixdim
    swap(108, 4, 1); // vox_offset
    // All other numeric fields are zero; swapping is a no-op for them.
    const fs::path p = tmp_dir() / "swapped.nii";
    write_file(p, bytes);
    const LabelVolume v = read_label_volume(p.string());
    CHECK(v.meta().dims == std::array<int, 3>{2, 2, 2});
    CHECK(v.meta().spacing[1] == doctest::Approx(2.0));
    for (int i = 0; i < 8; ++i) CHECK(v.data()[i] == i + 1);
}

TEST_CASE("float32 data is rejected as non-integer label data") {
    std::string bytes = minimal_nifti_bytes();
    const std::int16_t datatype = 16, bitpix = 32; // DT_FLOAT32
    std::memcpy(bytes.data() + 70, &datatype, 2);
    std::memcpy(bytes.data() + 72, &bitpix, 2);
    bytes.append(24, '\0'); // pad payload to 8 floats
    const fs::path p = tmp_dir() / "float.nii";
    write_file(p, bytes);
    CHECK_THROWS_AS(read_label_volume(p.string()), NonIntegerData);
}

TEST_CASE("scaled label data is rejected") {
    std::string bytes = minimal_nifti_bytes();
    const float slope = 2.0f;
    std::memcpy(bytes.data() + 112, &slope, 4);
    const fs::path p = tmp_dir() / "scaled.nii";
    write_file(p, bytes);
    CHECK_THROWS_AS(read_label_volume(p.string()), ScaledLabelData);
}

TEST_CASE("corrupt magic and truncated payloads are rejected") {
    std::string bad_magic = minimal_nifti_bytes();
    std::memcpy(bad_magic.data() + 344, "xxx\0", 4);
    const fs::path p1 = tmp_dir() / "badmagic.nii";
    write_file(p1, bad_magic);
    CHECK_THROWS_AS(read_label_volume(p1.string()), CorruptHeader);

    const std::string truncated =
        minimal_nifti_bytes().substr(0, 352 + 4); // half the voxels
    const fs::path p2 = tmp_dir() / "trunc.nii";
    write_file(p2, truncated);
    CHECK_THROWS_AS(read_label_volume(p2.string()), CorruptHeader);

    CHECK_THROWS_AS(read_label_volume("/nonexistent/nope.nii"), IoError);
}

TEST_CASE("round trip on random volumes, raw and gzipped") {
    std::mt19937_64 rng(17);
    GridMeta m;
    m.dims = {8, 8, 8};
    m.spacing = {0.75, 1.0, 2.5};
    m.orientation = {AxisCode::LeftRight, AxisCode::AnteriorPosterior,
                     AxisCode::SuperiorInferior};
    // Max values chosen to force each writer datatype in turn.
    const int max_label[3] = {200, 40000, 70000};
    for (int trial = 0; trial < 50; ++trial) {
        std::uniform_int_distribution<int> pick(0, max_label[trial % 3]);
        std::vector<std::int32_t> data(m.voxel_count());
        for (auto& v : data) v = pick(rng);
        const LabelVolume vol(m, data);

        const bool gz = trial % 2 == 0;
        const fs::path p =
            tmp_dir() / ("rt" + std::to_string(trial) + (gz ? ".nii.gz" : ".nii"));
        write_label_volume(vol, p.string(), gz);
        const LabelVolume back = read_label_volume(p.string());
        CHECK(back.data() == vol.data());
        CHECK(back.meta().dims == vol.meta().dims);
        CHECK(back.meta().orientation == vol.meta().orientation);
        for (int a = 0; a < 3; ++a)
            CHECK(back.meta().spacing[a] ==
                  doctest::Approx(vol.meta().spacing[a]).epsilon(1e-6));
    }
}

TEST_CASE("writer picks the smallest datatype that fits") {
    GridMeta m;
    m.dims = {2, 2, 2};
    auto datatype_of = [&](std::int32_t max_label) {
        std::vector<std::int32_t> data(8, 0);
        data[0] = max_label;
        const fs::path p = tmp_dir() / "dtype.nii";
        write_label_volume(LabelVolume(m, data), p.string(), false);
        std::ifstream in(p, std::ios::binary);
        std::string h(348, '\0');
        in.read(h.data(), 348);
        std::int16_t dt;
        std::memcpy(&dt, h.data() + 70, 2);
        return dt;
    };
    CHECK(datatype_of(255) == 2);     // uint8
    CHECK(datatype_of(65535) == 512); // uint16
    CHECK(datatype_of(70000) == 8);   // int32
}

TEST_CASE("unwritable path raises IoError") {
    GridMeta m;
    m.dims = {2, 2, 2};
    const LabelVolume v(m, std::vector<std::int32_t>(8, 0));
    CHECK_THROWS_AS(write_label_volume(v, "/nonexistent/dir/x.nii", false),
                    IoError);
}
