#include "shapemend/nifti_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include <zlib.h>

namespace shapemend {

namespace {

// NIfTI-1 datatype codes.
constexpr std::int16_t DT_UINT8 = 2;
constexpr std::int16_t DT_INT16 = 4;
constexpr std::int16_t DT_INT32 = 8;
constexpr std::int16_t DT_FLOAT32 = 16;
constexpr std::int16_t DT_FLOAT64 = 64;
constexpr std::int16_t DT_UINT16 = 512;

#pragma pack(push, 1)
struct Nifti1Header {
    std::int32_t sizeof_hdr;
    char data_type[10];
    char db_name[18];
    std::int32_t extents;
    std::int16_t session_error;
    char regular;
    char dim_info;
    std::int16_t dim[8];
    float intent_p1, intent_p2, intent_p3;
    std::int16_t intent_code;
    std::int16_t datatype;
    std::int16_t bitpix;
    std::int16_t slice_start;
    float pixdim[8];
    float vox_offset;
    float scl_slope;
    float scl_inter;
    std::int16_t slice_end;
    char slice_code;
    char xyzt_units;
    float cal_max, cal_min;
    float slice_duration;
    float toffset;
    std::int32_t glmax, glmin;
    char descrip[80];
    char aux_file[24];
    std::int16_t qform_code;
    std::int16_t sform_code;
    float quatern_b, quatern_c, quatern_d;
    float qoffset_x, qoffset_y, qoffset_z;
    float srow_x[4];
    float srow_y[4];
    float srow_z[4];
    char intent_name[16];
    char magic[4];
};
#pragma pack(pop)
static_assert(sizeof(Nifti1Header) == 348, "NIfTI-1 header must be 348 bytes");

template <typename T>
void bswap(T& v) {
    auto* p = reinterpret_cast<unsigned char*>(&v);
    std::reverse(p, p + sizeof(T));
}

void swap_header(Nifti1Header& h) {
    bswap(h.sizeof_hdr);
    bswap(h.extents);
    bswap(h.session_error);
    for (auto& d : h.dim) bswap(d);
    bswap(h.intent_p1);
    bswap(h.intent_p2);
    bswap(h.intent_p3);
    bswap(h.intent_code);
    bswap(h.datatype);
    bswap(h.bitpix);
    bswap(h.slice_start);
    for (auto& p : h.pixdim) bswap(p);
    bswap(h.vox_offset);
    bswap(h.scl_slope);
    bswap(h.scl_inter);
    bswap(h.slice_end);
    bswap(h.cal_max);
    bswap(h.cal_min);
    bswap(h.slice_duration);
    bswap(h.toffset);
    bswap(h.glmax);
    bswap(h.glmin);
    bswap(h.qform_code);
    bswap(h.sform_code);
    bswap(h.quatern_b);
    bswap(h.quatern_c);
    bswap(h.quatern_d);
    bswap(h.qoffset_x);
    bswap(h.qoffset_y);
    bswap(h.qoffset_z);
    for (auto& v : h.srow_x) bswap(v);
    for (auto& v : h.srow_y) bswap(v);
    for (auto& v : h.srow_z) bswap(v);
}

AxisCode code_for_world_axis(int world) {
    switch (world) {
        case 0: return AxisCode::LeftRight;
        case 1: return AxisCode::AnteriorPosterior;
        default: return AxisCode::SuperiorInferior;
    }
}

std::array<AxisCode, 3> orientation_from_rotation(const double m[3][3]) {
    std::array<AxisCode, 3> out{AxisCode::Unknown, AxisCode::Unknown,
                                AxisCode::Unknown};
    std::array<bool, 3> world_taken{false, false, false};
    for (int col = 0; col < 3; ++col) {
        int best = -1;
        double best_mag = 0.0, second = 0.0;
        for (int row = 0; row < 3; ++row) {
            const double mag = std::abs(m[row][col]);
            if (mag > best_mag) {
                second = best_mag;
                best_mag = mag;
                best = row;
            } else if (mag > second) {
                second = mag;
            }
        }
        if (best < 0 || best_mag == 0.0) continue;
        if (second > 0.2 * best_mag)
            std::fprintf(stderr,
                         "shapemend: warning: oblique orientation on voxel "
                         "axis %d; using dominant direction\n",
                         col);
        if (!world_taken[best]) {
            out[col] = code_for_world_axis(best);
            world_taken[best] = true;
        }
    }
    return out;
}

std::vector<char> read_all_gz(const std::string& path) {
    gzFile f = gzopen(path.c_str(), "rb");
    if (!f) throw IoError("cannot open file: " + path);
    std::vector<char> out;
    char buf[1 << 16];
    int n;
    while ((n = gzread(f, buf, sizeof(buf))) > 0) out.insert(out.end(), buf, buf + n);
    const bool bad = n < 0;
    gzclose(f);
    if (bad) throw IoError("gzip read error: " + path);
    return out;
}

} // namespace

LabelVolume read_label_volume(const std::string& path) {
    const std::vector<char> bytes = read_all_gz(path);
    if (bytes.size() < sizeof(Nifti1Header))
        throw CorruptHeader("file shorter than a NIfTI-1 header: " + path);
    Nifti1Header h;
    std::memcpy(&h, bytes.data(), sizeof(h));
    bool swapped = false;
    if (h.sizeof_hdr != 348) {
        swap_header(h);
        swapped = true;
        if (h.sizeof_hdr != 348)
            throw CorruptHeader("sizeof_hdr is not 348: " + path);
    }
    if (std::strncmp(h.magic, "n+1", 3) != 0) {
        if (std::strncmp(h.magic, "ni1", 3) == 0)
            throw CorruptHeader("detached .hdr/.img pairs are not supported");
        throw CorruptHeader("bad magic: " + path);
    }
    if (h.dim[0] < 3 || h.dim[0] > 4)
        throw CorruptHeader("dim[0] must be 3 or 4, got " +
                            std::to_string(h.dim[0]));
    for (int a = 1; a <= 3; ++a)
        if (h.dim[a] < 1)
            throw CorruptHeader("dim[" + std::to_string(a) + "] must be >= 1");
    if (h.dim[0] == 4 && h.dim[4] > 1)
        throw CorruptHeader("4-D volumes with more than one frame unsupported");

    switch (h.datatype) {
        case DT_UINT8:
        case DT_INT16:
        case DT_INT32:
        case DT_UINT16:
            break;
        case DT_FLOAT32:
        case DT_FLOAT64:
            throw NonIntegerData("floating-point voxels are not label data");
        default:
            throw UnsupportedDatatype("datatype code " +
                                      std::to_string(h.datatype));
    }
    const bool scaled = (h.scl_slope != 0.0f && h.scl_slope != 1.0f) ||
                        h.scl_inter != 0.0f;
    if (scaled) throw ScaledLabelData("scl_slope/scl_inter scaling on label data");

    GridMeta meta;
    meta.dims = {h.dim[1], h.dim[2], h.dim[3]};
    meta.spacing = {h.pixdim[1], h.pixdim[2], h.pixdim[3]};
    double rot[3][3] = {{0}};
    if (h.sform_code > 0) {
        const float* rows[3] = {h.srow_x, h.srow_y, h.srow_z};
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) rot[r][c] = rows[r][c];
        meta.orientation = orientation_from_rotation(rot);
    } else if (h.qform_code > 0) {
        const double b = h.quatern_b, c = h.quatern_c, d = h.quatern_d;
        double a2 = 1.0 - (b * b + c * c + d * d);
        const double a = a2 > 0 ? std::sqrt(a2) : 0.0;
        const double qfac = h.pixdim[0] < 0 ? -1.0 : 1.0;
        rot[0][0] = a * a + b * b - c * c - d * d;
        rot[0][1] = 2 * (b * c - a * d);
        rot[0][2] = qfac * 2 * (b * d + a * c);
        rot[1][0] = 2 * (b * c + a * d);
        rot[1][1] = a * a + c * c - b * b - d * d;
        rot[1][2] = qfac * 2 * (c * d - a * b);
        rot[2][0] = 2 * (b * d - a * c);
        rot[2][1] = 2 * (c * d + a * b);
        rot[2][2] = qfac * (a * a + d * d - b * b - c * c);
        meta.orientation = orientation_from_rotation(rot);
    }
    meta.validate();

    const std::size_t n = meta.voxel_count();
    const std::size_t elem = static_cast<std::size_t>(h.bitpix) / 8;
    const std::size_t offset = static_cast<std::size_t>(h.vox_offset);
    if (offset < 348 || bytes.size() < offset + n * elem)
        throw CorruptHeader("voxel data truncated: " + path);

    std::vector<std::int32_t> data(n);
    const char* src = bytes.data() + offset;
    auto load = [&](auto tag) {
        using T = decltype(tag);
        for (std::size_t i = 0; i < n; ++i) {
            T v;
            std::memcpy(&v, src + i * sizeof(T), sizeof(T));
            if (swapped) bswap(v);
            if constexpr (std::is_signed_v<T>) {
                if (v < 0)
                    throw NonIntegerData("negative voxel value in label data");
            }
            data[i] = static_cast<std::int32_t>(v);
        }
    };
    switch (h.datatype) {
        case DT_UINT8: load(std::uint8_t{}); break;
        case DT_INT16: load(std::int16_t{}); break;
        case DT_UINT16: load(std::uint16_t{}); break;
        case DT_INT32: load(std::int32_t{}); break;
    }
    return LabelVolume(meta, std::move(data));
}

void write_label_volume(const LabelVolume& volume, const std::string& path,
                        bool compress) {
    const GridMeta& meta = volume.meta();
    std::int32_t max_label = 0;
    for (std::int32_t v : volume.data()) max_label = std::max(max_label, v);

    std::int16_t datatype;
    std::int16_t bitpix;
    if (max_label <= 255) {
        datatype = DT_UINT8;
        bitpix = 8;
    } else if (max_label <= 65535) {
        datatype = DT_UINT16;
        bitpix = 16;
    } else {
        datatype = DT_INT32;
        bitpix = 32;
    }

    Nifti1Header h;
    std::memset(&h, 0, sizeof(h));
    h.sizeof_hdr = 348;
    h.regular = 'r';
    h.dim[0] = 3;
    h.dim[1] = static_cast<std::int16_t>(meta.dims[0]);
    h.dim[2] = static_cast<std::int16_t>(meta.dims[1]);
    h.dim[3] = static_cast<std::int16_t>(meta.dims[2]);
    for (int a = 4; a < 8; ++a) h.dim[a] = 1;
    h.datatype = datatype;
    h.bitpix = bitpix;
    h.pixdim[0] = 1.0f;
    for (int a = 0; a < 3; ++a)
        h.pixdim[a + 1] = static_cast<float>(meta.spacing[a]);
    h.vox_offset = 352.0f;
    h.scl_slope = 1.0f;
    h.xyzt_units = 2; // mm
    h.sform_code = 1;
    // One world row per voxel axis; axes without a code take the world
    // directions left over, in order, keeping the matrix nonsingular.
    {
        std::array<int, 3> world_of{-1, -1, -1};
        std::array<bool, 3> taken{false, false, false};
        for (int a = 0; a < 3; ++a) {
            switch (meta.orientation[a]) {
                case AxisCode::LeftRight: world_of[a] = 0; break;
                case AxisCode::AnteriorPosterior: world_of[a] = 1; break;
                case AxisCode::SuperiorInferior: world_of[a] = 2; break;
                default: break;
            }
            if (world_of[a] >= 0) taken[world_of[a]] = true;
        }
        for (int a = 0; a < 3; ++a) {
            if (world_of[a] >= 0) continue;
            for (int w = 0; w < 3; ++w)
                if (!taken[w]) {
                    world_of[a] = w;
                    taken[w] = true;
                    break;
                }
        }
        float* rows[3] = {h.srow_x, h.srow_y, h.srow_z};
        for (int a = 0; a < 3; ++a)
            rows[world_of[a]][a] = static_cast<float>(meta.spacing[a]);
    }
    std::memcpy(h.magic, "n+1", 4);

    std::vector<char> payload;
    payload.resize(352 + volume.data().size() * (bitpix / 8));
    std::memcpy(payload.data(), &h, sizeof(h));
    std::memset(payload.data() + 348, 0, 4); // empty extender
    char* dst = payload.data() + 352;
    const auto& data = volume.data();
    auto store = [&](auto tag) {
        using T = decltype(tag);
        for (std::size_t i = 0; i < data.size(); ++i) {
            const T v = static_cast<T>(data[i]);
            std::memcpy(dst + i * sizeof(T), &v, sizeof(T));
        }
    };
    switch (datatype) {
        case DT_UINT8: store(std::uint8_t{}); break;
        case DT_UINT16: store(std::uint16_t{}); break;
        case DT_INT32: store(std::int32_t{}); break;
    }

    // Temp file + rename: readers never observe a partial volume.
    const std::string tmp = path + ".tmp";
    if (compress) {
        gzFile f = gzopen(tmp.c_str(), "wb");
        if (!f) throw IoError("cannot open for writing: " + tmp);
        const int n = gzwrite(f, payload.data(),
                              static_cast<unsigned>(payload.size()));
        const bool bad = n != static_cast<int>(payload.size());
        gzclose(f);
        if (bad) {
            std::remove(tmp.c_str());
            throw IoError("gzip write error: " + tmp);
        }
    } else {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw IoError("cannot open for writing: " + tmp);
        out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
        if (!out) {
            out.close();
            std::remove(tmp.c_str());
            throw IoError("write error: " + tmp);
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::remove(tmp.c_str());
        throw IoError("cannot rename " + tmp + " to " + path + ": " +
                      ec.message());
    }
}

} // namespace shapemend
