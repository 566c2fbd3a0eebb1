#include "c2c/nifti.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>

#include "c2c/errors.hpp"
#include "c2c/gz_io.hpp"

namespace c2c {

namespace {

// NIfTI-1 header, 348 bytes. Field offsets are fixed by the standard;
// the struct below is layout-exact on every platform we target.
#pragma pack(push, 1)
struct Nifti1Header {
  int32_t sizeof_hdr;
  char data_type[10];
  char db_name[18];
  int32_t extents;
  int16_t session_error;
  char regular;
  char dim_info;
  int16_t dim[8];
  float intent_p1;
  float intent_p2;
  float intent_p3;
  int16_t intent_code;
  int16_t datatype;
  int16_t bitpix;
  int16_t slice_start;
  float pixdim[8];
  float vox_offset;
  float scl_slope;
  float scl_inter;
  int16_t slice_end;
  char slice_code;
  char xyzt_units;
  float cal_max;
  float cal_min;
  float slice_duration;
  float toffset;
  int32_t glmax;
  int32_t glmin;
  char descrip[80];
  char aux_file[24];
  int16_t qform_code;
  int16_t sform_code;
  float quatern_b;
  float quatern_c;
  float quatern_d;
  float qoffset_x;
  float qoffset_y;
  float qoffset_z;
  float srow_x[4];
  float srow_y[4];
  float srow_z[4];
  char intent_name[16];
  char magic[4];
};
#pragma pack(pop)

static_assert(sizeof(Nifti1Header) == 348, "NIfTI-1 header must be 348 bytes");

enum NiftiDatatype : int16_t {
  DT_UINT8 = 2,
  DT_INT16 = 4,
  DT_INT32 = 8,
  DT_FLOAT32 = 16,
  DT_FLOAT64 = 64,
  DT_INT8 = 256,
  DT_UINT16 = 512,
  DT_UINT32 = 768,
};

template <typename T>
void bswap(T& v) {
  auto* p = reinterpret_cast<uint8_t*>(&v);
  std::reverse(p, p + sizeof(T));
}

void swap_header(Nifti1Header& h) {
  bswap(h.sizeof_hdr);
  for (auto& d : h.dim) bswap(d);
  bswap(h.datatype);
  bswap(h.bitpix);
  for (auto& p : h.pixdim) bswap(p);
  bswap(h.vox_offset);
  bswap(h.scl_slope);
  bswap(h.scl_inter);
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

struct Affine {
  // world = R * index + t, world in RAS
  double r[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  double t[3] = {0, 0, 0};
};

Affine affine_from_header(const Nifti1Header& h) {
  Affine a;
  if (h.sform_code > 0) {
    const float* rows[3] = {h.srow_x, h.srow_y, h.srow_z};
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) a.r[i][j] = rows[i][j];
      a.t[i] = rows[i][3];
    }
    return a;
  }
  if (h.qform_code > 0) {
    double b = h.quatern_b, c = h.quatern_c, d = h.quatern_d;
    double asq = 1.0 - (b * b + c * c + d * d);
    double qa = asq > 0 ? std::sqrt(asq) : 0.0;
    double qfac = h.pixdim[0] < 0 ? -1.0 : 1.0;
    double rot[3][3] = {
        {qa * qa + b * b - c * c - d * d, 2 * (b * c - qa * d), 2 * (b * d + qa * c)},
        {2 * (b * c + qa * d), qa * qa + c * c - b * b - d * d, 2 * (c * d - qa * b)},
        {2 * (b * d - qa * c), 2 * (c * d + qa * b), qa * qa + d * d - b * b - c * c}};
    double sp[3] = {h.pixdim[1], h.pixdim[2], qfac * h.pixdim[3]};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) a.r[i][j] = rot[i][j] * sp[j];
    a.t[0] = h.qoffset_x;
    a.t[1] = h.qoffset_y;
    a.t[2] = h.qoffset_z;
    return a;
  }
  // no transform recorded: assume voxel axes already align with RAS
  for (int j = 0; j < 3; ++j) a.r[j][j] = h.pixdim[j + 1] != 0 ? h.pixdim[j + 1] : 1.0;
  return a;
}

int64_t checked_int(double v, const std::filesystem::path& file) {
  double r = std::nearbyint(v);
  if (std::abs(v - r) > 1e-6 || r < -32768 || r > 32767)
    fail(Err::UnsupportedDatatype, file.string() + ": non-integer or out-of-range label value");
  return static_cast<int64_t>(r);
}

}  // namespace

SegmentationMask load_nifti_mask(const std::filesystem::path& file,
                                 const std::map<int, std::string>& label_map) {
  std::vector<uint8_t> bytes = read_file_bytes(file);
  if (looks_gzip(bytes)) bytes = gzip_decompress(bytes);
  if (bytes.size() < sizeof(Nifti1Header) + 4)
    fail(Err::UnparseableFile, file.string() + ": too small for a NIfTI-1 header");

  Nifti1Header h;
  std::memcpy(&h, bytes.data(), sizeof(h));
  bool swapped = false;
  if (h.sizeof_hdr != 348) {
    bswap(h.sizeof_hdr);
    if (h.sizeof_hdr != 348) fail(Err::UnparseableFile, file.string() + ": bad sizeof_hdr");
    std::memcpy(&h, bytes.data(), sizeof(h));
    swap_header(h);
    swapped = true;
  }
  if (std::strncmp(h.magic, "n+1", 3) != 0 && std::strncmp(h.magic, "ni1", 3) != 0)
    fail(Err::UnparseableFile, file.string() + ": missing NIfTI magic");
  if (std::strncmp(h.magic, "ni1", 3) == 0)
    fail(Err::UnparseableFile, file.string() + ": detached .hdr/.img pairs unsupported");

  int ndim = h.dim[0];
  if (ndim < 2 || ndim > 3) {
    // accept trailing singleton dims (e.g. 4D with one volume)
    if (ndim == 4 && h.dim[4] == 1)
      ndim = 3;
    else
      fail(Err::UnsupportedDatatype, file.string() + ": only 2D/3D masks supported");
  }
  int nx = h.dim[1], ny = h.dim[2], nz = ndim >= 3 ? h.dim[3] : 1;
  if (nx <= 0 || ny <= 0 || nz <= 0)
    fail(Err::UnparseableFile, file.string() + ": bad dimensions");

  if (h.scl_slope != 0 && h.scl_slope != 1)
    fail(Err::UnsupportedDatatype, file.string() + ": scaled label data");
  if (h.scl_inter != 0)
    fail(Err::UnsupportedDatatype, file.string() + ": scaled label data");

  size_t off = static_cast<size_t>(h.vox_offset);
  if (off < 352) off = 352;
  size_t n = static_cast<size_t>(nx) * ny * nz;
  size_t bpp = static_cast<size_t>(h.bitpix) / 8;
  if (bytes.size() < off + n * bpp)
    fail(Err::UnparseableFile, file.string() + ": data shorter than header promises");
  const uint8_t* data = bytes.data() + off;

  // decode raw values into int16 labels
  std::vector<int16_t> raw(n);
  auto load_as = [&](auto sample, size_t i) -> double {
    using S = decltype(sample);
    S v;
    std::memcpy(&v, data + i * sizeof(S), sizeof(S));
    if (swapped && sizeof(S) > 1) bswap(v);
    return static_cast<double>(v);
  };
  for (size_t i = 0; i < n; ++i) {
    double v;
    switch (h.datatype) {
      case DT_UINT8: v = load_as(uint8_t{}, i); break;
      case DT_INT8: v = load_as(int8_t{}, i); break;
      case DT_INT16: v = load_as(int16_t{}, i); break;
      case DT_UINT16: v = load_as(uint16_t{}, i); break;
      case DT_INT32: v = load_as(int32_t{}, i); break;
      case DT_UINT32: v = load_as(uint32_t{}, i); break;
      case DT_FLOAT32: v = load_as(float{}, i); break;
      case DT_FLOAT64: v = load_as(double{}, i); break;
      default:
        fail(Err::UnsupportedDatatype,
             file.string() + ": datatype " + std::to_string(h.datatype));
    }
    raw[i] = static_cast<int16_t>(checked_int(v, file));
  }

  // resolve the permutation/flips that bring voxel axes to the canonical
  // (right-left, anterior-posterior, inferior-superior) frame
  Affine aff = affine_from_header(h);
  int dominant[3];   // voxel axis -> world axis
  double sign[3];
  for (int j = 0; j < 3; ++j) {
    int best = 0;
    double mag = 0;
    for (int i = 0; i < 3; ++i) {
      double m = std::abs(aff.r[i][j]);
      if (m > mag) {
        mag = m;
        best = i;
      }
    }
    if (mag < 1e-9) fail(Err::OrientationUnresolvable, file.string() + ": degenerate affine");
    dominant[j] = best;
    sign[j] = aff.r[best][j] >= 0 ? 1.0 : -1.0;
  }
  if (dominant[0] == dominant[1] || dominant[0] == dominant[2] || dominant[1] == dominant[2])
    fail(Err::OrientationUnresolvable, file.string() + ": ambiguous axis assignment");

  // canonical target in RAS: axis0 -> -x (left), axis1 -> -y (posterior), axis2 -> +z
  const double target_sign[3] = {-1.0, -1.0, 1.0};
  int perm[3];  // canonical axis -> source voxel axis
  for (int c = 0; c < 3; ++c) {
    for (int j = 0; j < 3; ++j)
      if (dominant[j] == c) perm[c] = j;
  }
  bool flip[3];
  int dims_src[3] = {nx, ny, nz};
  double spacing_src[3];
  for (int j = 0; j < 3; ++j) {
    double s = 0;
    for (int i = 0; i < 3; ++i) s += aff.r[i][j] * aff.r[i][j];
    spacing_src[j] = std::sqrt(s);
  }

  SegmentationMask mask;
  int dims_out[3];
  double spacing_out[3];
  for (int c = 0; c < 3; ++c) {
    flip[c] = sign[perm[c]] != target_sign[c];
    dims_out[c] = dims_src[perm[c]];
    spacing_out[c] = spacing_src[perm[c]];
  }
  mask.labels = Array3<int16_t>(dims_out[0], dims_out[1], dims_out[2]);
  mask.spacing = Spacing{spacing_out[0], spacing_out[1], spacing_out[2]};
  mask.label_map = label_map;

  size_t stride[3] = {1, static_cast<size_t>(nx), static_cast<size_t>(nx) * ny};
  for (int k = 0; k < dims_out[2]; ++k) {
    for (int j = 0; j < dims_out[1]; ++j) {
      for (int i = 0; i < dims_out[0]; ++i) {
        int idx_c[3] = {i, j, k};
        size_t src = 0;
        for (int c = 0; c < 3; ++c) {
          int v = flip[c] ? dims_out[c] - 1 - idx_c[c] : idx_c[c];
          src += stride[perm[c]] * static_cast<size_t>(v);
        }
        mask.labels(i, j, k) = raw[src];
      }
    }
  }
  return mask;
}

void save_nifti_mask(const std::filesystem::path& file, const SegmentationMask& mask,
                     const Vec3& origin) {
  Nifti1Header h;
  std::memset(&h, 0, sizeof(h));
  h.sizeof_hdr = 348;
  h.dim[0] = static_cast<int16_t>(mask.nz() > 1 ? 3 : 2);
  h.dim[1] = static_cast<int16_t>(mask.nx());
  h.dim[2] = static_cast<int16_t>(mask.ny());
  h.dim[3] = static_cast<int16_t>(mask.nz());
  for (int i = 4; i < 8; ++i) h.dim[i] = 1;
  h.datatype = DT_INT16;
  h.bitpix = 16;
  h.pixdim[0] = 1.0f;
  h.pixdim[1] = static_cast<float>(mask.spacing.x);
  h.pixdim[2] = static_cast<float>(mask.spacing.y);
  h.pixdim[3] = static_cast<float>(mask.spacing.z);
  h.vox_offset = 352.0f;
  h.scl_slope = 1.0f;
  h.xyzt_units = 2;  // millimetres
  std::strncpy(h.descrip, "label mask, canonical LPS voxel order", sizeof(h.descrip) - 1);
  h.sform_code = 1;
  // canonical frame: +i toward left, +j toward posterior, +k toward superior
  h.srow_x[0] = static_cast<float>(-mask.spacing.x);
  h.srow_x[3] = static_cast<float>(-origin.x);
  h.srow_y[1] = static_cast<float>(-mask.spacing.y);
  h.srow_y[3] = static_cast<float>(-origin.y);
  h.srow_z[2] = static_cast<float>(mask.spacing.z);
  h.srow_z[3] = static_cast<float>(origin.z);
  std::memcpy(h.magic, "n+1", 4);

  std::vector<uint8_t> out(sizeof(h) + 4, 0);
  std::memcpy(out.data(), &h, sizeof(h));
  out.reserve(out.size() + mask.labels.size() * 2);
  for (int16_t v : mask.labels.v) {
    out.push_back(static_cast<uint8_t>(v & 0xFF));
    out.push_back(static_cast<uint8_t>((v >> 8) & 0xFF));
  }

  if (file.extension() == ".gz") out = gzip_compress(out);
  write_file_bytes(file, out);
}

}  // namespace c2c
