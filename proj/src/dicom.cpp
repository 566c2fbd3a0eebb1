#include "c2c/dicom.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <set>

#include "c2c/errors.hpp"
#include "c2c/gz_io.hpp"

namespace c2c {

namespace {

constexpr const char* kTsImplicitLE = "1.2.840.10008.1.2";
constexpr const char* kTsExplicitLE = "1.2.840.10008.1.2.1";
constexpr const char* kTsDeflatedLE = "1.2.840.10008.1.2.1.99";

struct Tag {
  uint16_t group = 0;
  uint16_t element = 0;
  bool operator==(const Tag& o) const { return group == o.group && element == o.element; }
};

constexpr Tag kTagMetaGroupLength{0x0002, 0x0000};
constexpr Tag kTagTransferSyntax{0x0002, 0x0010};
constexpr Tag kTagSliceThickness{0x0018, 0x0050};
constexpr Tag kTagInstanceNumber{0x0020, 0x0013};
constexpr Tag kTagImagePosition{0x0020, 0x0032};
constexpr Tag kTagImageOrientation{0x0020, 0x0037};
constexpr Tag kTagSamplesPerPixel{0x0028, 0x0002};
constexpr Tag kTagRows{0x0028, 0x0010};
constexpr Tag kTagColumns{0x0028, 0x0011};
constexpr Tag kTagPixelSpacing{0x0028, 0x0030};
constexpr Tag kTagBitsAllocated{0x0028, 0x0100};
constexpr Tag kTagPixelRepresentation{0x0028, 0x0103};
constexpr Tag kTagRescaleIntercept{0x0028, 0x1052};
constexpr Tag kTagRescaleSlope{0x0028, 0x1053};
constexpr Tag kTagPixelData{0x7FE0, 0x0010};

constexpr Tag kTagItem{0xFFFE, 0xE000};
constexpr Tag kTagItemDelim{0xFFFE, 0xE00D};
constexpr Tag kTagSeqDelim{0xFFFE, 0xE0DD};

constexpr uint32_t kUndefinedLength = 0xFFFFFFFFu;

class Reader {
 public:
  Reader(const uint8_t* data, size_t size) : data_(data), size_(size) {}

  size_t pos() const { return pos_; }
  size_t remaining() const { return size_ - pos_; }
  bool eof() const { return pos_ >= size_; }

  uint8_t u8() {
    need(1);
    return data_[pos_++];
  }
  uint16_t peek_u16() const {
    need(2);
    return static_cast<uint16_t>(data_[pos_] | (data_[pos_ + 1] << 8));
  }
  uint16_t u16() {
    need(2);
    uint16_t v = static_cast<uint16_t>(data_[pos_] | (data_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }
  uint32_t u32() {
    need(4);
    uint32_t v = static_cast<uint32_t>(data_[pos_]) | (static_cast<uint32_t>(data_[pos_ + 1]) << 8) |
                 (static_cast<uint32_t>(data_[pos_ + 2]) << 16) |
                 (static_cast<uint32_t>(data_[pos_ + 3]) << 24);
    pos_ += 4;
    return v;
  }
  const uint8_t* bytes(size_t n) {
    need(n);
    const uint8_t* p = data_ + pos_;
    pos_ += n;
    return p;
  }
  void skip(size_t n) {
    need(n);
    pos_ += n;
  }

 private:
  void need(size_t n) const {
    if (pos_ + n > size_) fail(Err::UnparseableFile, "truncated DICOM element stream");
  }
  const uint8_t* data_;
  size_t size_;
  size_t pos_ = 0;
};

bool is_known_vr(char a, char b) {
  static const std::set<std::string> vrs = {
      "AE", "AS", "AT", "CS", "DA", "DS", "DT", "FL", "FD", "IS", "LO", "LT",
      "OB", "OD", "OF", "OL", "OW", "PN", "SH", "SL", "SQ", "SS", "ST", "TM",
      "UC", "UI", "UL", "UN", "UR", "US", "UT"};
  char s[3] = {a, b, 0};
  return vrs.count(s) > 0;
}

bool vr_has_long_length(const std::string& vr) {
  return vr == "OB" || vr == "OD" || vr == "OF" || vr == "OL" || vr == "OW" || vr == "SQ" ||
         vr == "UC" || vr == "UN" || vr == "UR" || vr == "UT";
}

std::string trim_dicom_string(const uint8_t* p, size_t n) {
  std::string s(reinterpret_cast<const char*>(p), n);
  while (!s.empty() && (s.back() == '\0' || s.back() == ' ')) s.pop_back();
  size_t start = s.find_first_not_of(' ');
  return start == std::string::npos ? std::string() : s.substr(start);
}

std::vector<double> parse_ds_multi(const std::string& s) {
  std::vector<double> out;
  size_t start = 0;
  while (start <= s.size()) {
    size_t sep = s.find('\\', start);
    std::string part = s.substr(start, sep == std::string::npos ? std::string::npos : sep - start);
    if (!part.empty()) {
      char* end = nullptr;
      double v = std::strtod(part.c_str(), &end);
      if (end == part.c_str()) fail(Err::UnparseableFile, "bad decimal string '" + part + "'");
      out.push_back(v);
    }
    if (sep == std::string::npos) break;
    start = sep + 1;
  }
  return out;
}

// Skips the body of a sequence with undefined length, handling nested
// undefined-length items/sequences. `explicit_vr` selects element framing.
void skip_undefined_sequence(Reader& r, bool explicit_vr);

void skip_element_body(Reader& r, const std::string& vr, uint32_t len, bool explicit_vr) {
  if (len != kUndefinedLength) {
    r.skip(len);
    return;
  }
  if (vr == "SQ" || vr == "UN" || vr.empty())
    skip_undefined_sequence(r, explicit_vr && vr != "UN");
  else
    fail(Err::UnparseableFile, "undefined length on non-sequence element");
}

void skip_undefined_sequence(Reader& r, bool explicit_vr) {
  while (true) {
    Tag t{r.u16(), r.u16()};
    uint32_t len = r.u32();
    if (t == kTagSeqDelim) return;
    if (t == kTagItem) {
      if (len == kUndefinedLength) {
        // item with undefined length: walk elements until item delimiter
        while (true) {
          Tag et{r.u16(), r.u16()};
          if (et == kTagItemDelim) {
            r.u32();
            break;
          }
          std::string vr;
          uint32_t elen;
          if (explicit_vr) {
            char a = static_cast<char>(r.u8()), b = static_cast<char>(r.u8());
            vr = std::string{a, b};
            if (vr_has_long_length(vr)) {
              r.skip(2);
              elen = r.u32();
            } else {
              elen = r.u16();
            }
          } else {
            elen = r.u32();
          }
          skip_element_body(r, vr, elen, explicit_vr);
        }
      } else {
        r.skip(len);
      }
      continue;
    }
    fail(Err::UnparseableFile, "malformed sequence item");
  }
}

struct Element {
  Tag tag;
  std::string vr;  // empty in implicit mode
  uint32_t length = 0;
};

// Reads the element header; body handling is up to the caller.
Element read_element_header(Reader& r, bool explicit_vr) {
  Element e;
  e.tag = Tag{r.u16(), r.u16()};
  if (e.tag.group == 0xFFFE) {
    e.length = r.u32();
    return e;
  }
  if (explicit_vr) {
    char a = static_cast<char>(r.u8()), b = static_cast<char>(r.u8());
    e.vr = std::string{a, b};
    if (!is_known_vr(a, b)) fail(Err::UnparseableFile, "unknown VR in explicit dataset");
    if (vr_has_long_length(e.vr)) {
      r.skip(2);
      e.length = r.u32();
    } else {
      e.length = r.u16();
    }
  } else {
    e.length = r.u32();
  }
  return e;
}

struct ParsedDataset {
  std::map<uint64_t, std::vector<uint8_t>> values;  // tag key -> raw value bytes
  bool pixel_data_present = false;
  std::vector<uint8_t> pixel_data;
};

uint64_t tag_key(Tag t) { return (static_cast<uint64_t>(t.group) << 16) | t.element; }

bool is_wanted(Tag t) {
  return t == kTagSliceThickness || t == kTagInstanceNumber || t == kTagImagePosition ||
         t == kTagImageOrientation || t == kTagSamplesPerPixel || t == kTagRows ||
         t == kTagColumns || t == kTagPixelSpacing || t == kTagBitsAllocated ||
         t == kTagPixelRepresentation || t == kTagRescaleIntercept || t == kTagRescaleSlope;
}

void parse_dataset(Reader& r, bool explicit_vr, ParsedDataset& out) {
  while (!r.eof()) {
    Element e = read_element_header(r, explicit_vr);
    if (e.tag == kTagPixelData) {
      if (e.length == kUndefinedLength)
        fail(Err::UnparseableFile, "encapsulated (compressed) pixel data is unsupported");
      const uint8_t* p = r.bytes(e.length);
      out.pixel_data.assign(p, p + e.length);
      out.pixel_data_present = true;
      return;  // nothing needed beyond pixel data
    }
    if (e.length == kUndefinedLength || e.vr == "SQ") {
      skip_element_body(r, e.vr.empty() ? "SQ" : e.vr, e.length, explicit_vr);
      continue;
    }
    if (is_wanted(e.tag)) {
      const uint8_t* p = r.bytes(e.length);
      out.values[tag_key(e.tag)] = std::vector<uint8_t>(p, p + e.length);
    } else {
      r.skip(e.length);
    }
  }
}

// Reads the file meta group (always explicit VR LE); returns the transfer
// syntax UID and leaves `r` positioned at the start of the main dataset.
std::string read_file_meta(Reader& r) {
  std::string ts;
  std::optional<size_t> meta_end;
  while (!r.eof()) {
    if (meta_end && r.pos() >= *meta_end) break;
    if (r.remaining() < 2 || r.peek_u16() != 0x0002) break;
    Element e = read_element_header(r, true);
    if (e.tag == kTagMetaGroupLength) {
      if (e.length != 4) fail(Err::UnparseableFile, "bad meta group length element");
      uint32_t glen = r.u32();
      meta_end = r.pos() + glen;
      continue;
    }
    const uint8_t* p = r.bytes(e.length);
    if (e.tag == kTagTransferSyntax) ts = trim_dicom_string(p, e.length);
  }
  return ts;
}

bool guess_explicit_vr(const std::vector<uint8_t>& bytes, size_t offset) {
  if (offset + 6 > bytes.size()) return false;
  return is_known_vr(static_cast<char>(bytes[offset + 4]), static_cast<char>(bytes[offset + 5]));
}

DicomSlice decode_slice(const std::filesystem::path& path, const ParsedDataset& ds) {
  DicomSlice s;
  s.path = path;

  auto get = [&](Tag t) -> const std::vector<uint8_t>* {
    auto it = ds.values.find(tag_key(t));
    return it == ds.values.end() ? nullptr : &it->second;
  };
  auto get_u16 = [&](Tag t) -> std::optional<int> {
    const auto* v = get(t);
    if (!v || v->size() < 2) return std::nullopt;
    return static_cast<int>((*v)[0] | ((*v)[1] << 8));
  };
  auto get_str = [&](Tag t) -> std::optional<std::string> {
    const auto* v = get(t);
    if (!v) return std::nullopt;
    return trim_dicom_string(v->data(), v->size());
  };

  auto rows = get_u16(kTagRows);
  auto cols = get_u16(kTagColumns);
  if (!rows || !cols || *rows <= 0 || *cols <= 0)
    fail(Err::UnparseableFile, path.string() + ": missing Rows/Columns");
  s.rows = *rows;
  s.cols = *cols;

  if (auto v = get_str(kTagPixelSpacing)) {
    auto parts = parse_ds_multi(*v);
    if (parts.size() != 2 || parts[0] <= 0 || parts[1] <= 0)
      fail(Err::MissingPixelSpacing, path.string() + ": malformed PixelSpacing");
    s.pixel_spacing = {parts[0], parts[1]};
  }
  if (auto v = get_str(kTagImagePosition)) {
    auto parts = parse_ds_multi(*v);
    if (parts.size() == 3) s.position = {parts[0], parts[1], parts[2]};
  }
  if (auto v = get_str(kTagImageOrientation)) {
    auto parts = parse_ds_multi(*v);
    if (parts.size() == 6) {
      std::array<double, 6> o;
      std::copy(parts.begin(), parts.end(), o.begin());
      s.orientation = o;
    }
  }
  if (auto v = get_str(kTagInstanceNumber)) {
    if (!v->empty()) s.instance_number = std::strtol(v->c_str(), nullptr, 10);
  }
  if (auto v = get_str(kTagSliceThickness)) {
    auto parts = parse_ds_multi(*v);
    if (parts.size() == 1 && parts[0] > 0) s.slice_thickness = parts[0];
  }
  auto slope = get_str(kTagRescaleSlope);
  auto inter = get_str(kTagRescaleIntercept);
  if (slope && inter) {
    s.rescale_slope = parse_ds_multi(*slope).at(0);
    s.rescale_intercept = parse_ds_multi(*inter).at(0);
    s.has_rescale = true;
  }

  s.bits_allocated = get_u16(kTagBitsAllocated).value_or(16);
  s.pixel_representation = get_u16(kTagPixelRepresentation).value_or(0);
  s.samples_per_pixel = get_u16(kTagSamplesPerPixel).value_or(1);

  if (s.samples_per_pixel != 1)
    fail(Err::UnparseableFile, path.string() + ": only single-sample images supported");
  if (s.bits_allocated != 8 && s.bits_allocated != 16)
    fail(Err::UnparseableFile, path.string() + ": unsupported BitsAllocated");
  if (!ds.pixel_data_present) fail(Err::UnparseableFile, path.string() + ": no pixel data");

  size_t expect = static_cast<size_t>(s.rows) * s.cols * (s.bits_allocated / 8);
  if (ds.pixel_data.size() < expect)
    fail(Err::UnparseableFile, path.string() + ": pixel data shorter than Rows*Columns");
  s.pixel_data = ds.pixel_data;
  return s;
}

}  // namespace

double DicomSlice::stored_value(int x, int y) const {
  size_t i = static_cast<size_t>(y) * cols + x;
  if (bits_allocated == 8) {
    uint8_t raw = pixel_data[i];
    return pixel_representation ? static_cast<double>(static_cast<int8_t>(raw))
                                : static_cast<double>(raw);
  }
  uint16_t raw = static_cast<uint16_t>(pixel_data[2 * i] | (pixel_data[2 * i + 1] << 8));
  return pixel_representation ? static_cast<double>(static_cast<int16_t>(raw))
                              : static_cast<double>(raw);
}

DicomSlice parse_dicom_file(const std::filesystem::path& path) {
  std::vector<uint8_t> bytes = read_file_bytes(path);
  if (bytes.size() < 8) fail(Err::UnparseableFile, path.string() + ": too small");

  size_t offset = 0;
  bool has_preamble = bytes.size() > 132 && std::memcmp(bytes.data() + 128, "DICM", 4) == 0;
  std::string ts;
  std::vector<uint8_t> inflated;  // backing store when deflated

  const uint8_t* data = bytes.data();
  size_t size = bytes.size();

  if (has_preamble) {
    Reader meta(bytes.data() + 132, bytes.size() - 132);
    ts = read_file_meta(meta);
    offset = 132 + meta.pos();
  }

  bool explicit_vr;
  if (ts == kTsDeflatedLE) {
    std::vector<uint8_t> tail(bytes.begin() + static_cast<long>(offset), bytes.end());
    inflated = inflate_raw(tail);
    data = inflated.data();
    size = inflated.size();
    offset = 0;
    explicit_vr = true;
  } else if (ts == kTsImplicitLE) {
    explicit_vr = false;
  } else if (ts == kTsExplicitLE || ts.empty()) {
    if (!ts.empty()) {
      explicit_vr = true;
    } else {
      // no meta header: sniff the first dataset element
      explicit_vr = guess_explicit_vr(bytes, offset);
    }
  } else {
    fail(Err::UnparseableFile, path.string() + ": unsupported transfer syntax " + ts);
  }

  Reader r(data + offset, size - offset);
  ParsedDataset ds;
  try {
    parse_dataset(r, explicit_vr, ds);
  } catch (const Error& e) {
    if (e.code() == Err::UnparseableFile) throw Error(e.code(), path.string() + ": " + e.what());
    throw;
  }
  return decode_slice(path, ds);
}

bool is_dicom_bytes(const std::vector<uint8_t>& bytes) {
  if (bytes.size() > 132 && std::memcmp(bytes.data() + 128, "DICM", 4) == 0) return true;
  // permissive fallback: plausible first element at offset 0
  if (bytes.size() < 8) return false;
  uint16_t group = static_cast<uint16_t>(bytes[0] | (bytes[1] << 8));
  static const std::set<uint16_t> plausible = {0x0002, 0x0008, 0x0010, 0x0018, 0x0020, 0x0028};
  if (!plausible.count(group)) return false;
  if (guess_explicit_vr(bytes, 0)) return true;
  // implicit VR: element length must stay inside the file
  uint32_t len = static_cast<uint32_t>(bytes[4]) | (static_cast<uint32_t>(bytes[5]) << 8) |
                 (static_cast<uint32_t>(bytes[6]) << 16) | (static_cast<uint32_t>(bytes[7]) << 24);
  return len != kUndefinedLength && 8 + static_cast<size_t>(len) <= bytes.size();
}

bool is_dicom_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) return false;
  std::vector<uint8_t> head(256);
  f.read(reinterpret_cast<char*>(head.data()), static_cast<std::streamsize>(head.size()));
  head.resize(static_cast<size_t>(f.gcount()));
  if (head.size() > 132 && std::memcmp(head.data() + 128, "DICM", 4) == 0) return true;
  return is_dicom_bytes(head);
}

namespace {

struct SliceGeom {
  DicomSlice slice;
  double sort_z = 0.0;
};

constexpr double kOrientationTol = 1e-3;

bool orientation_is_axial_identity(const std::array<double, 6>& o) {
  static const std::array<double, 6> ident = {1, 0, 0, 0, 1, 0};
  for (int i = 0; i < 6; ++i)
    if (std::abs(o[i] - ident[i]) > kOrientationTol) return false;
  return true;
}

CTVolume assemble_volume(std::vector<DicomSlice> slices) {
  if (slices.empty()) fail(Err::UnparseableFile, "no DICOM slices");

  const DicomSlice& first = slices.front();
  for (const auto& s : slices) {
    if (s.rows != first.rows || s.cols != first.cols)
      fail(Err::InconsistentSliceGeometry,
           s.path.string() + ": Rows/Columns differ from first slice");
    if (!s.pixel_spacing) fail(Err::MissingPixelSpacing, s.path.string());
    if (std::abs((*s.pixel_spacing)[0] - (*first.pixel_spacing)[0]) > 1e-5 ||
        std::abs((*s.pixel_spacing)[1] - (*first.pixel_spacing)[1]) > 1e-5)
      fail(Err::InconsistentSliceGeometry, s.path.string() + ": PixelSpacing differs");
    std::array<double, 6> o = s.orientation.value_or(std::array<double, 6>{1, 0, 0, 0, 1, 0});
    if (!orientation_is_axial_identity(o))
      fail(Err::InconsistentSliceGeometry,
           s.path.string() + ": non-axial or mixed ImageOrientationPatient");
  }

  bool all_positioned = std::all_of(slices.begin(), slices.end(),
                                    [](const DicomSlice& s) { return s.position.has_value(); });

  if (all_positioned) {
    std::stable_sort(slices.begin(), slices.end(), [](const DicomSlice& a, const DicomSlice& b) {
      return (*a.position)[2] < (*b.position)[2];
    });
    for (size_t i = 1; i < slices.size(); ++i) {
      if (std::abs((*slices[i].position)[2] - (*slices[i - 1].position)[2]) < 1e-6)
        fail(Err::InconsistentSliceGeometry, "duplicate slice z positions");
    }
  } else if (slices.size() > 1) {
    // fall back to instance numbers when any position is missing
    for (const auto& s : slices)
      if (!s.instance_number)
        fail(Err::InconsistentSliceGeometry,
             s.path.string() + ": neither ImagePositionPatient nor InstanceNumber");
    std::stable_sort(slices.begin(), slices.end(), [](const DicomSlice& a, const DicomSlice& b) {
      return *a.instance_number < *b.instance_number;
    });
    for (size_t i = 1; i < slices.size(); ++i)
      if (*slices[i].instance_number == *slices[i - 1].instance_number)
        fail(Err::InconsistentSliceGeometry, "duplicate InstanceNumber");
  }

  double sz = 1.0;
  if (all_positioned && slices.size() > 1) {
    std::vector<double> gaps;
    for (size_t i = 1; i < slices.size(); ++i)
      gaps.push_back((*slices[i].position)[2] - (*slices[i - 1].position)[2]);
    std::vector<double> sorted = gaps;
    std::sort(sorted.begin(), sorted.end());
    double median = sorted[sorted.size() / 2];
    if (sorted.size() % 2 == 0) median = 0.5 * (median + sorted[sorted.size() / 2 - 1]);
    for (double g : gaps)
      if (std::abs(g - median) > 0.10 * median)
        fail(Err::NonUniformSliceSpacing, "slice gap deviates more than 10% from median");
    sz = median;
  } else {
    sz = slices.front().slice_thickness.value_or(1.0);
  }

  const int nx = first.cols, ny = first.rows, nz = static_cast<int>(slices.size());
  CTVolume vol;
  vol.hu = Array3<float>(nx, ny, nz);
  vol.spacing = Spacing{(*first.pixel_spacing)[1], (*first.pixel_spacing)[0], sz};
  if (slices.front().position) {
    const auto& p = *slices.front().position;
    vol.origin = Vec3{p[0], p[1], p[2]};
  }
  for (int z = 0; z < nz; ++z) {
    const DicomSlice& s = slices[z];
    if (!s.has_rescale) {
      // some exporters omit rescale tags for already-scaled data
      std::fprintf(stderr, "warning: %s has no RescaleSlope/Intercept, assuming 1/0\n",
                   s.path.string().c_str());
    }
    for (int y = 0; y < ny; ++y)
      for (int x = 0; x < nx; ++x) vol.hu(x, y, z) = s.hu_value(x, y);
    vol.source_paths.push_back(s.path);
  }
  return vol;
}

}  // namespace

CTVolume load_dicom_series(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec))
    fail(Err::UnparseableFile, dir.string() + " is not a directory");

  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file()) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) fail(Err::UnparseableFile, dir.string() + ": empty directory");

  std::vector<DicomSlice> slices;
  slices.reserve(files.size());
  for (const auto& f : files) slices.push_back(parse_dicom_file(f));
  return assemble_volume(std::move(slices));
}

CTVolume load_axial_dicom(const std::filesystem::path& file) {
  DicomSlice s = parse_dicom_file(file);
  if (!s.pixel_spacing) fail(Err::MissingPixelSpacing, file.string());
  return assemble_volume({std::move(s)});
}

}  // namespace c2c
