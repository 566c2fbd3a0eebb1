#include <cstdint>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "c2c/dicom.hpp"
#include "c2c/errors.hpp"
#include "c2c/gz_io.hpp"

namespace c2c {

namespace {

void put_u16(std::vector<uint8_t>& b, uint16_t v) {
  b.push_back(static_cast<uint8_t>(v & 0xFF));
  b.push_back(static_cast<uint8_t>(v >> 8));
}

void put_u32(std::vector<uint8_t>& b, uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<uint8_t>((v >> (8 * i)) & 0xFF));
}

std::string pad_even(std::string s, char pad) {
  if (s.size() % 2) s.push_back(pad);
  return s;
}

// Explicit VR little endian element with a short (2-byte) length field.
void put_element(std::vector<uint8_t>& b, uint16_t group, uint16_t element, const char* vr,
                 const std::string& value) {
  put_u16(b, group);
  put_u16(b, element);
  b.push_back(static_cast<uint8_t>(vr[0]));
  b.push_back(static_cast<uint8_t>(vr[1]));
  put_u16(b, static_cast<uint16_t>(value.size()));
  b.insert(b.end(), value.begin(), value.end());
}

void put_element_us(std::vector<uint8_t>& b, uint16_t group, uint16_t element, uint16_t v) {
  put_u16(b, group);
  put_u16(b, element);
  b.push_back('U');
  b.push_back('S');
  put_u16(b, 2);
  put_u16(b, v);
}

std::string format_ds(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

void write_dicom_slice(const std::filesystem::path& path, const DicomWriteSpec& spec,
                       const std::vector<uint16_t>& stored) {
  if (static_cast<size_t>(spec.rows) * spec.cols != stored.size())
    fail(Err::IoError, "pixel buffer does not match Rows*Columns");

  const std::string sop_class = pad_even("1.2.840.10008.5.1.4.1.1.2", '\0');  // CT image storage
  const std::string ts_uid = pad_even("1.2.840.10008.1.2.1", '\0');
  const std::string sop_uid = pad_even(spec.sop_uid, '\0');
  const std::string series_uid = pad_even(spec.series_uid, '\0');

  // file meta group, explicit VR LE
  std::vector<uint8_t> meta;
  {
    // (0002,0001) FileMetaInformationVersion uses the long length form
    put_u16(meta, 0x0002);
    put_u16(meta, 0x0001);
    meta.push_back('O');
    meta.push_back('B');
    put_u16(meta, 0);
    put_u32(meta, 2);
    meta.push_back(0);
    meta.push_back(1);
  }
  put_element(meta, 0x0002, 0x0002, "UI", sop_class);
  put_element(meta, 0x0002, 0x0003, "UI", sop_uid);
  put_element(meta, 0x0002, 0x0010, "UI", ts_uid);
  put_element(meta, 0x0002, 0x0012, "UI", pad_even("1.2.826.0.1.3680043.9756", '\0'));

  std::vector<uint8_t> out;
  out.resize(128, 0);
  out.push_back('D');
  out.push_back('I');
  out.push_back('C');
  out.push_back('M');
  std::string glen(4, '\0');
  uint32_t msize = static_cast<uint32_t>(meta.size());
  for (int i = 0; i < 4; ++i) glen[i] = static_cast<char>((msize >> (8 * i)) & 0xFF);
  put_element(out, 0x0002, 0x0000, "UL", glen);
  out.insert(out.end(), meta.begin(), meta.end());

  put_element(out, 0x0008, 0x0016, "UI", sop_class);
  put_element(out, 0x0008, 0x0018, "UI", sop_uid);
  put_element(out, 0x0008, 0x0060, "CS", "CT");
  put_element(out, 0x0018, 0x0050, "DS", pad_even(format_ds(spec.slice_thickness), ' '));
  put_element(out, 0x0020, 0x000E, "UI", series_uid);
  put_element(out, 0x0020, 0x0013, "IS", pad_even(std::to_string(spec.instance_number), ' '));
  put_element(out, 0x0020, 0x0032, "DS",
              pad_even(format_ds(spec.position[0]) + "\\" + format_ds(spec.position[1]) + "\\" +
                           format_ds(spec.position[2]),
                       ' '));
  put_element(out, 0x0020, 0x0037, "DS", pad_even("1\\0\\0\\0\\1\\0", ' '));
  put_element_us(out, 0x0028, 0x0002, 1);
  put_element(out, 0x0028, 0x0004, "CS", pad_even("MONOCHROME2", ' '));
  put_element_us(out, 0x0028, 0x0010, static_cast<uint16_t>(spec.rows));
  put_element_us(out, 0x0028, 0x0011, static_cast<uint16_t>(spec.cols));
  put_element(out, 0x0028, 0x0030, "DS",
              pad_even(format_ds(spec.pixel_spacing[0]) + "\\" + format_ds(spec.pixel_spacing[1]),
                       ' '));
  put_element_us(out, 0x0028, 0x0100, 16);
  put_element_us(out, 0x0028, 0x0101, 16);
  put_element_us(out, 0x0028, 0x0102, 15);
  put_element_us(out, 0x0028, 0x0103, spec.signed_pixels ? 1 : 0);
  put_element(out, 0x0028, 0x1052, "DS", pad_even(format_ds(spec.rescale_intercept), ' '));
  put_element(out, 0x0028, 0x1053, "DS", pad_even(format_ds(spec.rescale_slope), ' '));

  // (7FE0,0010) OW with long length form
  put_u16(out, 0x7FE0);
  put_u16(out, 0x0010);
  out.push_back('O');
  out.push_back('W');
  put_u16(out, 0);
  put_u32(out, static_cast<uint32_t>(stored.size() * 2));
  for (uint16_t v : stored) put_u16(out, v);

  write_file_bytes(path, out);
}

}  // namespace c2c
