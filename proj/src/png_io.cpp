#include "c2c/png_io.hpp"

#include <zlib.h>

#include <cstring>

#include "c2c/errors.hpp"
#include "c2c/gz_io.hpp"

namespace c2c {

namespace {

void put_u32_be(std::vector<uint8_t>& out, uint32_t v) {
  out.push_back(static_cast<uint8_t>(v >> 24));
  out.push_back(static_cast<uint8_t>(v >> 16));
  out.push_back(static_cast<uint8_t>(v >> 8));
  out.push_back(static_cast<uint8_t>(v));
}

uint32_t get_u32_be(const uint8_t* p) {
  return (static_cast<uint32_t>(p[0]) << 24) | (static_cast<uint32_t>(p[1]) << 16) |
         (static_cast<uint32_t>(p[2]) << 8) | p[3];
}

void put_chunk(std::vector<uint8_t>& out, const char type[4], const std::vector<uint8_t>& data) {
  put_u32_be(out, static_cast<uint32_t>(data.size()));
  const size_t start = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), data.begin(), data.end());
  const uint32_t crc = static_cast<uint32_t>(
      crc32(0, out.data() + start, static_cast<uInt>(out.size() - start)));
  put_u32_be(out, crc);
}

constexpr uint8_t kSig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

std::vector<uint8_t> zlib_decompress_all(const uint8_t* p, size_t n) {
  z_stream zs{};
  if (inflateInit(&zs) != Z_OK) fail(Err::IoError, "inflateInit failed");
  std::vector<uint8_t> out(n * 4 + 64);
  zs.next_in = const_cast<Bytef*>(p);
  zs.avail_in = static_cast<uInt>(n);
  size_t written = 0;
  int rc;
  do {
    if (written == out.size()) out.resize(out.size() * 2);
    zs.next_out = out.data() + written;
    zs.avail_out = static_cast<uInt>(out.size() - written);
    rc = inflate(&zs, Z_NO_FLUSH);
    written = out.size() - zs.avail_out;
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&zs);
      fail(Err::UnparseableFile, "png: bad zlib stream");
    }
  } while (rc != Z_STREAM_END);
  inflateEnd(&zs);
  out.resize(written);
  return out;
}

}  // namespace

std::vector<uint8_t> encode_png(const ImageRGB& img) {
  if (img.w <= 0 || img.h <= 0) fail(Err::UsageError, "png: empty image");

  std::vector<uint8_t> ihdr;
  put_u32_be(ihdr, static_cast<uint32_t>(img.w));
  put_u32_be(ihdr, static_cast<uint32_t>(img.h));
  ihdr.push_back(8);  // bit depth
  ihdr.push_back(2);  // color type: truecolor
  ihdr.push_back(0);  // compression
  ihdr.push_back(0);  // filter
  ihdr.push_back(0);  // no interlace

  std::vector<uint8_t> raw;
  raw.reserve(static_cast<size_t>(img.h) * (1 + static_cast<size_t>(img.w) * 3));
  for (int y = 0; y < img.h; ++y) {
    raw.push_back(0);  // filter: none
    raw.insert(raw.end(), img.px(0, y), img.px(0, y) + static_cast<size_t>(img.w) * 3);
  }

  std::vector<uint8_t> out;
  out.insert(out.end(), kSig, kSig + 8);
  put_chunk(out, "IHDR", ihdr);
  put_chunk(out, "IDAT", zlib_compress(raw));
  put_chunk(out, "IEND", {});
  return out;
}

void write_png(const std::filesystem::path& path, const ImageRGB& img) {
  write_file_bytes(path, encode_png(img));
}

ImageRGB decode_png(const std::vector<uint8_t>& bytes) {
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kSig, 8) != 0)
    fail(Err::UnparseableFile, "png: bad signature");

  int w = 0, h = 0;
  std::vector<uint8_t> idat;
  size_t pos = 8;
  bool seen_end = false;
  while (pos + 8 <= bytes.size() && !seen_end) {
    const uint32_t len = get_u32_be(bytes.data() + pos);
    if (pos + 12 + len > bytes.size()) fail(Err::UnparseableFile, "png: truncated chunk");
    const char* type = reinterpret_cast<const char*>(bytes.data() + pos + 4);
    const uint8_t* data = bytes.data() + pos + 8;
    if (std::memcmp(type, "IHDR", 4) == 0) {
      if (len != 13) fail(Err::UnparseableFile, "png: bad IHDR");
      w = static_cast<int>(get_u32_be(data));
      h = static_cast<int>(get_u32_be(data + 4));
      if (data[8] != 8 || data[9] != 2 || data[12] != 0)
        fail(Err::UnsupportedDatatype, "png: only 8-bit non-interlaced RGB supported");
    } else if (std::memcmp(type, "IDAT", 4) == 0) {
      idat.insert(idat.end(), data, data + len);
    } else if (std::memcmp(type, "IEND", 4) == 0) {
      seen_end = true;
    }
    pos += 12 + len;
  }
  if (w <= 0 || h <= 0 || idat.empty()) fail(Err::UnparseableFile, "png: missing IHDR/IDAT");

  const auto raw = zlib_decompress_all(idat.data(), idat.size());
  const size_t stride = 1 + static_cast<size_t>(w) * 3;
  if (raw.size() != stride * static_cast<size_t>(h))
    fail(Err::UnparseableFile, "png: unexpected data size");

  ImageRGB img(w, h);
  for (int y = 0; y < h; ++y) {
    const uint8_t* row = raw.data() + static_cast<size_t>(y) * stride;
    const uint8_t filter = row[0];
    uint8_t* dst = img.px(0, y);
    const size_t nb = static_cast<size_t>(w) * 3;
    if (filter == 0) {
      std::memcpy(dst, row + 1, nb);
    } else if (filter == 1) {  // sub
      for (size_t i = 0; i < nb; ++i)
        dst[i] = static_cast<uint8_t>(row[1 + i] + (i >= 3 ? dst[i - 3] : 0));
    } else if (filter == 2) {  // up
      const uint8_t* prev = y > 0 ? img.px(0, y - 1) : nullptr;
      for (size_t i = 0; i < nb; ++i)
        dst[i] = static_cast<uint8_t>(row[1 + i] + (prev ? prev[i] : 0));
    } else {
      fail(Err::UnsupportedDatatype, "png: unsupported filter " + std::to_string(filter));
    }
  }
  return img;
}

}  // namespace c2c
