#include "c2c/gz_io.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>

#include "c2c/errors.hpp"

namespace c2c {

std::vector<uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(Err::IoError, "cannot open " + path.string());
  f.seekg(0, std::ios::end);
  std::streamoff n = f.tellg();
  f.seekg(0, std::ios::beg);
  std::vector<uint8_t> bytes(static_cast<size_t>(n));
  if (n > 0) f.read(reinterpret_cast<char*>(bytes.data()), n);
  if (!f) fail(Err::IoError, "short read on " + path.string());
  return bytes;
}

void write_file_bytes(const std::filesystem::path& path, const std::vector<uint8_t>& bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(Err::IoError, "cannot create " + path.string());
  f.write(reinterpret_cast<const char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
  if (!f) fail(Err::IoError, "short write on " + path.string());
}

bool looks_gzip(const std::vector<uint8_t>& bytes) {
  return bytes.size() >= 2 && bytes[0] == 0x1f && bytes[1] == 0x8b;
}

namespace {

std::vector<uint8_t> deflate_with_window(const std::vector<uint8_t>& raw, int level,
                                         int window_bits) {
  z_stream zs;
  std::memset(&zs, 0, sizeof(zs));
  if (deflateInit2(&zs, level, Z_DEFLATED, window_bits, 8, Z_DEFAULT_STRATEGY) != Z_OK)
    fail(Err::IoError, "deflateInit2 failed");

  gz_header hdr;
  std::memset(&hdr, 0, sizeof(hdr));
  if (window_bits > 15) {
    // gzip wrapper: pin mtime/os so output bytes depend only on input bytes
    hdr.time = 0;
    hdr.os = 255;
    deflateSetHeader(&zs, &hdr);
  }

  std::vector<uint8_t> out;
  out.resize(deflateBound(&zs, static_cast<uLong>(raw.size())) + 32);
  zs.next_in = const_cast<Bytef*>(raw.data());
  zs.avail_in = static_cast<uInt>(raw.size());
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  int rc = deflate(&zs, Z_FINISH);
  if (rc != Z_STREAM_END) {
    deflateEnd(&zs);
    fail(Err::IoError, "deflate failed");
  }
  out.resize(zs.total_out);
  deflateEnd(&zs);
  return out;
}

std::vector<uint8_t> inflate_with_window(const std::vector<uint8_t>& compressed,
                                         int window_bits) {
  z_stream zs;
  std::memset(&zs, 0, sizeof(zs));
  if (inflateInit2(&zs, window_bits) != Z_OK) fail(Err::IoError, "inflateInit2 failed");

  std::vector<uint8_t> out;
  out.resize(compressed.size() * 4 + 1024);
  zs.next_in = const_cast<Bytef*>(compressed.data());
  zs.avail_in = static_cast<uInt>(compressed.size());
  size_t written = 0;
  int rc = Z_OK;
  do {
    if (written == out.size()) out.resize(out.size() * 2);
    zs.next_out = out.data() + written;
    zs.avail_out = static_cast<uInt>(out.size() - written);
    rc = inflate(&zs, Z_NO_FLUSH);
    written = zs.total_out;
    if (rc == Z_NEED_DICT || rc == Z_DATA_ERROR || rc == Z_MEM_ERROR) {
      inflateEnd(&zs);
      fail(Err::UnparseableFile, "inflate failed (corrupt compressed stream)");
    }
  } while (rc != Z_STREAM_END && (zs.avail_in > 0 || zs.avail_out == 0));
  inflateEnd(&zs);
  if (rc != Z_STREAM_END) fail(Err::UnparseableFile, "truncated compressed stream");
  out.resize(written);
  return out;
}

}  // namespace

std::vector<uint8_t> gzip_compress(const std::vector<uint8_t>& raw, int level) {
  return deflate_with_window(raw, level, 15 + 16);
}

std::vector<uint8_t> gzip_decompress(const std::vector<uint8_t>& compressed) {
  return inflate_with_window(compressed, 15 + 32);  // accepts gzip or zlib
}

std::vector<uint8_t> zlib_compress(const std::vector<uint8_t>& raw, int level) {
  return deflate_with_window(raw, level, 15);
}

std::vector<uint8_t> inflate_raw(const std::vector<uint8_t>& compressed) {
  return inflate_with_window(compressed, -15);
}

}  // namespace c2c
