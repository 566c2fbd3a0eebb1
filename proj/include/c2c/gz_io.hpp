#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace c2c {

// Raw file helpers plus gzip (de)compression. Written gzip streams carry a
// zeroed timestamp so identical inputs produce identical bytes.

std::vector<uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, const std::vector<uint8_t>& bytes);

bool looks_gzip(const std::vector<uint8_t>& bytes);

std::vector<uint8_t> gzip_compress(const std::vector<uint8_t>& raw, int level = 6);
std::vector<uint8_t> gzip_decompress(const std::vector<uint8_t>& compressed);

// Raw zlib/deflate streams (used for deflated DICOM transfer syntax and PNG).
std::vector<uint8_t> zlib_compress(const std::vector<uint8_t>& raw, int level = 6);
std::vector<uint8_t> inflate_raw(const std::vector<uint8_t>& compressed);

}  // namespace c2c
