#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace wec::util {

/// Lower-case hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

/// Streams the file through SHA-256; throws InputError if it cannot be read.
std::string sha256_file(const std::filesystem::path &path);

} // namespace wec::util
