#pragma once

#include <filesystem>
#include <istream>
#include <memory>
#include <optional>
#include <string>

namespace wec::cli {

/// The external decompressor for a path, chosen by extension (.bz2, .gz,
/// .xz, .zst); nullopt for plain files.
std::optional<std::string> decompressor_for(const std::filesystem::path &path);

/// Opens a file for reading. "-" is standard input. Compressed files are
/// piped through `<tool> -dc`; a tool that exits with an error is logged
/// when the stream is destroyed, and the truncated XML it leaves behind
/// fails the reader. Throws InputError when the file cannot be opened.
std::unique_ptr<std::istream> open_input(const std::string &path);

} // namespace wec::cli
