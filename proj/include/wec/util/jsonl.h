#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <string>

#include <json.hpp>

namespace wec::util {

/// Calls `fn(record, line_number)` for every non-blank line of a
/// newline-delimited JSON file. Parse errors raise InputError naming the line.
void read_jsonl(const std::filesystem::path &path,
                const std::function<void(const nlohmann::json &, std::size_t)> &fn);

/// Writes one compact JSON record per line. Keys are emitted in sorted
/// order (nlohmann's default), which keeps output byte-stable.
class JsonlWriter {
public:
    explicit JsonlWriter(const std::filesystem::path &path);

    void write(const nlohmann::json &record);
    void close();
    std::size_t count() const { return count_; }

private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::size_t count_ = 0;
};

/// Compact, sorted-key, UTF-8-preserving serialisation used for every
/// record file the toolkit writes.
std::string dump_record(const nlohmann::json &record);

/// Writes `text` to `path` via a temporary file and rename.
void write_file_atomic(const std::filesystem::path &path, const std::string &text);

std::string read_file(const std::filesystem::path &path);

} // namespace wec::util
