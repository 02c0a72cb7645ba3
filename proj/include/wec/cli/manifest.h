#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

namespace wec::cli {

/// Record written next to every dataset or clustering output: tool
/// version, subcommand, the full flag set, input digests and whatever
/// counts and timings the command reports.
class RunManifest {
public:
    RunManifest(const std::string &subcommand, nlohmann::json flags);

    /// Records the SHA-256 of an input file ("stdin" for "-").
    void add_input(const std::string &role, const std::string &path);
    void set(const std::string &key, nlohmann::json value);
    void add_timing(const std::string &stage, double seconds);

    const nlohmann::json &record() const { return record_; }
    /// Pretty-printed with sorted keys.
    void write(const std::filesystem::path &path) const;

private:
    nlohmann::json record_;
};

} // namespace wec::cli
