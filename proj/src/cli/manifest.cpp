#include "wec/cli/manifest.h"

#include "wec/util/digest.h"
#include "wec/util/jsonl.h"
#include "wec/version.h"

namespace wec::cli {

RunManifest::RunManifest(const std::string &subcommand, nlohmann::json flags) {
    record_ = {{"tool", "wec"},
               {"version", kVersion},
               {"subcommand", subcommand},
               {"flags", std::move(flags)},
               {"inputs", nlohmann::json::object()},
               {"timings", nlohmann::json::object()}};
}

void RunManifest::add_input(const std::string &role, const std::string &path) {
    record_["inputs"][role] = {{"path", path}, {"sha256", path == "-" ? "stdin" : util::sha256_file(path)}};
}

void RunManifest::set(const std::string &key, nlohmann::json value) { record_[key] = std::move(value); }

void RunManifest::add_timing(const std::string &stage, double seconds) { record_["timings"][stage] = seconds; }

void RunManifest::write(const std::filesystem::path &path) const {
    util::write_file_atomic(path, record_.dump(2) + "\n");
}

} // namespace wec::cli
