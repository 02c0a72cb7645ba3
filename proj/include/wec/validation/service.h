#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "wec/pipeline/types.h"
#include "wec/validation/store.h"

namespace wec::validation {

struct ServiceOptions {
    /// Where POST /export writes split files.
    std::filesystem::path export_dir;
    /// Train split purged of leaked source articles on every export.
    std::optional<pipeline::DatasetSplit> train;
};

/// JSON request/response API over a Store:
///   GET  /tasks/next?annotator=ID[&split=S]   next task, or 204 when done
///   GET  /tasks/ID                            one task
///   POST /judgments                           submit a Judgment record
///   GET  /progress                            counts per split and annotator
///   GET  /agreement?annotator=A               A against the consolidator
///   POST /export?split=S[&partial=1]          write the validated split
/// Errors are {"error": kind, "message": text} with status 400, 404 or 409.
/// Every response allows cross-origin requests so a browser client served
/// from elsewhere can call it.
class Service {
public:
    Service(Store &store, ServiceOptions options);
    ~Service();

    /// Binds to host:port (port 0 picks a free one) and returns the port;
    /// throws Error when binding fails.
    int bind(const std::string &host, int port);
    /// Serves until stop() is called.
    void listen();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace wec::validation
