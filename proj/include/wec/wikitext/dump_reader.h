#pragma once

#include <cstddef>
#include <functional>
#include <istream>
#include <memory>
#include <optional>
#include <set>

#include "wec/wikitext/types.h"

namespace wec::wikitext {

struct DumpOptions {
    /// Namespaces to keep; std::nullopt keeps every page.
    std::optional<std::set<int>> namespaces;
    std::size_t chunk_size = 64 * 1024;
};

struct DumpStats {
    std::size_t pages_seen = 0;
    std::size_t pages_yielded = 0;
    std::size_t pages_filtered = 0;
    std::size_t pages_skipped = 0;
    /// High-water mark of bytes held for pages not yet handed to the caller
    /// (partial page being assembled plus completed pages queued).
    std::size_t peak_buffered_bytes = 0;
};

/// Pull-based streaming reader over a MediaWiki pages-articles export.
///
/// The input is fed to the XML parser in fixed-size chunks; only the page
/// currently being assembled and the pages completed within the last chunk
/// are held in memory. Malformed page elements are skipped with a warning.
/// A truncated or syntactically broken stream raises InputError, but only
/// after every complete page before the breakage has been returned.
class DumpReader {
public:
    explicit DumpReader(std::istream &in, DumpOptions options = {});
    ~DumpReader();
    DumpReader(const DumpReader &) = delete;
    DumpReader &operator=(const DumpReader &) = delete;

    std::optional<RawPage> next();

    const DumpStats &stats() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Convenience wrapper: calls `sink` for every page in document order.
DumpStats parse_dump(std::istream &in, const std::function<void(RawPage &&)> &sink,
                     DumpOptions options = {});

} // namespace wec::wikitext
