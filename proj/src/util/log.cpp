#include "wec/util/log.h"

#include <atomic>
#include <iostream>
#include <mutex>

namespace wec::log {

namespace {

std::atomic<Level> g_level{Level::info};
std::mutex g_mutex;

void stderr_sink(const nlohmann::json &record) {
    std::cerr << record.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
}

Sink &sink_ref() {
    static Sink sink = stderr_sink;
    return sink;
}

const char *level_name(Level level) {
    switch (level) {
    case Level::debug: return "debug";
    case Level::info: return "info";
    case Level::warn: return "warn";
    case Level::error: return "error";
    }
    return "info";
}

} // namespace

void set_level(Level level) { g_level.store(level); }

Level level() { return g_level.load(); }

Sink set_sink(Sink sink) {
    std::lock_guard lock(g_mutex);
    Sink previous = std::move(sink_ref());
    sink_ref() = sink ? std::move(sink) : Sink(stderr_sink);
    return previous;
}

void emit(Level lvl, std::string_view event, nlohmann::json fields) {
    if (static_cast<int>(lvl) < static_cast<int>(g_level.load()))
        return;
    nlohmann::json record = nlohmann::json::object();
    record["level"] = level_name(lvl);
    record["event"] = std::string(event);
    if (fields.is_object()) {
        for (auto &[key, value] : fields.items())
            record[key] = std::move(value);
    }
    std::lock_guard lock(g_mutex);
    sink_ref()(record);
}

} // namespace wec::log
