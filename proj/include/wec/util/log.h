#pragma once

#include <functional>
#include <string_view>

#include <json.hpp>

namespace wec::log {

enum class Level { debug = 0, info = 1, warn = 2, error = 3 };

/// Receives every record at or above the current level. The default sink
/// writes one JSON object per line to standard error.
using Sink = std::function<void(const nlohmann::json &record)>;

void set_level(Level level);
Level level();

/// Replaces the sink; returns the previous one so tests can restore it.
Sink set_sink(Sink sink);

void emit(Level level, std::string_view event, nlohmann::json fields = nlohmann::json::object());

inline void debug(std::string_view event, nlohmann::json fields = nlohmann::json::object()) {
    emit(Level::debug, event, std::move(fields));
}
inline void info(std::string_view event, nlohmann::json fields = nlohmann::json::object()) {
    emit(Level::info, event, std::move(fields));
}
inline void warn(std::string_view event, nlohmann::json fields = nlohmann::json::object()) {
    emit(Level::warn, event, std::move(fields));
}
inline void error(std::string_view event, nlohmann::json fields = nlohmann::json::object()) {
    emit(Level::error, event, std::move(fields));
}

/// Installs a sink for the lifetime of the object and restores the old one.
class ScopedSink {
public:
    explicit ScopedSink(Sink sink) : previous_(set_sink(std::move(sink))) {}
    ~ScopedSink() { set_sink(std::move(previous_)); }
    ScopedSink(const ScopedSink &) = delete;
    ScopedSink &operator=(const ScopedSink &) = delete;

private:
    Sink previous_;
};

} // namespace wec::log
