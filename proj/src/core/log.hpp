#pragma once

#include <atomic>
#include <cstdio>
#include <string>

namespace eventalpha {

enum class LogLevel : int { error = 0, warn = 1, info = 2, debug = 3 };

inline std::atomic<int>& log_level_slot() {
    static std::atomic<int> level{static_cast<int>(LogLevel::warn)};
    return level;
}

inline void set_log_level(LogLevel lvl) { log_level_slot().store(static_cast<int>(lvl)); }

inline bool log_enabled(LogLevel lvl) {
    return static_cast<int>(lvl) <= log_level_slot().load();
}

// All diagnostics go to stderr so stage output files stay deterministic.
inline void log_line(LogLevel lvl, const std::string& msg) {
    if (!log_enabled(lvl)) return;
    static const char* names[] = {"error", "warn", "info", "debug"};
    std::fprintf(stderr, "[eventalpha:%s] %s\n", names[static_cast<int>(lvl)], msg.c_str());
}

} // namespace eventalpha
