#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace signshape {

// Log level is read once from the SIGNSHAPE_LOG environment variable
// (error, info, debug). Default is error.
enum class LogLevel { Error = 0, Info = 1, Debug = 2 };

inline LogLevel log_level() {
    static LogLevel level = [] {
        const char* env = std::getenv("SIGNSHAPE_LOG");
        if (env == nullptr) return LogLevel::Error;
        if (std::strcmp(env, "debug") == 0) return LogLevel::Debug;
        if (std::strcmp(env, "info") == 0) return LogLevel::Info;
        return LogLevel::Error;
    }();
    return level;
}

template <typename... Args>
void log_at(LogLevel lvl, const char* tag, const char* fmt, Args... args) {
    if (static_cast<int>(lvl) > static_cast<int>(log_level())) return;
    std::fprintf(stderr, "[signshape:%s] ", tag);
    if constexpr (sizeof...(Args) == 0)
        std::fputs(fmt, stderr);
    else
        std::fprintf(stderr, fmt, args...);
    std::fputs("\n", stderr);
}

template <typename... Args>
void log_error(const char* fmt, Args... args) { log_at(LogLevel::Error, "error", fmt, args...); }
template <typename... Args>
void log_info(const char* fmt, Args... args) { log_at(LogLevel::Info, "info", fmt, args...); }
template <typename... Args>
void log_debug(const char* fmt, Args... args) { log_at(LogLevel::Debug, "debug", fmt, args...); }

}
