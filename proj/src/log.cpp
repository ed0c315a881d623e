#include "r2ch/log.hpp"

#include <cstdlib>
#include <iostream>
#include <mutex>

namespace r2ch::log {

namespace {

Level parse_env() {
    const char* raw = std::getenv("R2CH_LOG");
    if (!raw) return Level::warn;
    const std::string s(raw);
    if (s == "silent" || s == "off") return Level::silent;
    if (s == "error") return Level::error;
    if (s == "warn") return Level::warn;
    if (s == "info") return Level::info;
    if (s == "debug") return Level::debug;
    return Level::warn;
}

std::mutex& mu() {
    static std::mutex m;
    return m;
}

void emit(Level lv, const char* tag, const std::string& msg) {
    if (static_cast<int>(lv) > static_cast<int>(threshold())) return;
    std::lock_guard<std::mutex> lock(mu());
    std::cerr << "[r2ch " << tag << "] " << msg << "\n";
}

}  // namespace

Level threshold() {
    static const Level lv = parse_env();
    return lv;
}

void error(const std::string& msg) { emit(Level::error, "error", msg); }
void warn(const std::string& msg) { emit(Level::warn, "warn", msg); }
void info(const std::string& msg) { emit(Level::info, "info", msg); }
void debug(const std::string& msg) { emit(Level::debug, "debug", msg); }

}  // namespace r2ch::log
