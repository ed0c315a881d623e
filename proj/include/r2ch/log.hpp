#pragma once

#include <string>

// Minimal stderr logger. Verbosity comes from the R2CH_LOG environment
// variable: silent, error, warn (default), info, debug.
namespace r2ch::log {

enum class Level { silent = 0, error = 1, warn = 2, info = 3, debug = 4 };

Level threshold();

void error(const std::string& msg);
void warn(const std::string& msg);
void info(const std::string& msg);
void debug(const std::string& msg);

}  // namespace r2ch::log
