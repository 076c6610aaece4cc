#include "restop/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace restop {

namespace {

LogLevel parse_level() {
  const char* env = std::getenv("RESTOP_LOG");
  if (env == nullptr) return LogLevel::Warn;
  if (std::strcmp(env, "error") == 0) return LogLevel::Error;
  if (std::strcmp(env, "warn") == 0) return LogLevel::Warn;
  if (std::strcmp(env, "info") == 0) return LogLevel::Info;
  if (std::strcmp(env, "debug") == 0) return LogLevel::Debug;
  std::fprintf(stderr, "[restop] unknown RESTOP_LOG value '%s', using warn\n", env);
  return LogLevel::Warn;
}

const char* level_name(LogLevel level) {
  switch (level) {
    case LogLevel::Error: return "error";
    case LogLevel::Warn: return "warn";
    case LogLevel::Info: return "info";
    case LogLevel::Debug: return "debug";
  }
  return "?";
}

}  // namespace

LogLevel log_threshold() {
  static const LogLevel level = parse_level();
  return level;
}

bool log_enabled(LogLevel level) {
  return static_cast<int>(level) <= static_cast<int>(log_threshold());
}

void log_line(LogLevel level, const std::string& msg) {
  std::fprintf(stderr, "[restop %s] %s\n", level_name(level), msg.c_str());
}

}  // namespace restop
