#pragma once

#include <sstream>
#include <string>

namespace restop {

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

// Threshold parsed once from the RESTOP_LOG environment variable
// (error|warn|info|debug, default warn). Messages at or below the
// threshold go to stderr.
LogLevel log_threshold();
bool log_enabled(LogLevel level);
void log_line(LogLevel level, const std::string& msg);

}  // namespace restop

#define RESTOP_LOG(level, expr)                          \
  do {                                                   \
    if (restop::log_enabled(level)) {                    \
      std::ostringstream os_;                            \
      os_ << expr;                                       \
      restop::log_line(level, os_.str());                \
    }                                                    \
  } while (0)

#define RESTOP_WARN(expr) RESTOP_LOG(restop::LogLevel::Warn, expr)
#define RESTOP_INFO(expr) RESTOP_LOG(restop::LogLevel::Info, expr)
#define RESTOP_DEBUG(expr) RESTOP_LOG(restop::LogLevel::Debug, expr)
