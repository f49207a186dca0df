#include "thermoscope/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <string>

namespace thermoscope::log {

static Level parse_level() {
  const char* env = std::getenv("THERMOSCOPE_LOG");
  if (env == nullptr) return Level::warn;
  const std::string v(env);
  if (v == "error") return Level::error;
  if (v == "warn") return Level::warn;
  if (v == "info") return Level::info;
  if (v == "debug") return Level::debug;
  return Level::warn;
}

Level threshold() {
  static const Level level = parse_level();
  return level;
}

void write(Level level, const std::string& message) {
  if (level > threshold()) return;
  static const char* names[] = {"error", "warn", "info", "debug"};
  std::fprintf(stderr, "thermoscope [%s] %s\n", names[static_cast<int>(level)],
               message.c_str());
}

}  // namespace thermoscope::log
