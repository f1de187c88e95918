#include "synesthete/logging.hpp"

#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>

namespace synesthete::logging {

namespace {

Level parse_level() {
  const char* env = std::getenv("SYNESTHETE_LOG");
  if (env == nullptr) return Level::warn;
  const std::string v(env);
  if (v == "error") return Level::error;
  if (v == "warn") return Level::warn;
  if (v == "info") return Level::info;
  if (v == "debug") return Level::debug;
  return Level::warn;
}

const char* tag(Level level) {
  switch (level) {
    case Level::error:
      return "error";
    case Level::warn:
      return "warn";
    case Level::info:
      return "info";
    case Level::debug:
      return "debug";
  }
  return "?";
}

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

Level threshold() {
  static const Level level = parse_level();
  return level;
}

void write(Level level, std::string_view message) {
  if (static_cast<int>(level) > static_cast<int>(threshold())) return;
  std::lock_guard<std::mutex> lock(sink_mutex());
  std::cerr << "[" << tag(level) << "] " << message << "\n";
}

}  // namespace synesthete::logging
