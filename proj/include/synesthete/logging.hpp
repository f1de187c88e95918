#pragma once

#include <sstream>
#include <string_view>

namespace synesthete::logging {

enum class Level { error = 0, warn = 1, info = 2, debug = 3 };

// Threshold comes from SYNESTHETE_LOG (error|warn|info|debug), default warn.
Level threshold();

void write(Level level, std::string_view message);

namespace detail {
template <typename... Args>
std::string concat(Args&&... args) {
  std::ostringstream os;
  (os << ... << std::forward<Args>(args));
  return os.str();
}
}  // namespace detail

template <typename... Args>
void error(Args&&... args) {
  write(Level::error, detail::concat(std::forward<Args>(args)...));
}

template <typename... Args>
void warn(Args&&... args) {
  write(Level::warn, detail::concat(std::forward<Args>(args)...));
}

template <typename... Args>
void info(Args&&... args) {
  write(Level::info, detail::concat(std::forward<Args>(args)...));
}

template <typename... Args>
void debug(Args&&... args) {
  write(Level::debug, detail::concat(std::forward<Args>(args)...));
}

}  // namespace synesthete::logging
