#include "trigrid/log.hpp"

#include <iostream>
#include <mutex>

namespace trigrid {

namespace {

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

std::function<void(LogLevel, const std::string&)>& sink() {
  static std::function<void(LogLevel, const std::string&)> s =
      [](LogLevel level, const std::string& msg) {
        std::cerr << (level == LogLevel::Warning ? "warning: " : "") << msg << '\n';
      };
  return s;
}

void emit(LogLevel level, const std::string& message) {
  std::lock_guard<std::mutex> lock(sink_mutex());
  if (sink()) sink()(level, message);
}

}  // namespace

void set_log_sink(std::function<void(LogLevel, const std::string&)> s) {
  std::lock_guard<std::mutex> lock(sink_mutex());
  sink() = std::move(s);
}

void log_info(const std::string& message) { emit(LogLevel::Info, message); }
void log_warning(const std::string& message) { emit(LogLevel::Warning, message); }

}  // namespace trigrid
