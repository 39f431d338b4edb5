#pragma once

#include <functional>
#include <string>

namespace trigrid {

enum class LogLevel { Info, Warning };

// Messages go to stderr unless a sink is installed; an empty function
// silences them.
void set_log_sink(std::function<void(LogLevel, const std::string&)> sink);
void log_info(const std::string& message);
void log_warning(const std::string& message);

}  // namespace trigrid
