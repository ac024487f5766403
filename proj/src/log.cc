#include "splitplan/log.h"

#include <cstdlib>
#include <iostream>
#include <string>

namespace splitplan::log {

Level CurrentLevel() {
  static const Level level = [] {
    const char* env = std::getenv("SPLITPLAN_LOG");
    if (env == nullptr) return Level::kError;
    const std::string v(env);
    if (v == "debug") return Level::kDebug;
    if (v == "info") return Level::kInfo;
    return Level::kError;
  }();
  return level;
}

void Write(Level level, std::string_view message) {
  if (static_cast<int>(level) > static_cast<int>(CurrentLevel())) return;
  static constexpr std::string_view kTags[] = {"error", "info", "debug"};
  std::cerr << "[splitplan " << kTags[static_cast<int>(level)] << "] "
            << message << '\n';
}

}  // namespace splitplan::log
