#pragma once

#include <string_view>

namespace splitplan::log {

enum class Level { kError = 0, kInfo = 1, kDebug = 2 };

// Read once from SPLITPLAN_LOG (error|info|debug); defaults to error.
Level CurrentLevel();

void Write(Level level, std::string_view message);

inline void Error(std::string_view m) { Write(Level::kError, m); }
inline void Info(std::string_view m) { Write(Level::kInfo, m); }
inline void Debug(std::string_view m) { Write(Level::kDebug, m); }

}  // namespace splitplan::log
