#pragma once

#include <initializer_list>
#include <string_view>
#include <string>
#include <utility>

namespace wb::log {

enum class Level { info = 0, debug = 1 };

// Controlled by WINDOWBENCH_LOG (info|debug); default info.
bool enabled(Level level);

// Line-oriented "op=<op> key=value ..." records on stderr. Values with
// spaces, quotes, or '=' are quoted.
void emit(Level level, std::string_view op,
          std::initializer_list<std::pair<std::string, std::string>> kv);

inline void info(std::string_view op,
                 std::initializer_list<std::pair<std::string, std::string>> kv = {}) {
    emit(Level::info, op, kv);
}
inline void debug(std::string_view op,
                  std::initializer_list<std::pair<std::string, std::string>> kv = {}) {
    emit(Level::debug, op, kv);
}

}  // namespace wb::log
