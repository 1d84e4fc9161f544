#include "windowbench/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace wb::log {

namespace {

Level threshold() {
    static Level lvl = [] {
        const char* env = std::getenv("WINDOWBENCH_LOG");
        if (env && std::strcmp(env, "debug") == 0) return Level::debug;
        return Level::info;
    }();
    return lvl;
}

bool needs_quotes(const std::string& s) {
    return s.find_first_of(" \t\"=") != std::string::npos || s.empty();
}

}  // namespace

bool enabled(Level level) { return static_cast<int>(level) <= static_cast<int>(threshold()); }

void emit(Level level, std::string_view op,
          std::initializer_list<std::pair<std::string, std::string>> kv) {
    if (!enabled(level)) return;
    std::string line = level == Level::debug ? "level=debug op=" : "level=info op=";
    line += op;
    for (const auto& [k, v] : kv) {
        line += ' ';
        line += k;
        line += '=';
        if (needs_quotes(v)) {
            line += '"';
            for (char c : v) {
                if (c == '"' || c == '\\') line += '\\';
                line += c;
            }
            line += '"';
        } else {
            line += v;
        }
    }
    line += '\n';
    std::fputs(line.c_str(), stderr);
}

}  // namespace wb::log
