#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace wb::cfg {

// TOML-subset value: scalars plus one-level arrays of scalars.
struct Value {
    enum class Kind { string, integer, floating, boolean, array };
    Kind kind = Kind::string;
    std::string str;
    int64_t integer = 0;
    double floating = 0.0;  // also populated for integer values
    bool boolean = false;
    std::vector<Value> items;
    int line = 0;

    std::string_view kind_name() const;
};

// Flat key -> value map; `[section]` headers prefix keys with "section.".
// Supported syntax: comments (#), quoted strings with \" \\ \n \t \r escapes,
// integers, floats, booleans, and (possibly multi-line) arrays of scalars.
struct ConfigFile {
    std::map<std::string, Value> values;
    std::string origin;  // path shown in error messages

    bool has(const std::string& key) const { return values.count(key) != 0; }

    // Typed accessors; a present key of the wrong type throws ConfigError.
    // get_* fall back when the key is absent, require_* throw.
    std::string get_string(const std::string& key, std::string_view fallback) const;
    std::string require_string(const std::string& key) const;
    int64_t get_int(const std::string& key, int64_t fallback) const;
    double get_double(const std::string& key, double fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<std::string> get_string_array(const std::string& key,
                                              std::vector<std::string> fallback) const;

    // First key not in `known` throws ConfigError naming it: typos never pass
    // silently as defaults.
    void reject_unknown(const std::vector<std::string>& known) const;
};

ConfigFile parse_config(std::string_view text, std::string origin);
ConfigFile load_config(const std::filesystem::path& path);

}  // namespace wb::cfg
