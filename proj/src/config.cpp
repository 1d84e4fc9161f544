#include "windowbench/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "windowbench/error.hpp"

namespace wb::cfg {

namespace {

bool is_key_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
}

struct Parser {
    std::string_view text;
    std::string origin;
    size_t pos = 0;
    int line = 1;
    std::string section;
    ConfigFile out;

    [[noreturn]] void fail(const std::string& why, int at_line) const {
        throw ConfigError(origin + ":" + std::to_string(at_line) + ": " + why);
    }

    bool done() const { return pos >= text.size(); }
    char peek() const { return text[pos]; }
    void advance() {
        if (text[pos] == '\n') ++line;
        ++pos;
    }

    void skip_ws_and_comments(bool stop_at_newline) {
        while (!done()) {
            char c = peek();
            if (c == '#') {
                while (!done() && peek() != '\n') advance();
            } else if (c == '\n') {
                if (stop_at_newline) return;
                advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                return;
            }
        }
    }

    std::string read_key() {
        size_t start = pos;
        while (!done() && is_key_char(peek())) advance();
        if (pos == start) fail("expected a key", line);
        std::string key(text.substr(start, pos - start));
        if (key.front() == '.' || key.back() == '.' || key.find("..") != std::string::npos)
            fail("malformed key '" + key + "'", line);
        return key;
    }

    Value read_string() {
        int at = line;
        advance();  // opening quote
        std::string s;
        while (true) {
            if (done() || peek() == '\n') fail("unterminated string", at);
            char c = peek();
            advance();
            if (c == '"') break;
            if (c == '\\') {
                if (done()) fail("unterminated string", at);
                char e = peek();
                advance();
                switch (e) {
                    case '"': s += '"'; break;
                    case '\\': s += '\\'; break;
                    case 'n': s += '\n'; break;
                    case 't': s += '\t'; break;
                    case 'r': s += '\r'; break;
                    default: fail(std::string("unknown escape '\\") + e + "'", at);
                }
            } else {
                s += c;
            }
        }
        Value v;
        v.kind = Value::Kind::string;
        v.str = std::move(s);
        v.line = at;
        return v;
    }

    Value read_scalar_word() {
        int at = line;
        size_t start = pos;
        while (!done()) {
            char c = peek();
            if (c == ',' || c == ']' || c == '#' || c == '\n' ||
                std::isspace(static_cast<unsigned char>(c)))
                break;
            advance();
        }
        std::string word(text.substr(start, pos - start));
        if (word.empty()) fail("expected a value", at);
        Value v;
        v.line = at;
        if (word == "true" || word == "false") {
            v.kind = Value::Kind::boolean;
            v.boolean = word == "true";
            return v;
        }
        bool integral = !word.empty();
        size_t i = (word[0] == '+' || word[0] == '-') ? 1 : 0;
        if (i == word.size()) integral = false;
        for (; i < word.size() && integral; ++i)
            if (!std::isdigit(static_cast<unsigned char>(word[i]))) integral = false;
        if (integral) {
            try {
                v.integer = std::stoll(word);
            } catch (const std::exception&) {
                fail("integer out of range '" + word + "'", at);
            }
            v.kind = Value::Kind::integer;
            v.floating = static_cast<double>(v.integer);
            return v;
        }
        char* end = nullptr;
        double d = std::strtod(word.c_str(), &end);
        if (end == word.c_str() + word.size()) {
            v.kind = Value::Kind::floating;
            v.floating = d;
            return v;
        }
        fail("cannot parse value '" + word + "' (strings need quotes)", at);
    }

    Value read_value(bool inside_array) {
        skip_ws_and_comments(/*stop_at_newline=*/!inside_array);
        if (done() || peek() == '\n') fail("missing value", line);
        char c = peek();
        if (c == '"') return read_string();
        if (c == '[') {
            if (inside_array) fail("nested arrays are not supported", line);
            int at = line;
            advance();
            Value v;
            v.kind = Value::Kind::array;
            v.line = at;
            while (true) {
                skip_ws_and_comments(/*stop_at_newline=*/false);
                if (done()) fail("unterminated array", at);
                if (peek() == ']') {
                    advance();
                    break;
                }
                v.items.push_back(read_value(/*inside_array=*/true));
                skip_ws_and_comments(/*stop_at_newline=*/false);
                if (done()) fail("unterminated array", at);
                if (peek() == ',') {
                    advance();
                } else if (peek() != ']') {
                    fail("expected ',' or ']' in array", line);
                }
            }
            return v;
        }
        return read_scalar_word();
    }

    void run() {
        while (true) {
            skip_ws_and_comments(/*stop_at_newline=*/false);
            if (done()) return;
            int at = line;
            if (peek() == '[') {
                advance();
                skip_ws_and_comments(/*stop_at_newline=*/true);
                section = read_key();
                skip_ws_and_comments(/*stop_at_newline=*/true);
                if (done() || peek() != ']') fail("unterminated section header", at);
                advance();
                skip_ws_and_comments(/*stop_at_newline=*/true);
                if (!done() && peek() != '\n') fail("trailing characters after section", at);
                continue;
            }
            std::string key = read_key();
            skip_ws_and_comments(/*stop_at_newline=*/true);
            if (done() || peek() != '=') fail("expected '=' after key '" + key + "'", at);
            advance();
            Value v = read_value(/*inside_array=*/false);
            skip_ws_and_comments(/*stop_at_newline=*/true);
            if (!done() && peek() != '\n') fail("trailing characters after value", at);
            std::string full = section.empty() ? key : section + "." + key;
            if (!out.values.emplace(full, std::move(v)).second)
                fail("duplicate key '" + full + "'", at);
        }
    }
};

[[noreturn]] void type_error(const ConfigFile& cf, const std::string& key, const Value& v,
                             std::string_view wanted) {
    throw ConfigError(cf.origin + ":" + std::to_string(v.line) + ": key '" + key + "' is " +
                      std::string(v.kind_name()) + ", expected " + std::string(wanted));
}

}  // namespace

std::string_view Value::kind_name() const {
    switch (kind) {
        case Kind::string: return "a string";
        case Kind::integer: return "an integer";
        case Kind::floating: return "a float";
        case Kind::boolean: return "a boolean";
        case Kind::array: return "an array";
    }
    return "unknown";
}

std::string ConfigFile::get_string(const std::string& key, std::string_view fallback) const {
    auto it = values.find(key);
    if (it == values.end()) return std::string(fallback);
    if (it->second.kind != Value::Kind::string) type_error(*this, key, it->second, "a string");
    return it->second.str;
}

std::string ConfigFile::require_string(const std::string& key) const {
    if (!has(key)) throw ConfigError(origin + ": missing required key '" + key + "'");
    return get_string(key, "");
}

int64_t ConfigFile::get_int(const std::string& key, int64_t fallback) const {
    auto it = values.find(key);
    if (it == values.end()) return fallback;
    if (it->second.kind != Value::Kind::integer) type_error(*this, key, it->second, "an integer");
    return it->second.integer;
}

double ConfigFile::get_double(const std::string& key, double fallback) const {
    auto it = values.find(key);
    if (it == values.end()) return fallback;
    if (it->second.kind != Value::Kind::integer && it->second.kind != Value::Kind::floating)
        type_error(*this, key, it->second, "a number");
    return it->second.floating;
}

bool ConfigFile::get_bool(const std::string& key, bool fallback) const {
    auto it = values.find(key);
    if (it == values.end()) return fallback;
    if (it->second.kind != Value::Kind::boolean) type_error(*this, key, it->second, "a boolean");
    return it->second.boolean;
}

std::vector<std::string> ConfigFile::get_string_array(const std::string& key,
                                                      std::vector<std::string> fallback) const {
    auto it = values.find(key);
    if (it == values.end()) return fallback;
    if (it->second.kind != Value::Kind::array)
        type_error(*this, key, it->second, "an array of strings");
    std::vector<std::string> out;
    for (const Value& item : it->second.items) {
        if (item.kind != Value::Kind::string)
            type_error(*this, key, item, "an array of strings");
        out.push_back(item.str);
    }
    return out;
}

void ConfigFile::reject_unknown(const std::vector<std::string>& known) const {
    for (const auto& [key, value] : values) {
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ConfigError(origin + ":" + std::to_string(value.line) + ": unknown key '" +
                              key + "'");
    }
}

ConfigFile parse_config(std::string_view text, std::string origin) {
    Parser p;
    p.text = text;
    p.origin = std::move(origin);
    p.out.origin = p.origin;
    p.run();
    return std::move(p.out);
}

ConfigFile load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.string());
}

}  // namespace wb::cfg
