#include "windowbench/text/tokenize.hpp"

#include <cctype>

#include "windowbench/text/porter.hpp"

namespace wb::text {

namespace {

bool is_word_byte(unsigned char c) { return std::isalnum(c) != 0; }

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    size_t i = 0;
    const size_t n = text.size();
    while (i < n) {
        while (i < n && !is_word_byte(static_cast<unsigned char>(text[i]))) ++i;
        if (i >= n) break;
        size_t start = i;
        bool all_digits = true;
        while (i < n && is_word_byte(static_cast<unsigned char>(text[i]))) {
            if (!std::isdigit(static_cast<unsigned char>(text[i]))) all_digits = false;
            ++i;
        }
        if (all_digits) {
            out.emplace_back(kNumToken);
        } else {
            std::string tok(text.substr(start, i - start));
            for (char& c : tok) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            out.push_back(std::move(tok));
        }
    }
    return out;
}

std::string stem(std::string_view token) {
    for (char c : token)
        if (c < 'a' || c > 'z') return std::string(token);
    return porter_stem(token);
}

std::vector<std::string> tokenize_and_stem(std::string_view text) {
    std::vector<std::string> toks = tokenize(text);
    for (std::string& t : toks) t = stem(t);
    return toks;
}

}  // namespace wb::text
