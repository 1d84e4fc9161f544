#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace wb::text {

// Placeholder substituted for pure-digit tokens to control sparsity.
inline constexpr std::string_view kNumToken = "<num>";
// Reserved delimiter inserted between concatenated notes.
inline constexpr std::string_view kNoteBreak = "<note_break>";

// Splits on runs of non-alphanumeric bytes, lowercases, and replaces
// pure-digit tokens with kNumToken. Non-ASCII bytes act as separators.
std::vector<std::string> tokenize(std::string_view text);

// Porter stem for all-letter tokens; placeholders and any token containing
// a non-letter pass through unchanged.
std::string stem(std::string_view token);

// tokenize + stem in one pass.
std::vector<std::string> tokenize_and_stem(std::string_view text);

}  // namespace wb::text
