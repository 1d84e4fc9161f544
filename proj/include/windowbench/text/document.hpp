#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wb::text {

// One note after tokenization + stemming. length() is Ln, the token count.
struct TokenizedNote {
    std::string note_id;
    std::vector<std::string> tokens;

    size_t length() const { return tokens.size(); }
};

TokenizedNote tokenize_note(std::string note_id, std::string_view text);

// All of a surgery's in-window notes joined into one token sequence, with a
// delimiter token between consecutive notes. For N >= 1 notes of lengths Li,
// tokens.size() == sum(Li) + (N - 1); zero notes yield an empty document.
struct Document {
    std::string surgery_id;
    std::vector<std::string> tokens;

    size_t l_concat() const { return tokens.size(); }
    bool empty() const { return tokens.empty(); }
};

// Notes must already be date-ordered by the caller.
Document concat_notes(std::string surgery_id, std::span<const TokenizedNote> notes,
                      std::string_view delimiter);
Document concat_notes(std::string surgery_id, std::span<const TokenizedNote> notes);

}  // namespace wb::text
