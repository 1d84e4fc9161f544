#include "windowbench/text/document.hpp"

#include "windowbench/text/tokenize.hpp"

namespace wb::text {

TokenizedNote tokenize_note(std::string note_id, std::string_view text) {
    return TokenizedNote{std::move(note_id), tokenize_and_stem(text)};
}

Document concat_notes(std::string surgery_id, std::span<const TokenizedNote> notes,
                      std::string_view delimiter) {
    Document doc{std::move(surgery_id), {}};
    size_t total = 0;
    for (const TokenizedNote& n : notes) total += n.tokens.size();
    if (!notes.empty()) total += notes.size() - 1;
    doc.tokens.reserve(total);
    for (size_t i = 0; i < notes.size(); ++i) {
        if (i > 0) doc.tokens.emplace_back(delimiter);
        doc.tokens.insert(doc.tokens.end(), notes[i].tokens.begin(), notes[i].tokens.end());
    }
    return doc;
}

Document concat_notes(std::string surgery_id, std::span<const TokenizedNote> notes) {
    return concat_notes(std::move(surgery_id), notes, kNoteBreak);
}

}  // namespace wb::text
