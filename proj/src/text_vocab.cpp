#include "windowbench/text/vocab.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <map>

#include "windowbench/error.hpp"
#include "windowbench/rng.hpp"
#include "windowbench/text/tokenize.hpp"

namespace wb::text {

int32_t Vocabulary::index_of(std::string_view token) const {
    auto it = index_.find(std::string(token));
    return it == index_.end() ? -1 : it->second;
}

uint64_t Vocabulary::content_hash() const {
    uint64_t h = fnv1a("vocab");
    for (size_t i = 0; i < tokens_.size(); ++i) {
        h = fnv1a(tokens_[i], h);
        h = fnv1a("\x1f", h);
    }
    return h;
}

void Vocabulary::add(std::string token, int64_t df) {
    index_.emplace(token, static_cast<int32_t>(tokens_.size()));
    tokens_.push_back(std::move(token));
    dfs_.push_back(df);
}

Vocabulary build_vocab(std::span<const Document> training_docs, int64_t min_df, int64_t max_size,
                       std::string fitted_on) {
    // std::map keeps candidate enumeration ordered, making ties deterministic
    // without a secondary sort-key pass.
    std::map<std::string, int64_t> df;
    std::vector<std::string_view> uniq;
    for (const Document& doc : training_docs) {
        uniq.assign(doc.tokens.begin(), doc.tokens.end());
        std::sort(uniq.begin(), uniq.end());
        uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
        for (std::string_view tok : uniq) ++df[std::string(tok)];
    }

    struct Cand {
        const std::string* token;
        int64_t df;
        bool reserved;
    };
    std::vector<Cand> cands;
    cands.reserve(df.size());
    for (const auto& [tok, d] : df) {
        bool reserved = tok == kNoteBreak;
        if (d >= min_df || reserved) cands.push_back({&tok, d, reserved});
    }
    std::stable_sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        if (a.df != b.df) return a.df > b.df;
        return *a.token < *b.token;
    });

    Vocabulary vocab;
    vocab.min_df = min_df;
    vocab.max_size = max_size;
    vocab.fitted_on = std::move(fitted_on);
    int64_t non_reserved = 0;
    for (const Cand& c : cands) {
        if (!c.reserved) {
            if (non_reserved >= max_size) continue;
            ++non_reserved;
        }
        vocab.add(*c.token, c.df);
    }
    if (vocab.size() == 0) throw ConfigError("vocabulary is empty: no token meets min_df");
    return vocab;
}

void dump_vocab_tsv(const Vocabulary& vocab, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write vocabulary file: " + path.string());
    for (int32_t i = 0; i < vocab.size(); ++i)
        out << vocab.token(i) << '\t' << i << '\t' << vocab.df(i) << '\n';
    if (!out.flush()) throw ConfigError("short write to vocabulary file: " + path.string());
}

Vocabulary load_vocab_tsv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read vocabulary file: " + path.string());
    Vocabulary vocab;
    std::string line;
    int64_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        char token[4096];
        long long index = 0, df = 0;
        if (std::sscanf(line.c_str(), "%4095[^\t]\t%lld\t%lld", token, &index, &df) != 3 ||
            index != vocab.size())
            throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                              ": malformed vocabulary row");
        vocab.add(token, df);
    }
    if (vocab.size() == 0) throw ConfigError("vocabulary file is empty: " + path.string());
    return vocab;
}

}  // namespace wb::text
