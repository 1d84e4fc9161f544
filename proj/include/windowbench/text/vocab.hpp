#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "windowbench/text/document.hpp"

namespace wb::text {

// Token -> dense index map fitted on training documents only. Tokens are
// ranked by (document frequency desc, token asc); reserved tokens (the note
// delimiter) are exempt from min_df pruning and max_size truncation.
class Vocabulary {
public:
    int32_t index_of(std::string_view token) const;  // -1 when absent
    bool contains(std::string_view token) const { return index_of(token) >= 0; }
    int32_t size() const { return static_cast<int32_t>(tokens_.size()); }
    const std::string& token(int32_t index) const { return tokens_[static_cast<size_t>(index)]; }
    int64_t df(int32_t index) const { return dfs_[static_cast<size_t>(index)]; }

    int64_t min_df = 0;
    int64_t max_size = 0;
    std::string fitted_on;  // split id, e.g. "train"

    // Stable content hash used to pair serialized models with the vocabulary
    // they were trained against.
    uint64_t content_hash() const;

    friend Vocabulary build_vocab(std::span<const Document> training_docs, int64_t min_df,
                                  int64_t max_size, std::string fitted_on);
    friend Vocabulary load_vocab_tsv(const std::filesystem::path& path);

private:
    void add(std::string token, int64_t df);

    std::vector<std::string> tokens_;
    std::vector<int64_t> dfs_;
    std::unordered_map<std::string, int32_t> index_;
};

inline constexpr int64_t kDefaultMinDf = 5;
inline constexpr int64_t kDefaultMaxVocab = 50000;

Vocabulary build_vocab(std::span<const Document> training_docs, int64_t min_df = kDefaultMinDf,
                       int64_t max_size = kDefaultMaxVocab, std::string fitted_on = "train");

// TSV audit format: token <TAB> index <TAB> df, one row per token.
void dump_vocab_tsv(const Vocabulary& vocab, const std::filesystem::path& path);
Vocabulary load_vocab_tsv(const std::filesystem::path& path);

}  // namespace wb::text
