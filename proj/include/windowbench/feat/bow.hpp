#pragma once

#include <span>
#include <string>
#include <string_view>

#include "windowbench/feat/sparse.hpp"
#include "windowbench/text/document.hpp"
#include "windowbench/text/vocab.hpp"

namespace wb::feat {

enum class Norm { none, l1, l2 };

std::string_view to_string(Norm n);
Norm parse_norm(std::string_view name);

// Out-of-vocabulary tokens are ignored in both encoders.
SparseVector encode_binary_bow(const text::Document& doc, const text::Vocabulary& vocab);
SparseVector encode_count_bow(const text::Document& doc, const text::Vocabulary& vocab);

// Per-document l1/l2 normalization; zero vectors pass through unchanged.
SparseVector apply_norm(SparseVector v, Norm norm);

// Smoothed idf with unit shift: idf(t) = ln((1 + N) / (1 + df(t))) + 1.
struct IdfTable {
    int64_t n_train = 0;
    std::vector<double> idf;  // aligned to the vocabulary

    int32_t size() const { return static_cast<int32_t>(idf.size()); }
};

IdfTable fit_idf(std::span<const SparseVector> training_counts, int32_t vocab_size);

// count * idf per token, then an optional whole-vector norm; an all-zero
// vector passes through unchanged under any norm.
SparseVector encode_tfidf(const SparseVector& counts, const IdfTable& idf, Norm norm);

}  // namespace wb::feat
