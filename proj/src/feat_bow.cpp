#include "windowbench/feat/bow.hpp"

#include <cmath>
#include <map>

#include "windowbench/error.hpp"

namespace wb::feat {

std::string_view to_string(Norm n) {
    switch (n) {
        case Norm::none: return "none";
        case Norm::l1: return "l1";
        default: return "l2";
    }
}

Norm parse_norm(std::string_view name) {
    if (name == "none") return Norm::none;
    if (name == "l1") return Norm::l1;
    if (name == "l2") return Norm::l2;
    throw ConfigError("unknown norm '" + std::string(name) + "' (expected none|l1|l2)");
}

namespace {

std::map<int32_t, int64_t> token_counts(const text::Document& doc, const text::Vocabulary& vocab) {
    std::map<int32_t, int64_t> counts;
    for (const std::string& tok : doc.tokens) {
        int32_t idx = vocab.index_of(tok);
        if (idx >= 0) ++counts[idx];
    }
    return counts;
}

}  // namespace

SparseVector encode_binary_bow(const text::Document& doc, const text::Vocabulary& vocab) {
    SparseVector out;
    out.dim = vocab.size();
    for (const auto& [idx, count] : token_counts(doc, vocab)) out.entries.emplace_back(idx, 1.0);
    return out;
}

SparseVector encode_count_bow(const text::Document& doc, const text::Vocabulary& vocab) {
    SparseVector out;
    out.dim = vocab.size();
    for (const auto& [idx, count] : token_counts(doc, vocab))
        out.entries.emplace_back(idx, static_cast<double>(count));
    return out;
}

IdfTable fit_idf(std::span<const SparseVector> training_counts, int32_t vocab_size) {
    if (training_counts.empty()) throw ConfigError("cannot fit idf on zero documents");
    std::vector<int64_t> df(static_cast<size_t>(vocab_size), 0);
    for (const SparseVector& vec : training_counts)
        for (const auto& [idx, value] : vec.entries)
            if (value > 0) ++df[static_cast<size_t>(idx)];
    IdfTable table;
    table.n_train = static_cast<int64_t>(training_counts.size());
    table.idf.resize(static_cast<size_t>(vocab_size));
    for (size_t t = 0; t < table.idf.size(); ++t)
        table.idf[t] = std::log((1.0 + static_cast<double>(table.n_train)) /
                                (1.0 + static_cast<double>(df[t]))) +
                       1.0;
    return table;
}

SparseVector apply_norm(SparseVector v, Norm norm) {
    double denom = norm == Norm::l1 ? v.l1_norm() : norm == Norm::l2 ? v.l2_norm() : 1.0;
    if (norm != Norm::none && denom > 0.0) v.scale(1.0 / denom);
    return v;
}

SparseVector encode_tfidf(const SparseVector& counts, const IdfTable& idf, Norm norm) {
    if (counts.dim != idf.size())
        throw InvariantError("tf-idf dimension mismatch: counts " + std::to_string(counts.dim) +
                             " vs idf " + std::to_string(idf.size()));
    SparseVector out = counts;
    for (auto& [i, v] : out.entries) v *= idf.idf[static_cast<size_t>(i)];
    return apply_norm(std::move(out), norm);
}

}  // namespace wb::feat
