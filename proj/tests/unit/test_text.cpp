#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "windowbench/error.hpp"
#include "windowbench/text/document.hpp"
#include "windowbench/text/porter.hpp"
#include "windowbench/text/tokenize.hpp"
#include "windowbench/text/vocab.hpp"

using namespace wb;

TEST_CASE("tokenize splits, lowercases, and masks numbers") {
    std::vector<std::string> tokens = text::tokenize("Pain 7/10 at 0900; BP 120/80.");
    std::vector<std::string> want = {"pain", "<num>", "<num>", "at",    "<num>",
                                     "bp",   "<num>", "<num>"};
    CHECK(tokens == want);
    CHECK(text::tokenize("x2 alpha-3 0.5") ==
          std::vector<std::string>{"x2", "alpha", "<num>", "<num>", "<num>"});
    CHECK(text::tokenize("").empty());
    CHECK(text::tokenize("  --  ").empty());
}

TEST_CASE("stem passes placeholders and mixed tokens through") {
    CHECK(text::stem("<num>") == "<num>");
    CHECK(text::stem("x2") == "x2");
    CHECK(text::stem("caresses") == "caress");
}

TEST_CASE("porter stemmer matches the full frozen reference vectors") {
    std::ifstream in(std::string(WINDOWBENCH_TEST_DATA_DIR) + "/porter_vectors.tsv");
    REQUIRE(in.good());
    std::string line;
    int64_t total = 0, mismatched = 0;
    std::string first_bad;
    while (std::getline(in, line)) {
        size_t tab = line.find('\t');
        REQUIRE(tab != std::string::npos);
        std::string word = line.substr(0, tab);
        std::string want = line.substr(tab + 1);
        ++total;
        if (text::porter_stem(word) != want) {
            if (mismatched == 0)
                first_bad = word + " -> " + text::porter_stem(word) + " (want " + want + ")";
            ++mismatched;
        }
    }
    CHECK(total == 23531);
    CHECK_MESSAGE(mismatched == 0, "first mismatch: ", first_bad);
}

TEST_CASE("concat joins notes with the delimiter and keeps order") {
    text::TokenizedNote a{"n1", {"alpha", "beta"}};
    text::TokenizedNote b{"n2", {"gamma"}};
    text::TokenizedNote c{"n3", {}};
    std::vector<text::TokenizedNote> notes = {a, b, c};
    text::Document doc = text::concat_notes("s1", notes);
    CHECK(doc.surgery_id == "s1");
    CHECK(doc.tokens == std::vector<std::string>{"alpha", "beta", std::string(text::kNoteBreak),
                                                 "gamma", std::string(text::kNoteBreak)});
    CHECK(doc.l_concat() == 2 + 1 + 1 + 0 + 1);

    text::Document empty = text::concat_notes("s2", {});
    CHECK(empty.empty());
}

namespace {

text::Document doc_of(std::string id, std::vector<std::string> tokens) {
    text::Document d;
    d.surgery_id = std::move(id);
    d.tokens = std::move(tokens);
    return d;
}

}  // namespace

TEST_CASE("vocabulary ranks by df desc then token asc and applies min_df") {
    std::vector<text::Document> docs;
    // "common" in 4 docs, "mid" in 3, "aaa"/"bbb" in 2 each, "rare" in 1.
    docs.push_back(doc_of("d1", {"common", "mid", "aaa", "rare"}));
    docs.push_back(doc_of("d2", {"common", "mid", "aaa"}));
    docs.push_back(doc_of("d3", {"common", "mid", "bbb", "bbb"}));
    docs.push_back(doc_of("d4", {"common", "bbb"}));
    text::Vocabulary v = text::build_vocab(docs, /*min_df=*/2, /*max_size=*/100, "train");
    REQUIRE(v.size() == 4);
    CHECK(v.token(0) == "common");
    CHECK(v.token(1) == "mid");
    CHECK(v.token(2) == "aaa");  // df tie with bbb broken by token order
    CHECK(v.token(3) == "bbb");
    CHECK(v.index_of("rare") == -1);
    CHECK(v.df(0) == 4);
    CHECK(v.df(2) == 2);
}

TEST_CASE("vocabulary df counts documents, not occurrences") {
    std::vector<text::Document> docs = {doc_of("d1", {"dup", "dup", "dup"}),
                                        doc_of("d2", {"dup"})};
    text::Vocabulary v = text::build_vocab(docs, 1, 100, "train");
    REQUIRE(v.size() == 1);
    CHECK(v.df(0) == 2);
}

TEST_CASE("vocabulary truncates to max_size after ranking") {
    std::vector<text::Document> docs;
    docs.push_back(doc_of("d1", {"a", "b", "c"}));
    docs.push_back(doc_of("d2", {"a", "b"}));
    docs.push_back(doc_of("d3", {"a"}));
    text::Vocabulary v = text::build_vocab(docs, 1, 2, "train");
    REQUIRE(v.size() == 2);
    CHECK(v.token(0) == "a");
    CHECK(v.token(1) == "b");
    CHECK(v.index_of("c") == -1);
}

TEST_CASE("note delimiter is exempt from min_df pruning") {
    std::vector<text::Document> docs = {
        doc_of("d1", {"alpha", std::string(text::kNoteBreak), "alpha"}),
        doc_of("d2", {"alpha"})};
    text::Vocabulary v = text::build_vocab(docs, /*min_df=*/2, 100, "train");
    CHECK(v.contains(text::kNoteBreak));
    CHECK(v.contains("alpha"));
}

TEST_CASE("vocabulary TSV round-trip preserves order, dfs, and hash") {
    std::vector<text::Document> docs = {doc_of("d1", {"alpha", "beta"}),
                                        doc_of("d2", {"alpha"})};
    text::Vocabulary v = text::build_vocab(docs, 1, 100, "train");
    std::filesystem::path path =
        std::filesystem::temp_directory_path() / "wb_vocab_roundtrip.tsv";
    text::dump_vocab_tsv(v, path);
    text::Vocabulary loaded = text::load_vocab_tsv(path);
    REQUIRE(loaded.size() == v.size());
    for (int32_t i = 0; i < v.size(); ++i) {
        CHECK(loaded.token(i) == v.token(i));
        CHECK(loaded.df(i) == v.df(i));
    }
    CHECK(loaded.content_hash() == v.content_hash());
    std::filesystem::remove(path);
}

TEST_CASE("content hash changes when a token changes") {
    std::vector<text::Document> docs1 = {doc_of("d1", {"alpha"})};
    std::vector<text::Document> docs2 = {doc_of("d1", {"alphb"})};
    text::Vocabulary a = text::build_vocab(docs1, 1, 10, "train");
    text::Vocabulary b = text::build_vocab(docs2, 1, 10, "train");
    CHECK(a.content_hash() != b.content_hash());
}
