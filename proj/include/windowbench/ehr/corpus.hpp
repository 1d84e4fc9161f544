#pragma once

#include <filesystem>
#include <vector>

#include "windowbench/ehr/types.hpp"

namespace wb::ehr {

// Reads patients.jsonl, encounters.jsonl, notes.jsonl from dir. Malformed
// lines raise ConfigError naming file and line; encounters/notes referencing
// unknown patients load anyway and are reported in Corpus::warnings. Fields
// named in variable_blacklist are dropped from labs/vitals/medications and
// admission_info at ingestion.
Corpus load_corpus(const std::filesystem::path& dir,
                   const std::vector<std::string>& variable_blacklist);
Corpus load_corpus(const std::filesystem::path& dir);

// Writers used by the synthetic generator; one JSON object per line, keys in
// a fixed order so identical inputs serialize to identical bytes.
void write_corpus_jsonl(const Corpus& corpus, const std::filesystem::path& dir);

}  // namespace wb::ehr
