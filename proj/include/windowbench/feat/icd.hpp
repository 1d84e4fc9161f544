#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>

#include "windowbench/ehr/types.hpp"

namespace wb::feat {

inline constexpr std::string_view kUnknownIcd = "UNK_ICD";

struct GemTable {
    std::unordered_map<std::string, std::string> forward;  // icd9 -> icd10
};

// CSV with header "source_code,target_code"; malformed rows are load errors.
GemTable load_gem_csv(const std::filesystem::path& path);

// Lookup with UNK_ICD fallback; unmapped codes are counted when a counter is
// supplied. Input must be an ICD-9 code.
std::string map_icd9_to_icd10(const std::string& code, const GemTable& gem,
                              int64_t* unmapped_count = nullptr);

// ICD-10 codes pass through; ICD-9 codes go through the GEM.
std::string normalize_diagnosis(const ehr::Diagnosis& dx, const GemTable& gem,
                                int64_t* unmapped_count = nullptr);

// Drops the dot and keeps the first three characters (the subchapter); codes
// that are shorter pass through.
std::string truncate_icd(std::string_view code);

}  // namespace wb::feat
