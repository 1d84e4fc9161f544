#include "windowbench/feat/icd.hpp"

#include <fstream>

#include "windowbench/error.hpp"

namespace wb::feat {

GemTable load_gem_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open GEM table: " + path.string());
    GemTable gem;
    std::string line;
    int64_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (lineno == 1) {
            if (line != "source_code,target_code")
                throw ConfigError(path.string() + ":1: expected header 'source_code,target_code'");
            continue;
        }
        size_t comma = line.find(',');
        if (comma == std::string::npos || comma == 0 || comma + 1 >= line.size() ||
            line.find(',', comma + 1) != std::string::npos)
            throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                              ": malformed GEM row '" + line + "'");
        gem.forward[line.substr(0, comma)] = line.substr(comma + 1);
    }
    return gem;
}

std::string map_icd9_to_icd10(const std::string& code, const GemTable& gem,
                              int64_t* unmapped_count) {
    auto it = gem.forward.find(code);
    if (it != gem.forward.end()) return it->second;
    if (unmapped_count) ++*unmapped_count;
    return std::string(kUnknownIcd);
}

std::string normalize_diagnosis(const ehr::Diagnosis& dx, const GemTable& gem,
                                int64_t* unmapped_count) {
    if (dx.version == ehr::IcdVersion::icd10) return dx.code;
    return map_icd9_to_icd10(dx.code, gem, unmapped_count);
}

std::string truncate_icd(std::string_view code) {
    std::string out;
    out.reserve(3);
    for (char c : code) {
        if (c == '.') continue;
        out.push_back(c);
        if (out.size() == 3) break;
    }
    return out;
}

}  // namespace wb::feat
