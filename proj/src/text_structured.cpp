#include "windowbench/text/structured_text.hpp"

#include <algorithm>
#include <cctype>

namespace wb::text {

StructuredTextSchema StructuredTextSchema::defaults() {
    return StructuredTextSchema{{
        {"encounter", "setting"},
        {"diagnosis", "code"},
        {"medication", "name"},
        {"lab", "code"},
        {"vital", "code"},
        {"admission", "*"},
    }};
}

const std::set<std::string>& default_time_sensitive_tables() {
    static const std::set<std::string> tables = {"encounter", "diagnosis", "medication", "lab",
                                                 "vital"};
    return tables;
}

namespace {

std::string render(std::string_view table, std::string_view field, std::string_view value) {
    std::string tok;
    tok.reserve(table.size() + field.size() + value.size() + 2);
    tok.append(table).push_back('.');
    tok.append(field).push_back('.');
    for (char c : value) {
        if (c == ' ')
            tok.push_back('_');
        else
            tok.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return tok;
}

}  // namespace

std::vector<std::string> structured_to_text(std::span<const ehr::Encounter> encounters,
                                            const StructuredTextSchema& schema,
                                            const std::set<std::string>& time_sensitive_tables) {
    std::vector<std::string> ordered, trailing;
    auto sink = [&](const std::string& table) -> std::vector<std::string>& {
        return time_sensitive_tables.count(table) ? ordered : trailing;
    };
    for (const ehr::Encounter& e : encounters) {
        for (const auto& [table, field] : schema.categorical) {
            std::vector<std::string>& out = sink(table);
            if (table == "encounter" && field == "setting") {
                out.push_back(render(table, field, ehr::to_string(e.setting)));
            } else if (table == "diagnosis" && field == "code") {
                for (const ehr::Diagnosis& d : e.diagnoses) out.push_back(render(table, field, d.code));
            } else if (table == "medication" && field == "name") {
                for (const ehr::Medication& m : e.medications)
                    out.push_back(render(table, field, m.name));
            } else if (table == "lab" && field == "code") {
                for (const ehr::Lab& l : e.labs) out.push_back(render(table, field, l.code));
            } else if (table == "vital" && field == "code") {
                for (const ehr::Vital& v : e.vitals) out.push_back(render(table, field, v.code));
            } else if (table == "admission") {
                for (const auto& [k, v] : e.admission_info)
                    if (field == "*" || field == k) out.push_back(render(table, k, v));
            }
        }
    }
    std::sort(trailing.begin(), trailing.end());
    ordered.insert(ordered.end(), std::make_move_iterator(trailing.begin()),
                   std::make_move_iterator(trailing.end()));
    return ordered;
}

std::vector<std::string> structured_to_text(std::span<const ehr::Encounter> encounters) {
    return structured_to_text(encounters, StructuredTextSchema::defaults(),
                              default_time_sensitive_tables());
}

}  // namespace wb::text
