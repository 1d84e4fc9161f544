#include "windowbench/ehr/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "windowbench/error.hpp"
#include "windowbench/log.hpp"

namespace wb::ehr {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

struct LineContext {
    const std::filesystem::path& file;
    int64_t line;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError(file.filename().string() + ":" + std::to_string(line) + ": " + msg);
    }
};

const json& require(const json& obj, const char* key, const LineContext& ctx) {
    auto it = obj.find(key);
    if (it == obj.end()) ctx.fail(std::string("missing field '") + key + "'");
    return *it;
}

std::string require_string(const json& obj, const char* key, const LineContext& ctx) {
    const json& v = require(obj, key, ctx);
    if (!v.is_string()) ctx.fail(std::string("field '") + key + "' must be a string");
    return v.get<std::string>();
}

Date require_date(const json& obj, const char* key, const LineContext& ctx) {
    std::string s = require_string(obj, key, ctx);
    try {
        return parse_date(s);
    } catch (const std::exception& e) {
        ctx.fail(std::string("field '") + key + "': " + e.what());
    }
}

std::optional<Date> optional_date(const json& obj, const char* key, const LineContext& ctx) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) ctx.fail(std::string("field '") + key + "' must be a string date");
    try {
        return parse_date(it->get<std::string>());
    } catch (const std::exception& e) {
        ctx.fail(std::string("field '") + key + "': " + e.what());
    }
}

Sex parse_sex(const std::string& s, const LineContext& ctx) {
    if (s == "female") return Sex::female;
    if (s == "male") return Sex::male;
    if (s == "other") return Sex::other;
    ctx.fail("unknown sex '" + s + "'");
}

Race parse_race(const std::string& s, const LineContext& ctx) {
    if (s == "white") return Race::white;
    if (s == "black") return Race::black;
    if (s == "asian") return Race::asian;
    if (s == "hispanic") return Race::hispanic;
    if (s == "other") return Race::other;
    ctx.fail("unknown race '" + s + "'");
}

Setting parse_setting(const std::string& s, const LineContext& ctx) {
    if (s == "inpatient") return Setting::inpatient;
    if (s == "outpatient") return Setting::outpatient;
    ctx.fail("unknown setting '" + s + "'");
}

IcdVersion parse_icd_version(const std::string& s, const LineContext& ctx) {
    if (s == "icd9") return IcdVersion::icd9;
    if (s == "icd10") return IcdVersion::icd10;
    ctx.fail("unknown diagnosis code version '" + s + "'");
}

// Scans file line by line, invoking fn(parsed object, ctx) per non-empty line.
template <typename Fn>
void for_each_json_line(const std::filesystem::path& file, Fn&& fn) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open " + file.string());
    std::string line;
    int64_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        LineContext ctx{file, lineno};
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            ctx.fail(std::string("invalid JSON: ") + e.what());
        }
        if (!obj.is_object()) ctx.fail("line is not a JSON object");
        fn(obj, ctx);
    }
}

class Blacklist {
public:
    explicit Blacklist(const std::vector<std::string>& names) {
        for (const std::string& n : names) lowered_.insert(lower(n));
    }
    bool contains(std::string_view name) const { return lowered_.count(lower(name)) > 0; }

private:
    std::unordered_set<std::string> lowered_;
};

}  // namespace

Corpus load_corpus(const std::filesystem::path& dir,
                   const std::vector<std::string>& variable_blacklist) {
    Corpus corpus;
    Blacklist blacklist(variable_blacklist);
    int64_t dropped_fields = 0;

    std::unordered_set<std::string> patient_ids;
    for_each_json_line(dir / "patients.jsonl", [&](const json& obj, const LineContext& ctx) {
        Patient p;
        p.patient_id = require_string(obj, "patient_id", ctx);
        if (!patient_ids.insert(p.patient_id).second)
            ctx.fail("duplicate patient_id '" + p.patient_id + "'");
        p.birth_date = require_date(obj, "birth_date", ctx);
        p.sex = parse_sex(require_string(obj, "sex", ctx), ctx);
        p.race = parse_race(require_string(obj, "race", ctx), ctx);
        p.death_date = optional_date(obj, "death_date", ctx);
        if (p.death_date && *p.death_date < p.birth_date)
            ctx.fail("death_date precedes birth_date");
        if (auto it = obj.find("demographics"); it != obj.end()) {
            if (!it->is_object()) ctx.fail("field 'demographics' must be an object");
            for (const auto& [k, v] : it->items())
                if (v.is_string() && !blacklist.contains(k))
                    p.demographics[k] = v.get<std::string>();
        }
        corpus.patients.push_back(std::move(p));
    });

    std::unordered_set<std::string> encounter_ids;
    for_each_json_line(dir / "encounters.jsonl", [&](const json& obj, const LineContext& ctx) {
        Encounter e;
        e.encounter_id = require_string(obj, "encounter_id", ctx);
        if (!encounter_ids.insert(e.encounter_id).second)
            ctx.fail("duplicate encounter_id '" + e.encounter_id + "'");
        e.patient_id = require_string(obj, "patient_id", ctx);
        e.admit_date = require_date(obj, "admit_date", ctx);
        e.discharge_date = optional_date(obj, "discharge_date", ctx);
        if (e.discharge_date && *e.discharge_date < e.admit_date)
            ctx.fail("discharge_date precedes admit_date");
        e.setting = parse_setting(require_string(obj, "setting", ctx), ctx);
        if (auto it = obj.find("cpt_codes"); it != obj.end())
            for (const json& c : *it) e.cpt_codes.push_back(c.get<std::string>());
        if (auto it = obj.find("diagnoses"); it != obj.end())
            for (const json& d : *it) {
                LineContext dctx = ctx;
                Diagnosis dx;
                dx.code = require_string(d, "code", dctx);
                if (dx.code.empty()) ctx.fail("empty diagnosis code");
                dx.version = parse_icd_version(require_string(d, "version", dctx), dctx);
                e.diagnoses.push_back(std::move(dx));
            }
        if (auto it = obj.find("medications"); it != obj.end())
            for (const json& m : *it) {
                Medication med;
                med.name = m.value("name", "");
                med.code = m.value("code", "");
                med.dose = m.value("dose", 0.0);
                med.unit = m.value("unit", "");
                if (blacklist.contains(med.name) || blacklist.contains(med.code)) {
                    ++dropped_fields;
                    continue;
                }
                e.medications.push_back(std::move(med));
            }
        if (auto it = obj.find("labs"); it != obj.end())
            for (const json& l : *it) {
                Lab lab;
                lab.code = require_string(l, "code", ctx);
                if (auto v = l.find("value"); v != l.end() && !v->is_null())
                    lab.value = v->get<double>();
                lab.unit = l.value("unit", "");
                if (blacklist.contains(lab.code)) {
                    ++dropped_fields;
                    continue;
                }
                e.labs.push_back(std::move(lab));
            }
        if (auto it = obj.find("vitals"); it != obj.end())
            for (const json& v : *it) {
                Vital vit;
                vit.code = require_string(v, "code", ctx);
                vit.value = v.value("value", 0.0);
                vit.unit = v.value("unit", "");
                if (blacklist.contains(vit.code)) {
                    ++dropped_fields;
                    continue;
                }
                e.vitals.push_back(std::move(vit));
            }
        if (auto it = obj.find("admission_info"); it != obj.end()) {
            if (!it->is_object()) ctx.fail("field 'admission_info' must be an object");
            for (const auto& [k, v] : it->items()) {
                if (blacklist.contains(k)) {
                    ++dropped_fields;
                    continue;
                }
                if (v.is_string()) e.admission_info[k] = v.get<std::string>();
            }
        }
        if (!patient_ids.count(e.patient_id))
            corpus.warnings.push_back("encounter " + e.encounter_id +
                                      " references unknown patient " + e.patient_id);
        corpus.encounters.push_back(std::move(e));
    });

    std::unordered_set<std::string> note_ids;
    for_each_json_line(dir / "notes.jsonl", [&](const json& obj, const LineContext& ctx) {
        ClinicalNote n;
        n.note_id = require_string(obj, "note_id", ctx);
        if (!note_ids.insert(n.note_id).second)
            ctx.fail("duplicate note_id '" + n.note_id + "'");
        n.patient_id = require_string(obj, "patient_id", ctx);
        n.date = require_date(obj, "date", ctx);
        n.text = require_string(obj, "text", ctx);
        if (n.text.empty() && !obj.value("empty_text", false))
            ctx.fail("note text is empty without empty_text flag");
        if (!patient_ids.count(n.patient_id))
            corpus.warnings.push_back("note " + n.note_id + " references unknown patient " +
                                      n.patient_id);
        corpus.notes.push_back(std::move(n));
    });

    corpus.reindex();
    for (const std::string& w : corpus.warnings) log::info("load_corpus", {{"warning", w}});
    log::info("load_corpus", {{"dir", dir.string()},
                              {"patients", std::to_string(corpus.patients.size())},
                              {"encounters", std::to_string(corpus.encounters.size())},
                              {"notes", std::to_string(corpus.notes.size())},
                              {"blacklisted_fields_dropped", std::to_string(dropped_fields)},
                              {"warnings", std::to_string(corpus.warnings.size())}});
    return corpus;
}

Corpus load_corpus(const std::filesystem::path& dir) {
    return load_corpus(dir, default_variable_blacklist());
}

void write_corpus_jsonl(const Corpus& corpus, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);

    auto open = [&](const char* name) {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) throw ConfigError("cannot write " + (dir / name).string());
        return out;
    };

    {
        std::ofstream out = open("patients.jsonl");
        for (const Patient& p : corpus.patients) {
            ordered_json j;
            j["patient_id"] = p.patient_id;
            j["birth_date"] = format_date(p.birth_date);
            j["sex"] = to_string(p.sex);
            j["race"] = to_string(p.race);
            if (p.death_date) j["death_date"] = format_date(*p.death_date);
            if (!p.demographics.empty()) j["demographics"] = p.demographics;
            out << j.dump() << '\n';
        }
    }
    {
        std::ofstream out = open("encounters.jsonl");
        for (const Encounter& e : corpus.encounters) {
            ordered_json j;
            j["encounter_id"] = e.encounter_id;
            j["patient_id"] = e.patient_id;
            j["admit_date"] = format_date(e.admit_date);
            if (e.discharge_date) j["discharge_date"] = format_date(*e.discharge_date);
            j["setting"] = to_string(e.setting);
            j["cpt_codes"] = e.cpt_codes;
            j["diagnoses"] = ordered_json::array();
            for (const Diagnosis& d : e.diagnoses)
                j["diagnoses"].push_back({{"code", d.code}, {"version", to_string(d.version)}});
            j["medications"] = ordered_json::array();
            for (const Medication& m : e.medications)
                j["medications"].push_back(
                    {{"name", m.name}, {"code", m.code}, {"dose", m.dose}, {"unit", m.unit}});
            j["labs"] = ordered_json::array();
            for (const Lab& l : e.labs) {
                ordered_json lj{{"code", l.code}};
                if (l.value) lj["value"] = *l.value;
                lj["unit"] = l.unit;
                j["labs"].push_back(std::move(lj));
            }
            j["vitals"] = ordered_json::array();
            for (const Vital& v : e.vitals)
                j["vitals"].push_back({{"code", v.code}, {"value", v.value}, {"unit", v.unit}});
            if (!e.admission_info.empty()) j["admission_info"] = e.admission_info;
            out << j.dump() << '\n';
        }
    }
    {
        std::ofstream out = open("notes.jsonl");
        for (const ClinicalNote& n : corpus.notes) {
            ordered_json j;
            j["note_id"] = n.note_id;
            j["patient_id"] = n.patient_id;
            j["date"] = format_date(n.date);
            j["text"] = n.text;
            out << j.dump() << '\n';
        }
    }
}

}  // namespace wb::ehr
