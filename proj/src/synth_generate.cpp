#include "windowbench/synth/generate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <unordered_set>

#include "windowbench/ehr/cohort.hpp"
#include "windowbench/ehr/corpus.hpp"
#include "windowbench/error.hpp"
#include "windowbench/log.hpp"
#include "windowbench/rng.hpp"
#include "windowbench/text/tokenize.hpp"

namespace wb::synth {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw ConfigError("synth config: " + msg);
}

bool fraction(double v) { return v >= 0.0 && v <= 1.0; }

// Zipf-like sampler over a fixed word list; common clinical words sit at the
// head so they dominate, invented terms fill the tail.
class WordSampler {
public:
    explicit WordSampler(std::vector<std::string> words) : words_(std::move(words)) {
        cum_.reserve(words_.size());
        double total = 0;
        for (size_t i = 0; i < words_.size(); ++i) {
            total += 1.0 / static_cast<double>(i + 3);
            cum_.push_back(total);
        }
        for (double& c : cum_) c /= total;
    }

    const std::string& draw(Rng& rng) const {
        double u = rng.uniform01();
        size_t i = static_cast<size_t>(
            std::lower_bound(cum_.begin(), cum_.end(), u) - cum_.begin());
        if (i >= words_.size()) i = words_.size() - 1;
        return words_[i];
    }

private:
    std::vector<std::string> words_;
    std::vector<double> cum_;
};

std::vector<std::string> build_vocab_words(const SynthConfig& cfg) {
    static const char* kCommon[] = {
        "patient",  "left",    "right",   "knee",     "hip",      "pain",    "history",
        "exam",     "normal",  "followup", "wound",    "incision", "range",   "motion",
        "stable",   "review",  "plan",    "continue", "ambulating", "therapy", "swelling",
        "mild",     "moderate", "denies",  "reports",  "clinic",   "post",    "operative",
        "surgical", "site",    "clean",   "dry",      "intact",   "sutures", "staples",
        "alignment", "good",   "daily",   "tolerated", "improving"};
    static const char* kPre[] = {"osteo", "arthro", "chondro", "myo",   "teno",  "fascio",
                                 "synovi", "capsul", "peri",   "infra", "supra", "retro",
                                 "fibro",  "liga",   "menisc", "patell", "femor", "tibi",
                                 "acetab", "troch"};
    static const char* kMid[] = {"flex", "grad", "lax",  "tens", "duct", "vers", "rot",
                                 "tract", "press", "fus",  "plast", "lyt",  "trop", "gen",
                                 "path",  "stas",  "clast", "blast", "derm", "vasc"};
    static const char* kSuf[] = {"ia",  "osis", "itis", "eal",  "ine", "ium", "or",
                                 "ant", "ive",  "ary",  "form", "oid", "al",  "ex"};

    std::unordered_set<std::string> signal(cfg.signal_tokens.begin(), cfg.signal_tokens.end());
    std::vector<std::string> words;
    for (const char* w : kCommon)
        if (!signal.count(w)) words.push_back(w);
    size_t np = std::size(kPre), nm = std::size(kMid), ns = std::size(kSuf);
    for (size_t i = 0; words.size() < static_cast<size_t>(cfg.background_vocab); ++i) {
        // Mixed-radix enumeration with a multiplicative stride walks the
        // combination space without repeats.
        size_t k = (i * 2654435761u) % (np * nm * ns);
        std::string w = std::string(kPre[k % np]) + kMid[(k / np) % nm] + kSuf[(k / (np * nm)) % ns];
        if (!signal.count(w) && std::find(words.begin(), words.end(), w) == words.end())
            words.push_back(w);
        if (i > np * nm * ns * 4) break;
    }
    return words;
}

struct CodePools {
    std::vector<std::string> icd10;
    std::vector<std::string> icd9;
    std::vector<std::pair<std::string, std::string>> gem;  // icd9 -> icd10
    std::vector<std::string> meds;
    std::vector<std::string> labs;
    std::vector<std::string> vitals;
};

CodePools build_code_pools(const SynthConfig& cfg) {
    CodePools pools;
    Rng rng(mix_seed(cfg.seed, "code_pools"));
    std::set<std::string> signal(cfg.signal_codes.begin(), cfg.signal_codes.end());
    std::set<std::string> seen;
    while (pools.icd10.size() < 60) {
        char buf[8];
        std::snprintf(buf, sizeof buf, "%c%02d.%d", static_cast<char>('A' + rng.uniform_int(0, 25)),
                      static_cast<int>(rng.uniform_int(0, 99)),
                      static_cast<int>(rng.uniform_int(0, 9)));
        if (signal.count(buf) || !seen.insert(buf).second) continue;
        pools.icd10.push_back(buf);
    }
    while (pools.icd9.size() < 25) {
        char buf[8];
        std::snprintf(buf, sizeof buf, "%03d.%d", static_cast<int>(rng.uniform_int(100, 999)),
                      static_cast<int>(rng.uniform_int(0, 9)));
        if (!seen.insert(buf).second) continue;
        pools.icd9.push_back(buf);
        pools.gem.emplace_back(
            buf, pools.icd10[static_cast<size_t>(rng.uniform_int(
                     0, static_cast<int64_t>(pools.icd10.size()) - 1))]);
    }
    static const char* kMedRoots[] = {"relafen", "cortizan", "flexeril", "dolophar", "artrozol",
                                      "osteovan", "synvicor", "panaceq",  "thrombex", "venaplex"};
    for (const char* r : kMedRoots) {
        pools.meds.push_back(std::string(r) + "in");
        pools.meds.push_back(std::string(r) + "ol");
    }
    pools.labs = {"hgb", "wbc", "plt", "na", "k", "cr", "glu", "inr"};
    pools.vitals = {"hr", "sbp", "dbp", "temp", "spo2"};
    return pools;
}

double lab_mean(const std::string& code) {
    if (code == "hgb") return 13.5;
    if (code == "wbc") return 7.0;
    if (code == "plt") return 250.0;
    if (code == "na") return 140.0;
    if (code == "k") return 4.1;
    if (code == "cr") return 1.0;
    if (code == "glu") return 105.0;
    return 1.1;  // inr
}

double vital_mean(const std::string& code) {
    if (code == "hr") return 76.0;
    if (code == "sbp") return 128.0;
    if (code == "dbp") return 78.0;
    if (code == "temp") return 98.4;
    return 97.0;  // spo2
}

std::string sentence(Rng& rng, const WordSampler& sampler, int words) {
    std::string s;
    for (int i = 0; i < words; ++i) {
        std::string w = sampler.draw(rng);
        if (rng.uniform01() < 0.06) w = std::to_string(rng.uniform_int(1, 500));
        if (i == 0 && w[0] >= 'a' && w[0] <= 'z') w[0] = static_cast<char>(w[0] - 'a' + 'A');
        if (i > 0) s += ' ';
        s += w;
    }
    s += '.';
    return s;
}

std::string note_text(Rng& rng, const WordSampler& sampler, int target_words) {
    std::string text;
    int words = std::max(6, rng.poisson(static_cast<double>(target_words)));
    while (words > 0) {
        int n = static_cast<int>(rng.uniform_int(6, 14));
        n = std::min(n, words);
        if (!text.empty()) text += ' ';
        text += sentence(rng, sampler, n);
        words -= n;
    }
    return text;
}

// Date drawn uniformly from a signal band, measured in days before surgery.
Date band_date(Rng& rng, Date surgery, const SignalBand& band) {
    return surgery - static_cast<int>(rng.uniform_int(band.end_days, band.start_days));
}

int round_positive(Rng& rng, double mean) {
    return 1 + rng.poisson(std::max(0.0, mean - 1.0));
}

}  // namespace

void SynthConfig::validate() const {
    require(n_patients >= 10, "n_patients must be >= 10");
    require(fraction(prevalence_hip) && fraction(prevalence_knee), "prevalences must be in [0,1]");
    require(fraction(hip_fraction), "hip_fraction must be in [0,1]");
    require(fraction(signal_strength), "signal_strength must be in [0,1]");
    require(fraction(signal_leak_rate), "signal_leak_rate must be in [0,1]");
    require(fraction(exclusion_deceased) && fraction(exclusion_over_90) &&
                fraction(exclusion_no_notes),
            "exclusion rates must be in [0,1]");
    require(note_rate >= 0 && encounter_rate >= 0, "event rates must be non-negative");
    require(text_signal_band.start_days >= text_signal_band.end_days &&
                text_signal_band.end_days >= 0,
            "text_signal_band must satisfy start >= end >= 0");
    require(structured_signal_band.start_days >= structured_signal_band.end_days &&
                structured_signal_band.end_days >= 0,
            "structured_signal_band must satisfy start >= end >= 0");
    require(background_vocab >= 50, "background_vocab must be >= 50");
    require(history_years >= 1, "history_years must be >= 1");
    require(note_tokens_mean >= 8, "note_tokens_mean must be >= 8");
    if (signal_strength > 0) {
        require(!signal_tokens.empty(), "signal_tokens must be non-empty");
        require(!signal_codes.empty(), "signal_codes must be non-empty");
    }
    require(signal_events_mean >= 1.0, "signal_events_mean must be >= 1");
}

SynthCorpus generate_corpus(const SynthConfig& cfg) {
    cfg.validate();
    WordSampler sampler(build_vocab_words(cfg));
    CodePools pools = build_code_pools(cfg);

    SynthCorpus out;
    out.gem_rows = pools.gem;
    ehr::Corpus& corpus = out.corpus;
    ehr::CptSets cpt = ehr::CptSets::defaults();

    const Date base = make_date(2012, 1, 1);
    const int span_days = 4 * 365;
    const int history_days = cfg.history_years * 365;

    for (int64_t pi = 0; pi < cfg.n_patients; ++pi) {
        char pid[24];
        std::snprintf(pid, sizeof pid, "p%06lld", static_cast<long long>(pi));
        Rng rng(mix_seed(cfg.seed, std::string("patient/") + pid));

        bool flag_deceased = rng.uniform01() < cfg.exclusion_deceased;
        bool flag_over_90 = rng.uniform01() < cfg.exclusion_over_90;
        bool flag_no_notes = rng.uniform01() < cfg.exclusion_no_notes;

        Date surgery = base + static_cast<int>(rng.uniform_int(0, span_days));
        int age = flag_over_90
                      ? static_cast<int>(91 + rng.uniform_int(0, 6))
                      : std::clamp(static_cast<int>(std::lround(rng.normal(67.0, 11.0))), 25, 89);
        bool is_hip = rng.uniform01() < cfg.hip_fraction;
        double prevalence = is_hip ? cfg.prevalence_hip : cfg.prevalence_knee;
        bool positive = rng.uniform01() < prevalence;
        bool carries = rng.uniform01() < (positive ? cfg.signal_strength : cfg.signal_leak_rate);

        ehr::Patient patient;
        patient.patient_id = pid;
        patient.birth_date = surgery - (age * 365 + static_cast<int>(rng.uniform_int(0, 364)));
        patient.sex = rng.uniform01() < 0.55 ? ehr::Sex::female : ehr::Sex::male;
        double ur = rng.uniform01();
        patient.race = ur < 0.87   ? ehr::Race::white
                       : ur < 0.90 ? ehr::Race::black
                       : ur < 0.94 ? ehr::Race::asian
                       : ur < 0.96 ? ehr::Race::hispanic
                                   : ehr::Race::other;
        if (flag_deceased) patient.death_date = surgery + static_cast<int>(rng.uniform_int(60, 600));
        patient.demographics["language"] = rng.uniform01() < 0.9 ? "english" : "spanish";
        patient.demographics["marital"] = rng.uniform01() < 0.6 ? "married" : "single";
        corpus.patients.push_back(std::move(patient));

        const Date record_start = surgery - history_days;
        std::vector<ehr::Encounter> encs;
        std::vector<ehr::ClinicalNote> notes;

        auto background_encounter = [&](Date when) {
            ehr::Encounter e;
            e.patient_id = pid;
            e.admit_date = when;
            e.setting = rng.uniform01() < 0.15 ? ehr::Setting::inpatient : ehr::Setting::outpatient;
            if (e.setting == ehr::Setting::inpatient)
                e.discharge_date = when + static_cast<int>(rng.uniform_int(1, 6));
            int ndx = static_cast<int>(rng.uniform_int(1, 3));
            for (int d = 0; d < ndx; ++d) {
                if (rng.uniform01() < 0.4) {
                    const std::string& c9 = pools.icd9[static_cast<size_t>(
                        rng.uniform_int(0, static_cast<int64_t>(pools.icd9.size()) - 1))];
                    e.diagnoses.push_back({c9, ehr::IcdVersion::icd9});
                } else {
                    const std::string& c10 = pools.icd10[static_cast<size_t>(
                        rng.uniform_int(0, static_cast<int64_t>(pools.icd10.size()) - 1))];
                    e.diagnoses.push_back({c10, ehr::IcdVersion::icd10});
                }
            }
            int nmed = static_cast<int>(rng.uniform_int(0, 2));
            for (int m = 0; m < nmed; ++m) {
                const std::string& name = pools.meds[static_cast<size_t>(
                    rng.uniform_int(0, static_cast<int64_t>(pools.meds.size()) - 1))];
                e.medications.push_back(
                    {name, "rx." + name, static_cast<double>(rng.uniform_int(1, 8)) * 25.0, "mg"});
            }
            int nlab = static_cast<int>(rng.uniform_int(0, 3));
            for (int l = 0; l < nlab; ++l) {
                const std::string& code = pools.labs[static_cast<size_t>(
                    rng.uniform_int(0, static_cast<int64_t>(pools.labs.size()) - 1))];
                ehr::Lab lab{code, std::nullopt, "u"};
                if (rng.uniform01() < 0.9) lab.value = rng.normal(lab_mean(code), lab_mean(code) * 0.08);
                e.labs.push_back(std::move(lab));
            }
            // Rarely emit a field from the default ingestion blacklist so the
            // drop path sees real traffic.
            if (rng.uniform01() < 0.03)
                e.labs.push_back({"Cholesterol", rng.normal(190.0, 25.0), "mg/dl"});
            int nvit = static_cast<int>(rng.uniform_int(1, 2));
            for (int v = 0; v < nvit; ++v) {
                const std::string& code = pools.vitals[static_cast<size_t>(
                    rng.uniform_int(0, static_cast<int64_t>(pools.vitals.size()) - 1))];
                e.vitals.push_back({code, rng.normal(vital_mean(code), vital_mean(code) * 0.05), "u"});
            }
            if (e.setting == ehr::Setting::inpatient) {
                e.admission_info["payer"] = rng.uniform01() < 0.5 ? "medicare" : "commercial";
                e.admission_info["disposition"] = rng.uniform01() < 0.7 ? "home" : "snf";
            }
            encs.push_back(std::move(e));
        };

        int n_bg_enc = rng.poisson(cfg.encounter_rate * cfg.history_years);
        for (int k = 0; k < n_bg_enc; ++k)
            background_encounter(record_start + static_cast<int>(rng.uniform_int(0, history_days - 1)));

        // Index surgery encounter.
        {
            ehr::Encounter e;
            e.patient_id = pid;
            e.admit_date = surgery;
            e.discharge_date = surgery + static_cast<int>(rng.uniform_int(2, 4));
            e.setting = ehr::Setting::inpatient;
            const std::vector<std::string>& codes = is_hip ? cpt.hip : cpt.knee;
            e.cpt_codes.push_back(codes[static_cast<size_t>(
                rng.uniform_int(0, static_cast<int64_t>(codes.size()) - 1))]);
            const std::string& c10 = pools.icd10[static_cast<size_t>(
                rng.uniform_int(0, static_cast<int64_t>(pools.icd10.size()) - 1))];
            e.diagnoses.push_back({c10, ehr::IcdVersion::icd10});
            e.admission_info["payer"] = rng.uniform01() < 0.6 ? "medicare" : "commercial";
            e.admission_info["disposition"] = rng.uniform01() < 0.75 ? "home" : "rehab";
            encs.push_back(std::move(e));
        }

        // Post-surgery traffic that must not affect labels: outpatient
        // follow-ups inside the horizon, inpatient admissions well outside it.
        if (rng.uniform01() < 0.7) {
            ehr::Encounter e;
            e.patient_id = pid;
            e.admit_date = surgery + static_cast<int>(rng.uniform_int(7, 60));
            e.setting = ehr::Setting::outpatient;
            e.diagnoses.push_back({pools.icd10[0], ehr::IcdVersion::icd10});
            encs.push_back(std::move(e));
        }
        if (rng.uniform01() < 0.15) {
            ehr::Encounter e;
            e.patient_id = pid;
            e.admit_date = surgery + static_cast<int>(rng.uniform_int(45, 120));
            e.discharge_date = e.admit_date + static_cast<int>(rng.uniform_int(1, 5));
            e.setting = ehr::Setting::inpatient;
            e.diagnoses.push_back({pools.icd10[1], ehr::IcdVersion::icd10});
            encs.push_back(std::move(e));
        }
        if (positive) {
            ehr::Encounter e;
            e.patient_id = pid;
            e.admit_date = surgery + static_cast<int>(rng.uniform_int(1, 30));
            e.discharge_date = e.admit_date + static_cast<int>(rng.uniform_int(1, 6));
            e.setting = ehr::Setting::inpatient;
            const std::string& c10 = pools.icd10[static_cast<size_t>(
                rng.uniform_int(0, static_cast<int64_t>(pools.icd10.size()) - 1))];
            e.diagnoses.push_back({c10, ehr::IcdVersion::icd10});
            e.admission_info["payer"] = "medicare";
            e.admission_info["disposition"] = "home";
            encs.push_back(std::move(e));
        }
        if (carries) {
            int n_events = round_positive(rng, cfg.signal_events_mean);
            for (int k = 0; k < n_events; ++k) {
                ehr::Encounter e;
                e.patient_id = pid;
                e.admit_date = band_date(rng, surgery, cfg.structured_signal_band);
                e.setting = ehr::Setting::outpatient;
                e.diagnoses.push_back(
                    {cfg.signal_codes[static_cast<size_t>(rng.uniform_int(
                         0, static_cast<int64_t>(cfg.signal_codes.size()) - 1))],
                     ehr::IcdVersion::icd10});
                encs.push_back(std::move(e));
            }
        }

        if (!flag_no_notes) {
            int n_bg_notes = rng.poisson(cfg.note_rate * cfg.history_years);
            for (int k = 0; k < n_bg_notes; ++k) {
                ehr::ClinicalNote n;
                n.patient_id = pid;
                n.date = record_start + static_cast<int>(rng.uniform_int(0, history_days - 1));
                n.text = note_text(rng, sampler, cfg.note_tokens_mean);
                notes.push_back(std::move(n));
            }
            {
                ehr::ClinicalNote n;
                n.patient_id = pid;
                n.date = surgery;
                std::string side = rng.uniform01() < 0.5 ? "left" : "right";
                n.text = "Procedure performed. Total " + side +
                         std::string(is_hip ? " hip" : " knee") +
                         " arthroplasty, components cemented, tourniquet deflated, "
                         "closure in layers. " +
                         note_text(rng, sampler, cfg.note_tokens_mean / 2);
                notes.push_back(std::move(n));
            }
            if (carries) {
                int n_events = round_positive(rng, cfg.signal_events_mean);
                for (int k = 0; k < n_events; ++k) {
                    ehr::ClinicalNote n;
                    n.patient_id = pid;
                    n.date = band_date(rng, surgery, cfg.text_signal_band);
                    const std::string& tok = cfg.signal_tokens[static_cast<size_t>(rng.uniform_int(
                        0, static_cast<int64_t>(cfg.signal_tokens.size()) - 1))];
                    std::string body = sentence(rng, sampler, 5);
                    n.text = "Wound check. Noted " + tok + " at the margin. " + body;
                    notes.push_back(std::move(n));
                }
            }
        }

        std::stable_sort(encs.begin(), encs.end(),
                         [](const ehr::Encounter& a, const ehr::Encounter& b) {
                             return a.admit_date < b.admit_date;
                         });
        std::stable_sort(notes.begin(), notes.end(),
                         [](const ehr::ClinicalNote& a, const ehr::ClinicalNote& b) {
                             return a.date < b.date;
                         });
        for (size_t k = 0; k < encs.size(); ++k) {
            char eid[32];
            std::snprintf(eid, sizeof eid, "%s.e%03zu", pid, k);
            encs[k].encounter_id = eid;
        }
        for (size_t k = 0; k < notes.size(); ++k) {
            char nid[32];
            std::snprintf(nid, sizeof nid, "%s.n%03zu", pid, k);
            notes[k].note_id = nid;
        }
        corpus.encounters.insert(corpus.encounters.end(), std::make_move_iterator(encs.begin()),
                                 std::make_move_iterator(encs.end()));
        corpus.notes.insert(corpus.notes.end(), std::make_move_iterator(notes.begin()),
                            std::make_move_iterator(notes.end()));
    }

    corpus.reindex();
    return out;
}

void generate(const SynthConfig& cfg, const std::filesystem::path& out_dir, bool overwrite) {
    namespace fs = std::filesystem;
    for (const char* name : {"patients.jsonl", "encounters.jsonl", "notes.jsonl", "gem.csv"})
        if (!overwrite && fs::exists(out_dir / name))
            throw ConfigError("output file exists (pass --overwrite to replace): " +
                              (out_dir / name).string());

    SynthCorpus synth = generate_corpus(cfg);
    ehr::write_corpus_jsonl(synth.corpus, out_dir);
    std::ofstream gem(out_dir / "gem.csv", std::ios::binary);
    if (!gem) throw ConfigError("cannot write " + (out_dir / "gem.csv").string());
    gem << "source_code,target_code\n";
    for (const auto& [c9, c10] : synth.gem_rows) gem << c9 << ',' << c10 << '\n';

    log::info("synth_generate", {{"out", out_dir.string()},
                                 {"patients", std::to_string(synth.corpus.patients.size())},
                                 {"encounters", std::to_string(synth.corpus.encounters.size())},
                                 {"notes", std::to_string(synth.corpus.notes.size())}});
}

SignalAudit audit_signal(const ehr::Corpus& corpus, const SynthConfig& cfg) {
    SignalAudit audit;
    audit.n_patients = static_cast<int64_t>(corpus.patients.size());
    audit.n_notes = static_cast<int64_t>(corpus.notes.size());
    audit.n_encounters = static_cast<int64_t>(corpus.encounters.size());

    size_t buckets = static_cast<size_t>(cfg.history_years * 365 / 30 + 2);
    audit.text_signal_pos.assign(buckets, 0);
    audit.text_signal_neg.assign(buckets, 0);
    audit.code_signal_pos.assign(buckets, 0);
    audit.code_signal_neg.assign(buckets, 0);

    std::unordered_set<std::string> signal_tokens(cfg.signal_tokens.begin(),
                                                  cfg.signal_tokens.end());
    std::unordered_set<std::string> signal_codes(cfg.signal_codes.begin(), cfg.signal_codes.end());

    auto bucket_of = [&](int days_before) -> size_t {
        size_t b = days_before <= 0 ? 0 : static_cast<size_t>((days_before - 1) / 30);
        return std::min(b, buckets - 1);
    };

    std::vector<ehr::SurgeryEvent> surgeries =
        ehr::identify_surgeries(corpus, ehr::CptSets::defaults());
    for (const ehr::SurgeryEvent& s : surgeries) {
        ehr::Label label = ehr::assign_label(s, corpus.encounters_of(s.patient_id));
        if (s.surgery_type == ehr::SurgeryType::hip)
            ++(label.positive ? audit.hip_pos : audit.hip_neg);
        else
            ++(label.positive ? audit.knee_pos : audit.knee_neg);

        std::vector<int64_t>& text_row = label.positive ? audit.text_signal_pos : audit.text_signal_neg;
        for (const ehr::ClinicalNote* n : corpus.notes_of(s.patient_id)) {
            int days_before = s.surgery_date - n->date;
            if (days_before < 0) continue;
            for (const std::string& tok : text::tokenize(n->text))
                if (signal_tokens.count(tok)) ++text_row[bucket_of(days_before)];
        }
        std::vector<int64_t>& code_row = label.positive ? audit.code_signal_pos : audit.code_signal_neg;
        for (const ehr::Encounter* e : corpus.encounters_of(s.patient_id)) {
            int days_before = s.surgery_date - e->admit_date;
            if (days_before < 0) continue;
            for (const ehr::Diagnosis& d : e->diagnoses)
                if (signal_codes.count(d.code)) ++code_row[bucket_of(days_before)];
        }
    }
    return audit;
}

std::string SignalAudit::render() const {
    std::string out;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "patients=%lld notes=%lld encounters=%lld hip=+%lld/-%lld knee=+%lld/-%lld\n",
                  static_cast<long long>(n_patients), static_cast<long long>(n_notes),
                  static_cast<long long>(n_encounters), static_cast<long long>(hip_pos),
                  static_cast<long long>(hip_neg), static_cast<long long>(knee_pos),
                  static_cast<long long>(knee_neg));
    out += buf;
    out += "bucket  text+   text-   code+   code-\n";
    for (size_t b = 0; b < text_signal_pos.size(); ++b) {
        if (text_signal_pos[b] + text_signal_neg[b] + code_signal_pos[b] + code_signal_neg[b] == 0)
            continue;
        std::snprintf(buf, sizeof buf, "%6zu %6lld %7lld %7lld %7lld\n", b,
                      static_cast<long long>(text_signal_pos[b]),
                      static_cast<long long>(text_signal_neg[b]),
                      static_cast<long long>(code_signal_pos[b]),
                      static_cast<long long>(code_signal_neg[b]));
        out += buf;
    }
    return out;
}

}  // namespace wb::synth
