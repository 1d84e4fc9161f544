#include "windowbench/feat/structured.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "windowbench/error.hpp"

namespace wb::feat {

namespace {

constexpr const char* kEmptyWindowName = "meta.empty_window";
constexpr double kMinSd = 1e-9;

std::string dx_slot(const ehr::Diagnosis& dx, const GemTable& gem, int64_t* unmapped = nullptr) {
    return "dx." + truncate_icd(normalize_diagnosis(dx, gem, unmapped));
}

std::string med_slot(const ehr::Medication& med) { return "med." + med.name; }
std::string lab_slot(const ehr::Lab& lab) { return "lab." + lab.code; }
std::string vital_slot(const ehr::Vital& vital) { return "vital." + vital.code; }

std::string adm_slot(const std::string& key, const std::string& value) {
    return "adm." + key + "." + value;
}

// Mean value per numeric slot present in this encounter.
std::map<std::string, double> numeric_values(const ehr::Encounter& e) {
    std::map<std::string, std::pair<double, int64_t>> acc;
    for (const ehr::Lab& lab : e.labs)
        if (lab.value) {
            auto& [sum, n] = acc[lab_slot(lab)];
            sum += *lab.value;
            ++n;
        }
    for (const ehr::Vital& vital : e.vitals) {
        auto& [sum, n] = acc[vital_slot(vital)];
        sum += vital.value;
        ++n;
    }
    std::map<std::string, double> out;
    for (const auto& [name, sn] : acc) out[name] = sn.first / static_cast<double>(sn.second);
    return out;
}

}  // namespace

std::string_view to_string(SlotKind k) {
    switch (k) {
        case SlotKind::indicator: return "indicator";
        case SlotKind::numeric: return "numeric";
        default: return "missing_flag";
    }
}

int32_t FeatureDictionary::find(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? -1 : it->second;
}

void FeatureDictionary::add(std::string name, SlotKind kind) {
    if (index_.count(name)) throw InvariantError("duplicate feature slot: " + name);
    index_.emplace(name, static_cast<int32_t>(names_.size()));
    names_.push_back(std::move(name));
    kinds_.push_back(kind);
}

void FeatureDictionary::finalize() {
    empty_window_slot_ = find(kEmptyWindowName);
    if (empty_window_slot_ < 0) throw InvariantError("dictionary missing empty-window slot");
}

FeatureDictionary build_feature_dictionary(std::span<const ehr::Encounter> training_encounters,
                                           const GemTable& gem) {
    std::set<std::string> indicators, numerics;
    for (const ehr::Encounter& e : training_encounters) {
        for (const ehr::Diagnosis& dx : e.diagnoses) indicators.insert(dx_slot(dx, gem));
        for (const ehr::Medication& med : e.medications) indicators.insert(med_slot(med));
        for (const auto& [key, value] : e.admission_info) indicators.insert(adm_slot(key, value));
        for (const ehr::Lab& lab : e.labs) numerics.insert(lab_slot(lab));
        for (const ehr::Vital& vital : e.vitals) numerics.insert(vital_slot(vital));
    }
    FeatureDictionary dict;
    for (const std::string& name : indicators) dict.add(name, SlotKind::indicator);
    for (const std::string& name : numerics) {
        dict.add(name, SlotKind::numeric);
        dict.add(name + ".missing", SlotKind::missing_flag);
    }
    dict.add(kEmptyWindowName, SlotKind::indicator);
    dict.finalize();
    return dict;
}

NumericStats fit_numeric_stats(std::span<const ehr::Encounter> training_encounters,
                               const FeatureDictionary& dict) {
    NumericStats stats;
    stats.mean.assign(static_cast<size_t>(dict.size()), 0.0);
    stats.sd.assign(static_cast<size_t>(dict.size()), 1.0);
    std::vector<double> sum(static_cast<size_t>(dict.size()), 0.0);
    std::vector<double> sumsq(static_cast<size_t>(dict.size()), 0.0);
    std::vector<int64_t> n(static_cast<size_t>(dict.size()), 0);
    for (const ehr::Encounter& e : training_encounters) {
        for (const auto& [name, value] : numeric_values(e)) {
            int32_t slot = dict.find(name);
            if (slot < 0) continue;
            sum[static_cast<size_t>(slot)] += value;
            sumsq[static_cast<size_t>(slot)] += value * value;
            ++n[static_cast<size_t>(slot)];
        }
    }
    for (int32_t i = 0; i < dict.size(); ++i) {
        size_t s = static_cast<size_t>(i);
        if (dict.kind(i) != SlotKind::numeric || n[s] == 0) continue;
        stats.mean[s] = sum[s] / static_cast<double>(n[s]);
        double var = sumsq[s] / static_cast<double>(n[s]) - stats.mean[s] * stats.mean[s];
        stats.sd[s] = std::sqrt(std::max(var, 0.0));
        if (stats.sd[s] < kMinSd) stats.sd[s] = 1.0;
    }
    return stats;
}

SparseVector encode_encounter(const ehr::Encounter& encounter, const FeatureDictionary& dict,
                              const NumericStats& stats, const GemTable& gem,
                              int64_t* unseen_count) {
    std::vector<std::pair<int32_t, double>> entries;
    auto indicate = [&](const std::string& name) {
        int32_t slot = dict.find(name);
        if (slot < 0) {
            if (unseen_count) ++*unseen_count;
            return;
        }
        entries.emplace_back(slot, 1.0);
    };
    for (const ehr::Diagnosis& dx : encounter.diagnoses) indicate(dx_slot(dx, gem));
    for (const ehr::Medication& med : encounter.medications) indicate(med_slot(med));
    for (const auto& [key, value] : encounter.admission_info) indicate(adm_slot(key, value));

    std::map<std::string, double> values = numeric_values(encounter);
    for (int32_t i = 0; i < dict.size(); ++i) {
        if (dict.kind(i) != SlotKind::numeric) continue;
        size_t s = static_cast<size_t>(i);
        auto it = values.find(dict.name(i));
        if (it == values.end()) {
            int32_t flag = dict.find(dict.name(i) + ".missing");
            if (flag >= 0) entries.emplace_back(flag, 1.0);
        } else {
            entries.emplace_back(i, (it->second - stats.mean[s]) / stats.sd[s]);
        }
    }
    // Values under labels the dictionary has never seen count as unseen too.
    if (unseen_count)
        for (const auto& [name, value] : values)
            if (dict.find(name) < 0) ++*unseen_count;

    SparseVector vec = make_sparse(dict.size(), std::move(entries));
    // Duplicate indicators (same dx twice) must stay at 1, not sum.
    for (auto& [idx, value] : vec.entries)
        if (dict.kind(idx) != SlotKind::numeric && value > 1.0) value = 1.0;
    return vec;
}

SparseVector aggregate_encounters(std::span<const SparseVector> vectors,
                                  const FeatureDictionary& dict) {
    SparseVector out;
    out.dim = dict.size();
    if (vectors.empty()) {
        out.entries.emplace_back(dict.empty_window_slot(), 1.0);
        return out;
    }
    std::map<int32_t, double> acc;
    for (const SparseVector& vec : vectors) {
        if (vec.dim != dict.size())
            throw InvariantError("aggregate dimension mismatch: " + std::to_string(vec.dim) +
                                 " vs dictionary " + std::to_string(dict.size()));
        for (const auto& [idx, value] : vec.entries) {
            if (dict.kind(idx) == SlotKind::numeric) {
                acc[idx] += value;  // divided by count below
            } else {
                auto [it, inserted] = acc.try_emplace(idx, value);
                if (!inserted) it->second = std::max(it->second, value);
            }
        }
    }
    for (auto& [idx, value] : acc) {
        if (dict.kind(idx) == SlotKind::numeric)
            value /= static_cast<double>(vectors.size());
        if (value != 0.0) out.entries.emplace_back(idx, value);
    }
    return out;
}

void dump_dictionary_tsv(const FeatureDictionary& dict, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write dictionary file: " + path.string());
    for (int32_t i = 0; i < dict.size(); ++i)
        out << dict.name(i) << '\t' << i << '\t' << to_string(dict.kind(i)) << '\n';
    if (!out.flush()) throw ConfigError("short write to dictionary file: " + path.string());
}

}  // namespace wb::feat
