#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "windowbench/ehr/types.hpp"
#include "windowbench/feat/icd.hpp"
#include "windowbench/feat/sparse.hpp"

namespace wb::feat {

enum class SlotKind { indicator, numeric, missing_flag };

std::string_view to_string(SlotKind k);

// Training-split feature space for encounter one-hot vectors: indicator slots
// for truncated diagnosis codes ("dx.M17"), medication names ("med.x"), and
// admission categoricals ("adm.payer.medicare"); a numeric slot plus a
// missing-flag slot per lab/vital code; and one reserved "meta.empty_window"
// indicator used by the window aggregator.
class FeatureDictionary {
public:
    int32_t size() const { return static_cast<int32_t>(names_.size()); }
    int32_t find(const std::string& name) const;  // -1 when absent
    const std::string& name(int32_t index) const { return names_[static_cast<size_t>(index)]; }
    SlotKind kind(int32_t index) const { return kinds_[static_cast<size_t>(index)]; }
    int32_t empty_window_slot() const { return empty_window_slot_; }

    void add(std::string name, SlotKind kind);  // rejects duplicates
    void finalize();                            // locates meta slots

private:
    std::vector<std::string> names_;
    std::vector<SlotKind> kinds_;
    std::unordered_map<std::string, int32_t> index_;
    int32_t empty_window_slot_ = -1;
};

// Per-numeric-slot training mean/sd for z-scoring; sd floors at a small
// positive value so constant features stay finite.
struct NumericStats {
    std::vector<double> mean;  // aligned to the dictionary; zeros on non-numeric slots
    std::vector<double> sd;
};

FeatureDictionary build_feature_dictionary(std::span<const ehr::Encounter> training_encounters,
                                           const GemTable& gem);

NumericStats fit_numeric_stats(std::span<const ehr::Encounter> training_encounters,
                               const FeatureDictionary& dict);

// One encounter -> sparse one-hot/z-scored vector. Numeric slots carry the
// z-scored mean of that encounter's values; codes absent from the encounter
// set the missing flag instead. Categories unseen at fit time are skipped and
// counted.
SparseVector encode_encounter(const ehr::Encounter& encounter, const FeatureDictionary& dict,
                              const NumericStats& stats, const GemTable& gem,
                              int64_t* unseen_count = nullptr);

// Elementwise window summary: max over indicator and missing-flag slots, mean
// over numeric slots; an empty window yields the zero vector with the
// empty-window indicator set.
SparseVector aggregate_encounters(std::span<const SparseVector> vectors,
                                  const FeatureDictionary& dict);

// TSV audit format: feature_name <TAB> index <TAB> kind.
void dump_dictionary_tsv(const FeatureDictionary& dict, const std::filesystem::path& path);

}  // namespace wb::feat
