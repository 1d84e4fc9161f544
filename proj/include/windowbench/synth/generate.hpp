#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "windowbench/ehr/types.hpp"

namespace wb::synth {

// Days before surgery: start is the far edge, end the near edge, start >= end >= 0.
struct SignalBand {
    int start_days = 90;
    int end_days = 0;
};

struct SynthConfig {
    int64_t n_patients = 1000;
    double prevalence_hip = 0.095;   // positive-class fraction among hip surgeries
    double prevalence_knee = 0.105;  // and among knee surgeries
    double hip_fraction = 0.5;       // fraction of patients whose index surgery is hip
    double note_rate = 12.0;         // mean background notes per patient-year
    double encounter_rate = 10.0;    // mean background encounters per patient-year
    SignalBand text_signal_band{90, 0};
    SignalBand structured_signal_band{360, 0};
    double signal_strength = 0.8;   // fraction of positives carrying planted signal
    double signal_leak_rate = 0.0;  // fraction of negatives carrying it anyway
    int64_t background_vocab = 400;
    std::vector<std::string> signal_tokens = {"seropurulence", "fluctuance", "dehiscence"};
    std::vector<std::string> signal_codes = {"T84.01", "T81.4", "M96.6"};
    // Mean planted signal events per carrying record (>= 1 is always planted).
    double signal_events_mean = 2.0;
    double exclusion_deceased = 0.0;
    double exclusion_over_90 = 0.0;
    double exclusion_no_notes = 0.0;
    int history_years = 4;      // record span before surgery; keeps 36-month windows populated
    int note_tokens_mean = 60;  // mean words per note
    uint64_t seed = 1;

    void validate() const;  // throws ConfigError on infeasible settings
};

// Writes patients.jsonl, encounters.jsonl, notes.jsonl, gem.csv into out_dir.
// Deterministic: identical (config, seed) produce identical bytes. Fails if
// out_dir already contains corpus files and overwrite is false.
void generate(const SynthConfig& config, const std::filesystem::path& out_dir,
              bool overwrite = false);

// In-memory variant used by tests and by generate() itself.
struct SynthCorpus {
    ehr::Corpus corpus;
    std::vector<std::pair<std::string, std::string>> gem_rows;  // icd9 -> icd10
};
SynthCorpus generate_corpus(const SynthConfig& config);

// Per-30-day-bucket counts of planted signal, derived by re-scanning the
// corpus with labels recomputed from scratch; the oracle for generate()'s
// postconditions. Bucket b covers days (30b, 30(b+1)] before surgery; bucket 0
// also covers the surgery day itself.
struct SignalAudit {
    int64_t n_patients = 0;
    int64_t n_notes = 0;
    int64_t n_encounters = 0;
    int64_t hip_pos = 0, hip_neg = 0, knee_pos = 0, knee_neg = 0;
    std::vector<int64_t> text_signal_pos, text_signal_neg;
    std::vector<int64_t> code_signal_pos, code_signal_neg;

    std::string render() const;
};

SignalAudit audit_signal(const ehr::Corpus& corpus, const SynthConfig& config);

}  // namespace wb::synth
