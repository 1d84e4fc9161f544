#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "windowbench/config.hpp"
#include "windowbench/ehr/types.hpp"
#include "windowbench/eval/sweep.hpp"
#include "windowbench/synth/generate.hpp"

namespace wb::cli {

// Typed view of a run configuration file. Every knob the pipeline exposes has
// a key here; unknown keys are rejected at load time.
struct RunConfig {
    std::filesystem::path corpus_dir = "corpus";
    std::filesystem::path out_dir = "out";
    std::filesystem::path gem_table;       // empty -> corpus_dir/gem.csv
    std::filesystem::path embedding_file;  // empty -> random embedding init

    ehr::CohortCriteria criteria = ehr::CohortCriteria::defaults();
    bool stratify_split = false;  // stratify the patient split by (task, label)
    synth::SynthConfig synth;

    std::vector<ehr::ObservationWindow> windows;  // default: all seven
    std::vector<ehr::SurgeryType> tasks{ehr::SurgeryType::hip, ehr::SurgeryType::knee};
    std::vector<eval::Mode> modes{eval::Mode::independent};
    std::vector<std::pair<eval::DataSource, std::vector<std::string>>> roster;
    eval::Hyperparams hp;

    uint64_t seed = 0;
    bool has_seed = false;  // seed is mandatory; the CLI --seed flag also satisfies it
    int jobs = 0;           // 0 -> one worker per logical core

    // gem_table with the corpus-relative default applied.
    std::filesystem::path effective_gem_table() const;
};

RunConfig read_run_config(const cfg::ConfigFile& file);
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace wb::cli
