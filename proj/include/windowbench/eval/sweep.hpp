#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "windowbench/ehr/types.hpp"
#include "windowbench/eval/results.hpp"
#include "windowbench/feat/bow.hpp"
#include "windowbench/feat/icd.hpp"
#include "windowbench/model/linear.hpp"
#include "windowbench/model/neural.hpp"
#include "windowbench/model/rebalance.hpp"
#include "windowbench/model/serialize.hpp"
#include "windowbench/text/vocab.hpp"

namespace wb::eval {

// Roster ids follow the results-table legend style: segments joined by '+'.
//   LR [+L1|+L2|+None] followed by an encoder and options:
//     +BOW +BinaryBOW +TFIDF +LDA   text encoder (one of)
//     +norm=None|l1|l2 (also 1|2)   per-document norm on the text encoding
//     +Structured                   append the structured one-hot vector
//   Average [+Mean|+Maxpool|+Attention]   neural encoder over token sequences
// A bare "LR" prefix trains as L2 with the configured lambda, so every
// roster id is well-posed on separable data.
struct ModelSpec {
    enum class Family { linear, neural };
    enum class TextEncoder { none, bow, binary_bow, tfidf, lda };

    std::string id;
    Family family = Family::linear;
    model::Penalty penalty = model::Penalty::l2;
    TextEncoder text_encoder = TextEncoder::none;
    feat::Norm norm = feat::Norm::none;
    bool structured = false;
    model::Aggregation agg = model::Aggregation::mean;
};

ModelSpec parse_model_id(const std::string& id);

// Throws ConfigError when the id cannot run against the data source (e.g. a
// structured-only source with a text encoder, or a neural id off notes).
void check_model_source(const ModelSpec& spec, DataSource source);

struct Hyperparams {
    double lambda = 1e-4;            // LR penalty weight (all penalties)
    double mt_lambda_shared = 1e-4;  // multitask shared-weight penalty
    double mt_lambda_task = 1e-3;    // multitask per-task penalty
    int lda_topics = 50;
    double lda_alpha = -1.0;  // < 0 selects 50/k
    double lda_beta = 0.01;
    int lda_iters = 500;
    int lda_burn_in = 200;
    int lda_sample_every = 10;
    int lda_infer_iters = 100;
    model::NeuralDims dims;
    double neural_lr = 1e-3;
    int batch_size = 32;
    int max_epochs = 20;
    int patience = 3;
    int64_t min_df = text::kDefaultMinDf;
    int64_t vocab_max = text::kDefaultMaxVocab;
    model::ImbalanceStrategy imbalance = model::ImbalanceStrategy::none;
    int bootstrap_b = 1000;
};

struct SweepConfig {
    const ehr::Corpus* corpus = nullptr;
    const ehr::Cohort* cohort = nullptr;
    const ehr::SplitAssignment* split = nullptr;
    const feat::GemTable* gem = nullptr;  // required when structured features run
    std::vector<ehr::ObservationWindow> windows;
    std::vector<ehr::SurgeryType> tasks{ehr::SurgeryType::hip, ehr::SurgeryType::knee};
    std::vector<Mode> modes{Mode::independent};
    // Per-source rosters; a source is swept iff its roster is non-empty.
    std::vector<std::pair<DataSource, std::vector<std::string>>> roster;
    // Optional pretrained-embedding TSV; re-indexed against each window's
    // vocabulary before neural training.
    std::string embedding_file;
    Hyperparams hp;
    uint64_t seed = 0;
    int jobs = 1;
};

// Fits every (source, mode, model, window) cell: encoders fitted on the train
// split, models trained per task (independent) or jointly (multitask), and
// validation + test AUROC with bootstrap CI recorded per task. Cells whose
// optimizer hit the iteration cap are recorded as non-converged and the sweep
// continues. Output row order is fixed by the configuration, never by
// scheduling.
ResultsTable run_sweep(const SweepConfig& config);

struct TrainedCell {
    model::ModelBundle bundle;
    std::vector<ResultRow> rows;  // validation + test rows, same seeds as run_sweep
};

// Fits one cell exactly as run_sweep would (identical seeds, identical rows)
// and returns the fitted model. Independent mode requires `task`; multitask
// trains config.tasks jointly and ignores it.
TrainedCell train_cell(const SweepConfig& config, DataSource source, Mode mode,
                       const std::string& model_id, ehr::ObservationWindow window,
                       std::optional<ehr::SurgeryType> task);

}  // namespace wb::eval
