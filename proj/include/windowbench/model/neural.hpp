#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace wb::model {

enum class Aggregation { mean, maxpool, attention };

std::string_view to_string(Aggregation a);
Aggregation parse_aggregation(std::string_view name);

struct NeuralDims {
    int emb = 300;     // embedding width
    int hidden = 256;  // projected width (ReLU)
    int attn = 128;    // attention score width (attention aggregation only)
};

// Documents are sequences of vocabulary indices; each position is embedded,
// projected through one ReLU layer, and the positions are pooled into a
// single vector g:
//   mean       g = (1/T) sum_t h_t
//   maxpool    g_j = max_t h_t[j]   (first position wins ties)
//   attention  s_t = v . tanh(Wa h_t + ba), alpha = softmax(s),
//              g = sum_t alpha_t h_t
// An empty document pools to g = 0. Each task reads g through its own
// logistic head.
struct NeuralModel {
    NeuralDims dims;
    Aggregation agg = Aggregation::mean;
    int vocab_size = 0;
    std::vector<double> E;   // vocab_size x emb, row-major
    std::vector<double> Wp;  // hidden x emb
    std::vector<double> bp;  // hidden
    std::vector<double> Wa;  // attn x hidden (attention only, else empty)
    std::vector<double> ba;  // attn
    std::vector<double> v;   // attn
    std::vector<std::vector<double>> head_w;  // per task, hidden
    std::vector<double> head_b;               // per task
    std::vector<std::string> task_names;
    int epochs_run = 0;
    bool early_stopped = false;
    double best_val_auroc = 0.0;  // mean over tasks; 0 when no validation set
    uint64_t seed = 0;
};

struct SeqExamples {
    std::vector<std::vector<int32_t>> docs;
    std::vector<int> y;
    std::vector<double> weights;  // empty = uniform; else normalized to mean 1

    bool empty() const { return docs.empty(); }
};

struct NeuralTask {
    std::string name;
    SeqExamples train;
    SeqExamples val;  // drives early stopping; usable only with both classes
};

// Pretrained embedding rows keyed by vocabulary index; each row is emb wide.
// Training starts from these rows instead of the random initialization.
struct EmbeddingSeed {
    std::map<int32_t, std::vector<double>> rows;
};

// Reads a TSV of `token <tab> f1 <tab> ... <tab> f_emb` rows. Tokens the
// lookup maps to -1 are skipped; a duplicate known token keeps its last row.
// Malformed rows (field count, non-numeric, non-finite) name the line.
EmbeddingSeed load_embedding_tsv(const std::filesystem::path& path,
                                 const std::function<int32_t(std::string_view)>& lookup,
                                 int emb_dim);

struct NeuralOptions {
    NeuralDims dims;
    Aggregation agg = Aggregation::mean;
    double lr = 1e-3;
    int batch_size = 32;
    int max_epochs = 20;
    int patience = 3;  // epochs without val-AUROC improvement before stopping
    uint64_t seed = 0;
    const EmbeddingSeed* pretrained = nullptr;  // optional; overwrites E rows
};

// Minibatch SGD on the weighted mean NLL, task batches interleaved
// round-robin each epoch. Early stopping monitors the mean validation AUROC
// across tasks when every task has a usable validation set; the best-epoch
// parameters are restored.
NeuralModel train_neural(const std::vector<NeuralTask>& tasks, int vocab_size,
                         const NeuralOptions& opts = {});

// Single-task convenience entry: delegates to train_neural with one task.
NeuralModel train_avg_encoder(const NeuralTask& task, int vocab_size,
                              const NeuralOptions& opts = {});

std::vector<double> predict_neural(const NeuralModel& model, size_t task,
                                   const std::vector<std::vector<int32_t>>& docs);

// Flat parameter stack in a fixed order (E, Wp, bp, [Wa, ba, v,] heads) for
// finite-difference verification and snapshot/restore.
std::vector<double> get_params(const NeuralModel& model);
void set_params(NeuralModel& model, const std::vector<double>& params);

// Weighted mean NLL of one task over a batch, and its gradient in the flat
// parameter layout. These are the exact quantities one SGD step descends.
double neural_batch_loss(const NeuralModel& model, size_t task, const SeqExamples& batch);
std::vector<double> neural_batch_gradient(const NeuralModel& model, size_t task,
                                          const SeqExamples& batch);

}  // namespace wb::model
