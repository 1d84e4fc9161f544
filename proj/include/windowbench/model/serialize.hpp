#pragma once

#include <optional>
#include <string>

#include "windowbench/model/linear.hpp"
#include "windowbench/model/multitask.hpp"
#include "windowbench/model/neural.hpp"

namespace wb::model {

// On-disk model bundle: a JSON object tagged with `kind` plus the fitted
// parameters, the content hash of the vocabulary/dictionary the features were
// built against, and the training seed. Loading verifies the stored hash when
// the caller supplies an expected one.
struct ModelBundle {
    std::string kind;  // "linear" | "multitask_linear" | "neural"
    std::optional<LinearModel> linear;
    std::optional<MultitaskModel> multitask;
    std::optional<NeuralModel> neural;
    std::string vocab_hash;
    uint64_t seed = 0;
};

void save_model(const std::string& path, const ModelBundle& bundle);
ModelBundle load_model(const std::string& path, const std::string& expected_vocab_hash = "");

}  // namespace wb::model
