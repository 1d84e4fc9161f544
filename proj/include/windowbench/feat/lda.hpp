#pragma once

#include <cstdint>
#include <vector>

#include "windowbench/feat/sparse.hpp"

namespace wb::feat {

// Topic model fitted by collapsed Gibbs sampling; phi rows are topic-word
// distributions averaged over post-burn-in samples.
struct LdaModel {
    int32_t k = 0;
    int32_t vocab_size = 0;
    double alpha = 0.0;
    double beta = 0.01;
    int gibbs_iters = 500;
    int burn_in = 200;
    int sample_every = 10;
    uint64_t seed = 0;
    std::vector<double> phi;  // k x vocab_size, row-major; rows sum to 1

    double phi_at(int32_t topic, int32_t word) const {
        return phi[static_cast<size_t>(topic) * static_cast<size_t>(vocab_size) +
                   static_cast<size_t>(word)];
    }
};

// alpha < 0 selects the 50/k default. Zero-token documents are skipped with a
// warning. k >= 1; k == 1 degenerates to the corpus unigram distribution.
LdaModel lda_fit(const FeatureMatrix& training_counts, int32_t k, double alpha = -1.0,
                 double beta = 0.01, int gibbs_iters = 500, int burn_in = 200,
                 int sample_every = 10, uint64_t seed = 1);

// Fold-in Gibbs with phi fixed; theta averaged over the second half of the
// iterations. Empty documents yield the uniform distribution.
std::vector<double> lda_transform(const LdaModel& model, const SparseVector& counts,
                                  int infer_iters = 100, uint64_t seed = 1);

}  // namespace wb::feat
