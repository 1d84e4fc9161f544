#pragma once

#include <cstdint>
#include <vector>

namespace wb::eval {

// Rank-based AUROC; tied scores contribute 1/2 per positive-negative pair.
// Throws ConfigError when only one class is present (the message carries the
// class counts) or when a score is non-finite.
double auroc(const std::vector<double>& scores, const std::vector<int>& labels);

struct BootstrapCi {
    double point = 0.0;   // AUROC on the full sample
    double lo = 0.0;      // percentile lower bound
    double hi = 0.0;      // percentile upper bound
    int usable = 0;       // resamples that contained both classes
    int redraws = 0;      // single-class resamples that were redrawn
};

// Percentile bootstrap over instance resampling. Single-class resamples are
// redrawn (capped); fewer than 20 usable resamples is an error.
BootstrapCi bootstrap_auroc_ci(const std::vector<double>& scores, const std::vector<int>& labels,
                               int b = 1000, double alpha = 0.05, uint64_t seed = 0);

}  // namespace wb::eval
