#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "windowbench/feat/sparse.hpp"

namespace wb::model {

enum class ImbalanceStrategy { none, class_weights, oversample, undersample };

std::string_view to_string(ImbalanceStrategy s);
ImbalanceStrategy parse_imbalance(std::string_view name);

// A rebalancing is described as an index plan over the original rows, so the
// same plan can be applied to any aligned per-row artifact (features, labels,
// token sequences) without copying features eagerly.
//   none          keep = 0..n-1, unit weights
//   class_weights keep = 0..n-1, weight n/(2*n_c) by class
//   oversample    keep = 0..n-1 plus minority indices drawn with replacement
//                 until class counts match, unit weights
//   undersample   keep = all minority plus a majority subset drawn without
//                 replacement to match, in ascending original order, unit weights
struct RebalancePlan {
    ImbalanceStrategy strategy = ImbalanceStrategy::none;
    std::vector<int32_t> keep;       // row indices into the original set
    std::vector<double> weights;     // aligned with keep
};

RebalancePlan make_rebalance_plan(const std::vector<int>& y, ImbalanceStrategy strategy,
                                  uint64_t seed);

// Materializes the plan against a feature matrix (rows copied per plan order).
struct RebalancedSet {
    feat::FeatureMatrix x;
    std::vector<int> y;
    std::vector<double> weights;
};

RebalancedSet apply_rebalance(const feat::FeatureMatrix& x, const std::vector<int>& y,
                              const RebalancePlan& plan);

}  // namespace wb::model
