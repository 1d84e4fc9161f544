#include "windowbench/model/rebalance.hpp"

#include <algorithm>
#include <numeric>

#include "windowbench/error.hpp"
#include "windowbench/rng.hpp"

namespace wb::model {

std::string_view to_string(ImbalanceStrategy s) {
    switch (s) {
        case ImbalanceStrategy::none: return "none";
        case ImbalanceStrategy::class_weights: return "class_weights";
        case ImbalanceStrategy::oversample: return "oversample";
        default: return "undersample";
    }
}

ImbalanceStrategy parse_imbalance(std::string_view name) {
    if (name == "none") return ImbalanceStrategy::none;
    if (name == "class_weights") return ImbalanceStrategy::class_weights;
    if (name == "oversample") return ImbalanceStrategy::oversample;
    if (name == "undersample") return ImbalanceStrategy::undersample;
    throw ConfigError("unknown imbalance strategy '" + std::string(name) + "'");
}

RebalancePlan make_rebalance_plan(const std::vector<int>& y, ImbalanceStrategy strategy,
                                  uint64_t seed) {
    if (y.empty()) throw ConfigError("rebalance: empty label set");
    std::vector<int32_t> pos, neg;
    for (size_t i = 0; i < y.size(); ++i) {
        if (y[i] != 0 && y[i] != 1) throw ConfigError("rebalance: labels must be 0/1");
        (y[i] == 1 ? pos : neg).push_back(static_cast<int32_t>(i));
    }
    RebalancePlan plan;
    plan.strategy = strategy;
    const auto n = static_cast<int32_t>(y.size());

    if (strategy == ImbalanceStrategy::none || strategy == ImbalanceStrategy::class_weights) {
        plan.keep.resize(y.size());
        std::iota(plan.keep.begin(), plan.keep.end(), 0);
        plan.weights.assign(y.size(), 1.0);
        if (strategy == ImbalanceStrategy::class_weights) {
            if (pos.empty() || neg.empty())
                throw ConfigError("rebalance: class_weights needs both classes");
            double w_pos = static_cast<double>(n) / (2.0 * static_cast<double>(pos.size()));
            double w_neg = static_cast<double>(n) / (2.0 * static_cast<double>(neg.size()));
            for (size_t i = 0; i < y.size(); ++i) plan.weights[i] = y[i] == 1 ? w_pos : w_neg;
        }
        return plan;
    }

    if (pos.empty() || neg.empty())
        throw ConfigError("rebalance: resampling needs both classes");
    Rng rng(mix_seed(seed, "rebalance"));
    std::vector<int32_t>& minority = pos.size() <= neg.size() ? pos : neg;
    std::vector<int32_t>& majority = pos.size() <= neg.size() ? neg : pos;

    if (strategy == ImbalanceStrategy::oversample) {
        plan.keep.resize(y.size());
        std::iota(plan.keep.begin(), plan.keep.end(), 0);
        int64_t deficit = static_cast<int64_t>(majority.size()) -
                          static_cast<int64_t>(minority.size());
        for (int64_t d = 0; d < deficit; ++d)
            plan.keep.push_back(
                minority[rng.uniform_int(0, static_cast<int64_t>(minority.size()) - 1)]);
    } else {  // undersample
        std::vector<int32_t> drawn = majority;
        rng.shuffle(drawn);
        drawn.resize(minority.size());
        plan.keep = minority;
        plan.keep.insert(plan.keep.end(), drawn.begin(), drawn.end());
        std::sort(plan.keep.begin(), plan.keep.end());
    }
    plan.weights.assign(plan.keep.size(), 1.0);
    return plan;
}

RebalancedSet apply_rebalance(const feat::FeatureMatrix& x, const std::vector<int>& y,
                              const RebalancePlan& plan) {
    if (x.rows.size() != y.size())
        throw InvariantError("apply_rebalance: feature/label count mismatch");
    if (plan.keep.size() != plan.weights.size())
        throw InvariantError("apply_rebalance: malformed plan");
    RebalancedSet out;
    out.x.dim = x.dim;
    out.x.rows.reserve(plan.keep.size());
    out.y.reserve(plan.keep.size());
    for (int32_t idx : plan.keep) {
        if (idx < 0 || static_cast<size_t>(idx) >= y.size())
            throw InvariantError("apply_rebalance: plan index out of range");
        out.x.rows.push_back(x.rows[static_cast<size_t>(idx)]);
        out.y.push_back(y[static_cast<size_t>(idx)]);
    }
    out.weights = plan.weights;
    return out;
}

}  // namespace wb::model
