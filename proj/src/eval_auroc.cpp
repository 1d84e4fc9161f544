#include "windowbench/eval/auroc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "windowbench/error.hpp"
#include "windowbench/rng.hpp"

namespace wb::eval {

double auroc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size())
        throw InvariantError("auroc: score/label count mismatch");
    if (scores.empty()) throw ConfigError("auroc: empty input");
    int64_t n_pos = 0, n_neg = 0;
    for (size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != 0 && labels[i] != 1) throw ConfigError("auroc: labels must be 0/1");
        if (!std::isfinite(scores[i])) throw ConfigError("auroc: non-finite score");
        (labels[i] == 1 ? n_pos : n_neg)++;
    }
    if (n_pos == 0 || n_neg == 0)
        throw ConfigError("auroc: single-class input (" + std::to_string(n_pos) +
                          " positive, " + std::to_string(n_neg) + " negative)");

    std::vector<size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return scores[a] < scores[b]; });

    // Average rank within each tied block; sum ranks of positives.
    double rank_sum_pos = 0.0;
    size_t i = 0;
    while (i < order.size()) {
        size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
        double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // ranks are 1-based
        for (size_t k = i; k < j; ++k)
            if (labels[order[k]] == 1) rank_sum_pos += avg_rank;
        i = j;
    }
    double np = static_cast<double>(n_pos), nn = static_cast<double>(n_neg);
    return (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn);
}

BootstrapCi bootstrap_auroc_ci(const std::vector<double>& scores, const std::vector<int>& labels,
                               int b, double alpha, uint64_t seed) {
    if (b < 1) throw ConfigError("bootstrap_auroc_ci: b must be positive");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw ConfigError("bootstrap_auroc_ci: alpha must be in (0,1)");
    BootstrapCi ci;
    ci.point = auroc(scores, labels);

    Rng rng(mix_seed(seed, "bootstrap_auroc"));
    const auto n = static_cast<int64_t>(scores.size());
    const int max_redraws_per_rep = 16;
    std::vector<double> stats;
    stats.reserve(static_cast<size_t>(b));
    std::vector<double> s(scores.size());
    std::vector<int> l(labels.size());
    for (int rep = 0; rep < b; ++rep) {
        bool usable = false;
        for (int attempt = 0; attempt <= max_redraws_per_rep; ++attempt) {
            int64_t pos = 0;
            for (int64_t i = 0; i < n; ++i) {
                int64_t idx = rng.uniform_int(0, n - 1);
                s[static_cast<size_t>(i)] = scores[static_cast<size_t>(idx)];
                l[static_cast<size_t>(i)] = labels[static_cast<size_t>(idx)];
                pos += labels[static_cast<size_t>(idx)];
            }
            if (pos > 0 && pos < n) {
                usable = true;
                break;
            }
            ++ci.redraws;
        }
        if (usable) {
            stats.push_back(auroc(s, l));
            ++ci.usable;
        }
    }
    if (ci.usable < 20)
        throw ConfigError("bootstrap_auroc_ci: only " + std::to_string(ci.usable) +
                          " of " + std::to_string(b) +
                          " resamples contained both classes (need 20)");

    std::sort(stats.begin(), stats.end());
    // Percentile bounds with nearest-rank on the sorted resample statistics.
    auto percentile = [&](double q) {
        double pos = q * static_cast<double>(stats.size() - 1);
        auto lo_idx = static_cast<size_t>(std::floor(pos));
        auto hi_idx = static_cast<size_t>(std::ceil(pos));
        double frac = pos - std::floor(pos);
        return stats[lo_idx] * (1.0 - frac) + stats[hi_idx] * frac;
    };
    ci.lo = percentile(alpha / 2.0);
    ci.hi = percentile(1.0 - alpha / 2.0);
    return ci;
}

}  // namespace wb::eval
