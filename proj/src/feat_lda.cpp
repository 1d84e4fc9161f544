#include "windowbench/feat/lda.hpp"

#include <cmath>

#include "windowbench/error.hpp"
#include "windowbench/log.hpp"
#include "windowbench/rng.hpp"

namespace wb::feat {

namespace {

// Draws an index proportional to the (unnormalized) weights.
int32_t draw(Rng& rng, const std::vector<double>& weights, double total) {
    double u = rng.uniform01() * total;
    double acc = 0.0;
    for (size_t k = 0; k + 1 < weights.size(); ++k) {
        acc += weights[k];
        if (u < acc) return static_cast<int32_t>(k);
    }
    return static_cast<int32_t>(weights.size() - 1);
}

}  // namespace

LdaModel lda_fit(const FeatureMatrix& training_counts, int32_t k, double alpha, double beta,
                 int gibbs_iters, int burn_in, int sample_every, uint64_t seed) {
    if (k < 1) throw ConfigError("lda topic count must be >= 1");
    if (training_counts.rows.empty()) throw ConfigError("lda fit needs a non-empty corpus");
    if (burn_in >= gibbs_iters)
        throw ConfigError("lda burn_in must be smaller than gibbs_iters");
    if (alpha < 0) alpha = 50.0 / static_cast<double>(k);

    const int32_t v = training_counts.dim;
    const size_t kk = static_cast<size_t>(k), vv = static_cast<size_t>(v);

    // Token instances, with empty documents dropped.
    struct Doc {
        std::vector<int32_t> words;
    };
    std::vector<Doc> docs;
    int64_t skipped = 0;
    for (const SparseVector& row : training_counts.rows) {
        Doc d;
        for (const auto& [word, count] : row.entries)
            for (int64_t c = 0; c < static_cast<int64_t>(count); ++c) d.words.push_back(word);
        if (d.words.empty()) {
            ++skipped;
            continue;
        }
        docs.push_back(std::move(d));
    }
    if (skipped > 0)
        log::info("lda_fit", {{"skipped_empty_documents", std::to_string(skipped)}});
    if (docs.empty()) throw ConfigError("lda fit: every document is empty");

    Rng rng(mix_seed(seed, "lda_fit"));
    std::vector<std::vector<int32_t>> z(docs.size());
    std::vector<int64_t> n_dk(docs.size() * kk, 0);
    std::vector<int64_t> n_kw(kk * vv, 0);
    std::vector<int64_t> n_k(kk, 0);
    for (size_t d = 0; d < docs.size(); ++d) {
        z[d].resize(docs[d].words.size());
        for (size_t t = 0; t < docs[d].words.size(); ++t) {
            int32_t topic = static_cast<int32_t>(rng.uniform_int(0, k - 1));
            z[d][t] = topic;
            ++n_dk[d * kk + static_cast<size_t>(topic)];
            ++n_kw[static_cast<size_t>(topic) * vv + static_cast<size_t>(docs[d].words[t])];
            ++n_k[static_cast<size_t>(topic)];
        }
    }

    std::vector<double> phi_acc(kk * vv, 0.0);
    int64_t samples = 0;
    std::vector<double> weights(kk);
    const double vbeta = static_cast<double>(v) * beta;
    for (int iter = 0; iter < gibbs_iters; ++iter) {
        for (size_t d = 0; d < docs.size(); ++d) {
            for (size_t t = 0; t < docs[d].words.size(); ++t) {
                const int32_t w = docs[d].words[t];
                const size_t old_k = static_cast<size_t>(z[d][t]);
                --n_dk[d * kk + old_k];
                --n_kw[old_k * vv + static_cast<size_t>(w)];
                --n_k[old_k];
                double total = 0.0;
                for (size_t topic = 0; topic < kk; ++topic) {
                    double wgt = (static_cast<double>(n_dk[d * kk + topic]) + alpha) *
                                 (static_cast<double>(n_kw[topic * vv + static_cast<size_t>(w)]) +
                                  beta) /
                                 (static_cast<double>(n_k[topic]) + vbeta);
                    weights[topic] = wgt;
                    total += wgt;
                }
                size_t new_k = static_cast<size_t>(draw(rng, weights, total));
                z[d][t] = static_cast<int32_t>(new_k);
                ++n_dk[d * kk + new_k];
                ++n_kw[new_k * vv + static_cast<size_t>(w)];
                ++n_k[new_k];
            }
        }
        if (iter >= burn_in && (iter - burn_in) % sample_every == 0) {
            ++samples;
            for (size_t topic = 0; topic < kk; ++topic) {
                double denom = static_cast<double>(n_k[topic]) + vbeta;
                for (size_t w = 0; w < vv; ++w)
                    phi_acc[topic * vv + w] +=
                        (static_cast<double>(n_kw[topic * vv + w]) + beta) / denom;
            }
        }
    }

    LdaModel model;
    model.k = k;
    model.vocab_size = v;
    model.alpha = alpha;
    model.beta = beta;
    model.gibbs_iters = gibbs_iters;
    model.burn_in = burn_in;
    model.sample_every = sample_every;
    model.seed = seed;
    model.phi.assign(kk * vv, 0.0);
    for (size_t topic = 0; topic < kk; ++topic) {
        double row_sum = 0.0;
        for (size_t w = 0; w < vv; ++w) row_sum += phi_acc[topic * vv + w];
        for (size_t w = 0; w < vv; ++w)
            model.phi[topic * vv + w] =
                row_sum > 0 ? phi_acc[topic * vv + w] / row_sum
                            : 1.0 / static_cast<double>(v);
    }
    return model;
}

std::vector<double> lda_transform(const LdaModel& model, const SparseVector& counts,
                                  int infer_iters, uint64_t seed) {
    const size_t kk = static_cast<size_t>(model.k);
    if (infer_iters < 1) throw ConfigError("lda transform needs infer_iters >= 1");
    if (counts.dim != model.vocab_size)
        throw InvariantError("lda transform dimension mismatch: doc " +
                             std::to_string(counts.dim) + " vs model " +
                             std::to_string(model.vocab_size));

    std::vector<int32_t> words;
    for (const auto& [word, count] : counts.entries)
        for (int64_t c = 0; c < static_cast<int64_t>(count); ++c) words.push_back(word);
    std::vector<double> theta(kk, 1.0 / static_cast<double>(model.k));
    if (words.empty()) return theta;

    Rng rng(mix_seed(seed, "lda_transform"));
    std::vector<int32_t> z(words.size());
    std::vector<int64_t> n_k(kk, 0);
    for (size_t t = 0; t < words.size(); ++t) {
        int32_t topic = static_cast<int32_t>(rng.uniform_int(0, model.k - 1));
        z[t] = topic;
        ++n_k[static_cast<size_t>(topic)];
    }

    std::vector<double> weights(kk);
    std::vector<double> theta_acc(kk, 0.0);
    int64_t samples = 0;
    const int accumulate_from = infer_iters / 2;
    for (int iter = 0; iter < infer_iters; ++iter) {
        for (size_t t = 0; t < words.size(); ++t) {
            const size_t old_k = static_cast<size_t>(z[t]);
            --n_k[old_k];
            double total = 0.0;
            for (size_t topic = 0; topic < kk; ++topic) {
                double wgt = (static_cast<double>(n_k[topic]) + model.alpha) *
                             model.phi_at(static_cast<int32_t>(topic), words[t]);
                weights[topic] = wgt;
                total += wgt;
            }
            size_t new_k = total > 0 ? static_cast<size_t>(draw(rng, weights, total))
                                     : static_cast<size_t>(rng.uniform_int(0, model.k - 1));
            z[t] = static_cast<int32_t>(new_k);
            ++n_k[new_k];
        }
        if (iter >= accumulate_from) {
            ++samples;
            double denom = static_cast<double>(words.size()) +
                           static_cast<double>(model.k) * model.alpha;
            for (size_t topic = 0; topic < kk; ++topic)
                theta_acc[topic] += (static_cast<double>(n_k[topic]) + model.alpha) / denom;
        }
    }
    double sum = 0.0;
    for (size_t topic = 0; topic < kk; ++topic) sum += theta_acc[topic];
    for (size_t topic = 0; topic < kk; ++topic) theta[topic] = theta_acc[topic] / sum;
    return theta;
}

}  // namespace wb::feat
