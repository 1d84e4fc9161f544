#include "windowbench/model/neural.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>

#include "windowbench/error.hpp"
#include "windowbench/eval/auroc.hpp"
#include "windowbench/log.hpp"
#include "windowbench/model/linear.hpp"
#include "windowbench/rng.hpp"

namespace wb::model {

std::string_view to_string(Aggregation a) {
    switch (a) {
        case Aggregation::mean: return "mean";
        case Aggregation::maxpool: return "maxpool";
        default: return "attention";
    }
}

Aggregation parse_aggregation(std::string_view name) {
    if (name == "mean") return Aggregation::mean;
    if (name == "maxpool") return Aggregation::maxpool;
    if (name == "attention") return Aggregation::attention;
    throw ConfigError("unknown aggregation '" + std::string(name) + "'");
}

namespace {

double nll_term(double margin, int y) {
    double soft = margin > 0 ? margin + std::log1p(std::exp(-margin))
                             : std::log1p(std::exp(margin));
    return soft - static_cast<double>(y) * margin;
}

struct Layout {
    size_t vocab, emb, hid, attn, n_tasks;
    bool has_attn;

    size_t e_off() const { return 0; }
    size_t wp_off() const { return vocab * emb; }
    size_t bp_off() const { return wp_off() + hid * emb; }
    size_t wa_off() const { return bp_off() + hid; }
    size_t ba_off() const { return wa_off() + (has_attn ? attn * hid : 0); }
    size_t v_off() const { return ba_off() + (has_attn ? attn : 0); }
    size_t head_off(size_t t) const { return v_off() + (has_attn ? attn : 0) + t * (hid + 1); }
    size_t size() const { return head_off(n_tasks); }

    static Layout of(const NeuralModel& m) {
        Layout l;
        l.vocab = static_cast<size_t>(m.vocab_size);
        l.emb = static_cast<size_t>(m.dims.emb);
        l.hid = static_cast<size_t>(m.dims.hidden);
        l.attn = static_cast<size_t>(m.dims.attn);
        l.has_attn = m.agg == Aggregation::attention;
        l.n_tasks = m.head_w.size();
        return l;
    }
};

// Per-document activations kept for the backward pass.
struct DocForward {
    size_t T = 0;
    std::vector<double> pre;    // T x hid, before ReLU
    std::vector<double> h;      // T x hid
    std::vector<double> a;      // T x attn, tanh(Wa h + ba)
    std::vector<double> alpha;  // T, softmax weights
    std::vector<int32_t> am;    // hid, first argmax position (maxpool)
    std::vector<double> g;      // hid
};

void forward_doc(const NeuralModel& m, const std::vector<int32_t>& doc, DocForward& f) {
    const auto hid = static_cast<size_t>(m.dims.hidden);
    const auto emb = static_cast<size_t>(m.dims.emb);
    const auto attn = static_cast<size_t>(m.dims.attn);
    f.T = doc.size();
    f.g.assign(hid, 0.0);
    if (f.T == 0) return;  // empty document pools to zero

    f.pre.assign(f.T * hid, 0.0);
    f.h.assign(f.T * hid, 0.0);
    for (size_t t = 0; t < f.T; ++t) {
        int32_t tok = doc[t];
        if (tok < 0 || tok >= m.vocab_size)
            throw InvariantError("neural forward: token index " + std::to_string(tok) +
                                 " outside vocabulary of " + std::to_string(m.vocab_size));
        const double* e = &m.E[static_cast<size_t>(tok) * emb];
        for (size_t i = 0; i < hid; ++i) {
            double z = m.bp[i];
            const double* wrow = &m.Wp[i * emb];
            for (size_t j = 0; j < emb; ++j) z += wrow[j] * e[j];
            f.pre[t * hid + i] = z;
            f.h[t * hid + i] = z > 0 ? z : 0.0;
        }
    }

    switch (m.agg) {
        case Aggregation::mean: {
            for (size_t t = 0; t < f.T; ++t)
                for (size_t i = 0; i < hid; ++i) f.g[i] += f.h[t * hid + i];
            for (size_t i = 0; i < hid; ++i) f.g[i] /= static_cast<double>(f.T);
            break;
        }
        case Aggregation::maxpool: {
            f.am.assign(hid, 0);
            for (size_t i = 0; i < hid; ++i) f.g[i] = f.h[i];
            for (size_t t = 1; t < f.T; ++t)
                for (size_t i = 0; i < hid; ++i)
                    if (f.h[t * hid + i] > f.g[i]) {
                        f.g[i] = f.h[t * hid + i];
                        f.am[i] = static_cast<int32_t>(t);
                    }
            break;
        }
        case Aggregation::attention: {
            f.a.assign(f.T * attn, 0.0);
            std::vector<double> s(f.T, 0.0);
            for (size_t t = 0; t < f.T; ++t) {
                for (size_t i = 0; i < attn; ++i) {
                    double z = m.ba[i];
                    const double* wrow = &m.Wa[i * hid];
                    for (size_t j = 0; j < hid; ++j) z += wrow[j] * f.h[t * hid + j];
                    f.a[t * attn + i] = std::tanh(z);
                    s[t] += m.v[i] * f.a[t * attn + i];
                }
            }
            double smax = *std::max_element(s.begin(), s.end());
            f.alpha.assign(f.T, 0.0);
            double denom = 0.0;
            for (size_t t = 0; t < f.T; ++t) {
                f.alpha[t] = std::exp(s[t] - smax);
                denom += f.alpha[t];
            }
            for (size_t t = 0; t < f.T; ++t) {
                f.alpha[t] /= denom;
                for (size_t i = 0; i < hid; ++i) f.g[i] += f.alpha[t] * f.h[t * hid + i];
            }
            break;
        }
    }
}

// Gradient accumulator: dense for the small blocks, per-row sparse for E.
struct GradAccum {
    std::vector<double> dWp, dbp, dWa, dba, dv, dhead_w;
    double dhead_b = 0.0;
    std::map<int32_t, std::vector<double>> dE;

    void reset(const Layout& l) {
        dWp.assign(l.hid * l.emb, 0.0);
        dbp.assign(l.hid, 0.0);
        if (l.has_attn) {
            dWa.assign(l.attn * l.hid, 0.0);
            dba.assign(l.attn, 0.0);
            dv.assign(l.attn, 0.0);
        }
        dhead_w.assign(l.hid, 0.0);
        dhead_b = 0.0;
        dE.clear();
    }
};

// Accumulates d(scale * nll(example)) / d(params) into acc.
void backward_doc(const NeuralModel& m, const std::vector<int32_t>& doc, const DocForward& f,
                  size_t task, int y, double scale, GradAccum& acc) {
    const auto hid = static_cast<size_t>(m.dims.hidden);
    const auto emb = static_cast<size_t>(m.dims.emb);
    const auto attn = static_cast<size_t>(m.dims.attn);
    const std::vector<double>& hw = m.head_w[task];

    double logit = m.head_b[task];
    for (size_t i = 0; i < hid; ++i) logit += hw[i] * f.g[i];
    double dlogit = scale * (sigmoid(logit) - static_cast<double>(y));

    for (size_t i = 0; i < hid; ++i) acc.dhead_w[i] += dlogit * f.g[i];
    acc.dhead_b += dlogit;
    if (f.T == 0) return;  // zero pool: nothing upstream of the head moves

    std::vector<double> dg(hid);
    for (size_t i = 0; i < hid; ++i) dg[i] = dlogit * hw[i];

    std::vector<double> dh(f.T * hid, 0.0);
    switch (m.agg) {
        case Aggregation::mean: {
            double inv = 1.0 / static_cast<double>(f.T);
            for (size_t t = 0; t < f.T; ++t)
                for (size_t i = 0; i < hid; ++i) dh[t * hid + i] = dg[i] * inv;
            break;
        }
        case Aggregation::maxpool: {
            for (size_t i = 0; i < hid; ++i)
                dh[static_cast<size_t>(f.am[i]) * hid + i] = dg[i];
            break;
        }
        case Aggregation::attention: {
            // dalpha_t = dg . h_t ; softmax backward; tanh backward.
            std::vector<double> dalpha(f.T, 0.0);
            for (size_t t = 0; t < f.T; ++t)
                for (size_t i = 0; i < hid; ++i) dalpha[t] += dg[i] * f.h[t * hid + i];
            double mixed = 0.0;
            for (size_t t = 0; t < f.T; ++t) mixed += f.alpha[t] * dalpha[t];
            std::vector<double> dz(attn);
            for (size_t t = 0; t < f.T; ++t) {
                double ds = f.alpha[t] * (dalpha[t] - mixed);
                const double* at = &f.a[t * attn];
                for (size_t i = 0; i < attn; ++i) {
                    acc.dv[i] += ds * at[i];
                    dz[i] = ds * m.v[i] * (1.0 - at[i] * at[i]);
                    acc.dba[i] += dz[i];
                }
                for (size_t i = 0; i < attn; ++i) {
                    double* warow = &acc.dWa[i * hid];
                    const double dzi = dz[i];
                    for (size_t j = 0; j < hid; ++j) warow[j] += dzi * f.h[t * hid + j];
                }
                for (size_t j = 0; j < hid; ++j) {
                    double acc_h = f.alpha[t] * dg[j];
                    for (size_t i = 0; i < attn; ++i) acc_h += m.Wa[i * hid + j] * dz[i];
                    dh[t * hid + j] = acc_h;
                }
            }
            break;
        }
    }

    for (size_t t = 0; t < f.T; ++t) {
        int32_t tok = doc[t];
        const double* e = &m.E[static_cast<size_t>(tok) * emb];
        auto [it, fresh] = acc.dE.try_emplace(tok);
        if (fresh) it->second.assign(emb, 0.0);
        std::vector<double>& de = it->second;
        for (size_t i = 0; i < hid; ++i) {
            if (f.pre[t * hid + i] <= 0) continue;  // ReLU mask
            double dpre = dh[t * hid + i];
            if (dpre == 0.0) continue;
            double* wprow = &acc.dWp[i * emb];
            const double* wrow = &m.Wp[i * emb];
            for (size_t j = 0; j < emb; ++j) {
                wprow[j] += dpre * e[j];
                de[j] += dpre * wrow[j];
            }
            acc.dbp[i] += dpre;
        }
    }
}

void apply_sgd(NeuralModel& m, const GradAccum& acc, size_t task, double lr) {
    const auto emb = static_cast<size_t>(m.dims.emb);
    for (const auto& [tok, de] : acc.dE) {
        double* e = &m.E[static_cast<size_t>(tok) * emb];
        for (size_t j = 0; j < emb; ++j) e[j] -= lr * de[j];
    }
    for (size_t i = 0; i < m.Wp.size(); ++i) m.Wp[i] -= lr * acc.dWp[i];
    for (size_t i = 0; i < m.bp.size(); ++i) m.bp[i] -= lr * acc.dbp[i];
    if (m.agg == Aggregation::attention) {
        for (size_t i = 0; i < m.Wa.size(); ++i) m.Wa[i] -= lr * acc.dWa[i];
        for (size_t i = 0; i < m.ba.size(); ++i) m.ba[i] -= lr * acc.dba[i];
        for (size_t i = 0; i < m.v.size(); ++i) m.v[i] -= lr * acc.dv[i];
    }
    for (size_t i = 0; i < m.head_w[task].size(); ++i) m.head_w[task][i] -= lr * acc.dhead_w[i];
    m.head_b[task] -= lr * acc.dhead_b;
}

std::vector<double> normalized_weights(const SeqExamples& ex, const std::string& task,
                                       const char* which) {
    std::vector<double> w(ex.docs.size(), 1.0);
    if (ex.weights.empty()) return w;
    if (ex.weights.size() != ex.docs.size())
        throw InvariantError("train_neural: " + std::string(which) +
                             " weight length mismatch in task '" + task + "'");
    double total = 0.0;
    for (double x : ex.weights) {
        if (x < 0 || !std::isfinite(x))
            throw ConfigError("train_neural: bad sample weight in task '" + task + "'");
        total += x;
    }
    if (total <= 0) throw ConfigError("train_neural: sample weights sum to zero in task '" +
                                      task + "'");
    double scale = static_cast<double>(ex.weights.size()) / total;
    for (size_t i = 0; i < w.size(); ++i) w[i] = ex.weights[i] * scale;
    return w;
}

void validate_examples(const SeqExamples& ex, int vocab_size, const std::string& task,
                       const char* which, bool require_both_classes) {
    if (ex.docs.size() != ex.y.size())
        throw InvariantError("train_neural: " + std::string(which) +
                             " doc/label count mismatch in task '" + task + "'");
    int64_t pos = 0;
    for (int label : ex.y) {
        if (label != 0 && label != 1)
            throw ConfigError("train_neural: labels must be 0/1 in task '" + task + "'");
        pos += label;
    }
    for (const auto& doc : ex.docs)
        for (int32_t tok : doc)
            if (tok < 0 || tok >= vocab_size)
                throw InvariantError("train_neural: token index outside vocabulary in task '" +
                                     task + "'");
    if (require_both_classes && (pos == 0 || pos == static_cast<int64_t>(ex.y.size())))
        throw ConfigError("train_neural: task '" + task + "' training set is single-class (" +
                          std::to_string(pos) + " of " + std::to_string(ex.y.size()) +
                          " positive)");
}

bool val_usable(const SeqExamples& val) {
    if (val.empty()) return false;
    int64_t pos = 0;
    for (int label : val.y) pos += label;
    return pos > 0 && pos < static_cast<int64_t>(val.y.size());
}

}  // namespace

std::vector<double> get_params(const NeuralModel& m) {
    Layout l = Layout::of(m);
    std::vector<double> p;
    p.reserve(l.size());
    p.insert(p.end(), m.E.begin(), m.E.end());
    p.insert(p.end(), m.Wp.begin(), m.Wp.end());
    p.insert(p.end(), m.bp.begin(), m.bp.end());
    if (l.has_attn) {
        p.insert(p.end(), m.Wa.begin(), m.Wa.end());
        p.insert(p.end(), m.ba.begin(), m.ba.end());
        p.insert(p.end(), m.v.begin(), m.v.end());
    }
    for (size_t t = 0; t < l.n_tasks; ++t) {
        p.insert(p.end(), m.head_w[t].begin(), m.head_w[t].end());
        p.push_back(m.head_b[t]);
    }
    if (p.size() != l.size()) throw InvariantError("get_params: layout mismatch");
    return p;
}

void set_params(NeuralModel& m, const std::vector<double>& params) {
    Layout l = Layout::of(m);
    if (params.size() != l.size()) throw InvariantError("set_params: parameter stack size mismatch");
    auto it = params.begin();
    auto take = [&](std::vector<double>& dst, size_t n) {
        dst.assign(it, it + static_cast<long>(n));
        it += static_cast<long>(n);
    };
    take(m.E, l.vocab * l.emb);
    take(m.Wp, l.hid * l.emb);
    take(m.bp, l.hid);
    if (l.has_attn) {
        take(m.Wa, l.attn * l.hid);
        take(m.ba, l.attn);
        take(m.v, l.attn);
    }
    for (size_t t = 0; t < l.n_tasks; ++t) {
        take(m.head_w[t], l.hid);
        m.head_b[t] = *it++;
    }
}

double neural_batch_loss(const NeuralModel& m, size_t task, const SeqExamples& batch) {
    if (task >= m.head_w.size()) throw InvariantError("neural_batch_loss: task out of range");
    if (batch.empty()) throw ConfigError("neural_batch_loss: empty batch");
    std::vector<double> w = normalized_weights(batch, m.task_names[task], "batch");
    const auto hid = static_cast<size_t>(m.dims.hidden);
    DocForward f;
    double loss = 0.0;
    for (size_t i = 0; i < batch.docs.size(); ++i) {
        forward_doc(m, batch.docs[i], f);
        double logit = m.head_b[task];
        for (size_t j = 0; j < hid; ++j) logit += m.head_w[task][j] * f.g[j];
        loss += w[i] * nll_term(logit, batch.y[i]);
    }
    return loss / static_cast<double>(batch.docs.size());
}

std::vector<double> neural_batch_gradient(const NeuralModel& m, size_t task,
                                          const SeqExamples& batch) {
    if (task >= m.head_w.size())
        throw InvariantError("neural_batch_gradient: task out of range");
    if (batch.empty()) throw ConfigError("neural_batch_gradient: empty batch");
    Layout l = Layout::of(m);
    std::vector<double> w = normalized_weights(batch, m.task_names[task], "batch");
    GradAccum acc;
    acc.reset(l);
    DocForward f;
    double inv_b = 1.0 / static_cast<double>(batch.docs.size());
    for (size_t i = 0; i < batch.docs.size(); ++i) {
        forward_doc(m, batch.docs[i], f);
        backward_doc(m, batch.docs[i], f, task, batch.y[i], w[i] * inv_b, acc);
    }

    std::vector<double> grad(l.size(), 0.0);
    for (const auto& [tok, de] : acc.dE)
        std::copy(de.begin(), de.end(),
                  grad.begin() + static_cast<long>(l.e_off() + static_cast<size_t>(tok) * l.emb));
    std::copy(acc.dWp.begin(), acc.dWp.end(), grad.begin() + static_cast<long>(l.wp_off()));
    std::copy(acc.dbp.begin(), acc.dbp.end(), grad.begin() + static_cast<long>(l.bp_off()));
    if (l.has_attn) {
        std::copy(acc.dWa.begin(), acc.dWa.end(), grad.begin() + static_cast<long>(l.wa_off()));
        std::copy(acc.dba.begin(), acc.dba.end(), grad.begin() + static_cast<long>(l.ba_off()));
        std::copy(acc.dv.begin(), acc.dv.end(), grad.begin() + static_cast<long>(l.v_off()));
    }
    std::copy(acc.dhead_w.begin(), acc.dhead_w.end(),
              grad.begin() + static_cast<long>(l.head_off(task)));
    grad[l.head_off(task) + l.hid] = acc.dhead_b;
    return grad;
}

NeuralModel train_neural(const std::vector<NeuralTask>& tasks, int vocab_size,
                         const NeuralOptions& opts) {
    if (tasks.empty()) throw ConfigError("train_neural: no tasks");
    if (vocab_size < 1) throw ConfigError("train_neural: vocabulary is empty");
    if (opts.dims.emb < 1 || opts.dims.hidden < 1 || opts.dims.attn < 1)
        throw ConfigError("train_neural: dimensions must be positive");
    if (opts.lr <= 0 || opts.batch_size < 1 || opts.max_epochs < 1 || opts.patience < 1)
        throw ConfigError("train_neural: bad optimizer options");
    for (const NeuralTask& task : tasks) {
        if (task.train.empty())
            throw ConfigError("train_neural: task '" + task.name + "' has no training examples");
        validate_examples(task.train, vocab_size, task.name, "train", true);
        validate_examples(task.val, vocab_size, task.name, "val", false);
    }

    NeuralModel m;
    m.dims = opts.dims;
    m.agg = opts.agg;
    m.vocab_size = vocab_size;
    m.seed = opts.seed;
    const auto vocab = static_cast<size_t>(vocab_size);
    const auto emb = static_cast<size_t>(opts.dims.emb);
    const auto hid = static_cast<size_t>(opts.dims.hidden);
    const auto attn = static_cast<size_t>(opts.dims.attn);

    Rng init_rng(mix_seed(opts.seed, "init"));
    auto uniform = [&](std::vector<double>& dst, size_t n, double lim) {
        dst.resize(n);
        for (double& x : dst) x = (init_rng.uniform01() * 2.0 - 1.0) * lim;
    };
    uniform(m.E, vocab * emb, 0.05);
    uniform(m.Wp, hid * emb, std::sqrt(6.0 / static_cast<double>(emb + hid)));
    m.bp.assign(hid, 0.0);
    if (opts.agg == Aggregation::attention) {
        uniform(m.Wa, attn * hid, std::sqrt(6.0 / static_cast<double>(hid + attn)));
        m.ba.assign(attn, 0.0);
        uniform(m.v, attn, std::sqrt(6.0 / static_cast<double>(attn + 1)));
    }
    m.head_w.assign(tasks.size(), std::vector<double>(hid, 0.0));
    m.head_b.assign(tasks.size(), 0.0);
    for (const NeuralTask& task : tasks) m.task_names.push_back(task.name);

    if (opts.pretrained) {
        for (const auto& [row, values] : opts.pretrained->rows) {
            if (row < 0 || row >= vocab_size)
                throw ConfigError("train_neural: pretrained row " + std::to_string(row) +
                                  " outside vocabulary of " + std::to_string(vocab_size));
            if (values.size() != emb)
                throw ConfigError("train_neural: pretrained row " + std::to_string(row) +
                                  " has " + std::to_string(values.size()) + " values, expected " +
                                  std::to_string(emb));
            std::copy(values.begin(), values.end(),
                      m.E.begin() + static_cast<size_t>(row) * emb);
        }
        log::info("train_neural",
                  {{"pretrained_rows", std::to_string(opts.pretrained->rows.size())}});
    }

    std::vector<std::vector<double>> train_weights;
    for (const NeuralTask& task : tasks)
        train_weights.push_back(normalized_weights(task.train, task.name, "train"));

    bool monitor = std::all_of(tasks.begin(), tasks.end(),
                               [](const NeuralTask& t) { return val_usable(t.val); });
    if (!monitor)
        log::info("train_neural",
                  {{"early_stopping", "off"}, {"reason", "no usable validation set"}});

    Layout l = Layout::of(m);
    GradAccum acc;
    DocForward f;
    std::vector<double> best_params;
    double best_val = -1.0;
    int stale = 0;

    for (int epoch = 0; epoch < opts.max_epochs; ++epoch) {
        Rng epoch_rng(mix_seed(opts.seed, "epoch/" + std::to_string(epoch)));
        std::vector<std::vector<int32_t>> orders(tasks.size());
        size_t max_batches = 0;
        for (size_t t = 0; t < tasks.size(); ++t) {
            orders[t].resize(tasks[t].train.docs.size());
            for (size_t i = 0; i < orders[t].size(); ++i)
                orders[t][i] = static_cast<int32_t>(i);
            epoch_rng.shuffle(orders[t]);
            size_t nb = (orders[t].size() + static_cast<size_t>(opts.batch_size) - 1) /
                        static_cast<size_t>(opts.batch_size);
            max_batches = std::max(max_batches, nb);
        }

        for (size_t b = 0; b < max_batches; ++b) {
            for (size_t t = 0; t < tasks.size(); ++t) {
                size_t lo = b * static_cast<size_t>(opts.batch_size);
                if (lo >= orders[t].size()) continue;
                size_t hi_idx = std::min(lo + static_cast<size_t>(opts.batch_size),
                                         orders[t].size());
                acc.reset(l);
                double inv_b = 1.0 / static_cast<double>(hi_idx - lo);
                for (size_t k = lo; k < hi_idx; ++k) {
                    auto i = static_cast<size_t>(orders[t][k]);
                    forward_doc(m, tasks[t].train.docs[i], f);
                    backward_doc(m, tasks[t].train.docs[i], f, t, tasks[t].train.y[i],
                                 train_weights[t][i] * inv_b, acc);
                }
                apply_sgd(m, acc, t, opts.lr);
            }
        }
        m.epochs_run = epoch + 1;

        if (!monitor) continue;
        double mean_auroc = 0.0;
        for (size_t t = 0; t < tasks.size(); ++t)
            mean_auroc += eval::auroc(predict_neural(m, t, tasks[t].val.docs), tasks[t].val.y);
        mean_auroc /= static_cast<double>(tasks.size());
        log::debug("train_neural", {{"epoch", std::to_string(epoch)},
                                    {"val_auroc", std::to_string(mean_auroc)}});
        if (mean_auroc > best_val) {
            best_val = mean_auroc;
            best_params = get_params(m);
            stale = 0;
        } else if (++stale >= opts.patience) {
            m.early_stopped = true;
            break;
        }
    }

    if (monitor && !best_params.empty()) {
        set_params(m, best_params);
        m.best_val_auroc = best_val;
    }
    return m;
}

NeuralModel train_avg_encoder(const NeuralTask& task, int vocab_size, const NeuralOptions& opts) {
    return train_neural(std::vector<NeuralTask>{task}, vocab_size, opts);
}

EmbeddingSeed load_embedding_tsv(const std::filesystem::path& path,
                                 const std::function<int32_t(std::string_view)>& lookup,
                                 int emb_dim) {
    if (emb_dim <= 0) throw ConfigError("load_embedding_tsv: emb_dim must be positive");
    std::ifstream in(path);
    if (!in) throw ConfigError("load_embedding_tsv: cannot open " + path.string());
    EmbeddingSeed seed;
    std::string line;
    int64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fail = [&](const std::string& why) -> void {
            throw ConfigError("load_embedding_tsv: " + path.string() + ":" +
                              std::to_string(line_no) + ": " + why);
        };
        std::vector<std::string_view> fields;
        std::string_view rest = line;
        while (true) {
            size_t tab = rest.find('\t');
            fields.push_back(rest.substr(0, tab));
            if (tab == std::string_view::npos) break;
            rest.remove_prefix(tab + 1);
        }
        if (fields.size() != static_cast<size_t>(emb_dim) + 1)
            fail("expected token + " + std::to_string(emb_dim) + " floats, got " +
                 std::to_string(fields.size()) + " fields");
        if (fields[0].empty()) fail("empty token");
        std::vector<double> row(static_cast<size_t>(emb_dim));
        for (int j = 0; j < emb_dim; ++j) {
            std::string field(fields[static_cast<size_t>(j) + 1]);
            char* end = nullptr;
            double value = std::strtod(field.c_str(), &end);
            if (end != field.c_str() + field.size() || field.empty() || !std::isfinite(value))
                fail("bad float '" + field + "'");
            row[static_cast<size_t>(j)] = value;
        }
        int32_t index = lookup(fields[0]);
        if (index >= 0) seed.rows[index] = std::move(row);
    }
    return seed;
}

std::vector<double> predict_neural(const NeuralModel& m, size_t task,
                                   const std::vector<std::vector<int32_t>>& docs) {
    if (task >= m.head_w.size()) throw InvariantError("predict_neural: task index out of range");
    const auto hid = static_cast<size_t>(m.dims.hidden);
    std::vector<double> probs;
    probs.reserve(docs.size());
    DocForward f;
    for (const auto& doc : docs) {
        forward_doc(m, doc, f);
        double logit = m.head_b[task];
        for (size_t j = 0; j < hid; ++j) logit += m.head_w[task][j] * f.g[j];
        probs.push_back(sigmoid(logit));
    }
    return probs;
}

}  // namespace wb::model
