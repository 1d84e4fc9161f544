#include "windowbench/eval/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "windowbench/ehr/cohort.hpp"
#include "windowbench/error.hpp"
#include "windowbench/eval/auroc.hpp"
#include "windowbench/feat/lda.hpp"
#include "windowbench/feat/structured.hpp"
#include "windowbench/log.hpp"
#include "windowbench/model/linear.hpp"
#include "windowbench/model/multitask.hpp"
#include "windowbench/rng.hpp"
#include "windowbench/text/document.hpp"

namespace wb::eval {

ModelSpec parse_model_id(const std::string& id) {
    if (id.empty()) throw ConfigError("empty model id");
    std::vector<std::string> segments;
    {
        std::stringstream ss(id);
        std::string seg;
        while (std::getline(ss, seg, '+')) segments.push_back(seg);
    }
    if (segments.empty() || segments.front().empty())
        throw ConfigError("unknown model id '" + id + "'");

    ModelSpec spec;
    spec.id = id;
    auto fail = [&](const std::string& why) -> void {
        throw ConfigError("model id '" + id + "': " + why);
    };

    if (segments.front() == "LR") {
        spec.family = ModelSpec::Family::linear;
        bool saw_penalty = false, saw_encoder = false, saw_norm = false;
        for (size_t i = 1; i < segments.size(); ++i) {
            const std::string& seg = segments[i];
            if (seg == "L1" || seg == "L2" || seg == "None") {
                if (saw_penalty) fail("more than one penalty segment");
                saw_penalty = true;
                spec.penalty = seg == "L1"   ? model::Penalty::l1
                               : seg == "L2" ? model::Penalty::l2
                                             : model::Penalty::none;
            } else if (seg == "BOW" || seg == "BinaryBOW" || seg == "TFIDF" || seg == "LDA") {
                if (saw_encoder) fail("more than one text encoder");
                saw_encoder = true;
                spec.text_encoder = seg == "BOW"         ? ModelSpec::TextEncoder::bow
                                    : seg == "BinaryBOW" ? ModelSpec::TextEncoder::binary_bow
                                    : seg == "TFIDF"     ? ModelSpec::TextEncoder::tfidf
                                                         : ModelSpec::TextEncoder::lda;
            } else if (seg == "Structured") {
                if (spec.structured) fail("duplicate Structured segment");
                spec.structured = true;
            } else if (seg.rfind("norm=", 0) == 0) {
                if (saw_norm) fail("more than one norm segment");
                saw_norm = true;
                std::string value = seg.substr(5);
                if (value == "None" || value == "none")
                    spec.norm = feat::Norm::none;
                else if (value == "l1" || value == "1")
                    spec.norm = feat::Norm::l1;
                else if (value == "l2" || value == "2")
                    spec.norm = feat::Norm::l2;
                else
                    fail("unknown norm '" + value + "'");
            } else {
                fail("unknown segment '" + seg + "'");
            }
        }
        if (saw_norm && !saw_encoder) fail("norm= requires a text encoder");
        if (!saw_encoder && !spec.structured)
            fail("needs a text encoder, Structured, or both");
        return spec;
    }

    if (segments.front() == "Average") {
        spec.family = ModelSpec::Family::neural;
        if (segments.size() > 2) fail("too many segments for a neural id");
        if (segments.size() == 2) {
            const std::string& seg = segments[1];
            if (seg == "Mean")
                spec.agg = model::Aggregation::mean;
            else if (seg == "Maxpool")
                spec.agg = model::Aggregation::maxpool;
            else if (seg == "Attention")
                spec.agg = model::Aggregation::attention;
            else
                fail("unknown aggregation segment '" + seg + "'");
        }
        return spec;
    }

    throw ConfigError("unknown model id '" + id + "' (expected LR... or Average...)");
}

void check_model_source(const ModelSpec& spec, DataSource source) {
    auto fail = [&](const std::string& why) -> void {
        throw ConfigError("model id '" + spec.id + "' cannot run on source '" +
                          std::string(to_string(source)) + "': " + why);
    };
    if (spec.family == ModelSpec::Family::neural) {
        if (source != DataSource::notes) fail("neural ids run on notes only");
        return;
    }
    switch (source) {
        case DataSource::notes:
            if (spec.text_encoder == ModelSpec::TextEncoder::none)
                fail("needs a text encoder");
            if (spec.structured) fail("Structured segment not allowed on notes");
            break;
        case DataSource::structured:
            if (spec.text_encoder != ModelSpec::TextEncoder::none)
                fail("text encoders not allowed on structured");
            if (!spec.structured) fail("needs the Structured segment");
            break;
        case DataSource::both:
            if (spec.text_encoder == ModelSpec::TextEncoder::none)
                fail("needs a text encoder");
            if (!spec.structured) fail("needs the Structured segment");
            break;
    }
}

namespace {

using ehr::ObservationWindow;
using ehr::SurgeryType;

struct TaskIndex {
    SurgeryType type = SurgeryType::hip;
    std::vector<size_t> train, validation, test;  // indices into cohort.members
};

struct Needs {
    bool text = false;        // documents + vocabulary
    bool counts = false;      // count-BoW rows
    bool binary = false;      // binary-BoW rows
    bool tfidf = false;       // idf table
    bool lda = false;         // topic model + per-doc topic rows
    bool seqs = false;        // vocabulary-indexed token sequences
    bool structured = false;  // dictionary + stats + aggregated rows
};

struct WindowArtifacts {
    ObservationWindow window;
    std::vector<text::Document> docs;
    text::Vocabulary vocab;
    std::vector<feat::SparseVector> count_rows;
    std::vector<feat::SparseVector> binary_rows;
    feat::IdfTable idf;
    std::optional<feat::LdaModel> lda;
    std::vector<feat::SparseVector> lda_rows;
    std::vector<std::vector<int32_t>> seqs;
    std::optional<model::EmbeddingSeed> emb_seed;
    feat::FeatureDictionary dict;
    feat::NumericStats stats;
    std::vector<feat::SparseVector> structured_rows;
};

struct Unit {
    DataSource source = DataSource::notes;
    Mode mode = Mode::independent;
    ModelSpec spec;
    ObservationWindow window;
    std::vector<const TaskIndex*> unit_tasks;
    uint64_t seed = 0;
    const WindowArtifacts* art = nullptr;
};

std::string unit_key(const Unit& u) {
    std::string key = "cell/";
    key += to_string(u.source);
    key += '/';
    key += to_string(u.mode);
    key += '/';
    key += u.spec.id;
    key += '/';
    key += u.window.name();
    if (u.mode == Mode::independent) {
        key += '/';
        key += to_string(u.unit_tasks.front()->type);
    } else {
        key += "/joint";
    }
    return key;
}

WindowArtifacts build_artifacts(const SweepConfig& config, const ObservationWindow& window,
                                const Needs& needs, const std::vector<size_t>& train_members) {
    const ehr::Corpus& corpus = *config.corpus;
    const auto& members = config.cohort->members;
    WindowArtifacts art;
    art.window = window;

    std::vector<std::vector<ehr::Encounter>> windowed_encounters;
    if (needs.structured) windowed_encounters.resize(members.size());
    if (needs.text) art.docs.reserve(members.size());

    for (size_t i = 0; i < members.size(); ++i) {
        ehr::WindowedRecord slice = ehr::slice_window(corpus, members[i].surgery, window);
        if (needs.text) {
            std::vector<text::TokenizedNote> notes;
            notes.reserve(slice.notes.size());
            for (const ehr::ClinicalNote& note : slice.notes)
                notes.push_back(text::tokenize_note(note.note_id, note.text));
            art.docs.push_back(text::concat_notes(members[i].surgery.event_id(), notes));
        }
        if (needs.structured) windowed_encounters[i] = std::move(slice.encounters);
    }

    if (needs.text) {
        std::vector<text::Document> train_docs;
        train_docs.reserve(train_members.size());
        for (size_t i : train_members) train_docs.push_back(art.docs[i]);
        art.vocab = text::build_vocab(train_docs, config.hp.min_df, config.hp.vocab_max, "train");
        log::info("sweep_artifacts", {{"window", window.name()},
                                      {"vocab", std::to_string(art.vocab.size())}});

        if (needs.counts || needs.tfidf || needs.lda) {
            art.count_rows.reserve(art.docs.size());
            for (const text::Document& doc : art.docs)
                art.count_rows.push_back(feat::encode_count_bow(doc, art.vocab));
        }
        if (needs.binary) {
            art.binary_rows.reserve(art.docs.size());
            for (const text::Document& doc : art.docs)
                art.binary_rows.push_back(feat::encode_binary_bow(doc, art.vocab));
        }
        if (needs.tfidf) {
            std::vector<feat::SparseVector> train_counts;
            train_counts.reserve(train_members.size());
            for (size_t i : train_members) train_counts.push_back(art.count_rows[i]);
            art.idf = feat::fit_idf(train_counts, art.vocab.size());
        }
        if (needs.lda) {
            feat::FeatureMatrix train_counts;
            train_counts.dim = art.vocab.size();
            for (size_t i : train_members) train_counts.rows.push_back(art.count_rows[i]);
            art.lda = feat::lda_fit(train_counts, config.hp.lda_topics, config.hp.lda_alpha,
                                    config.hp.lda_beta, config.hp.lda_iters,
                                    config.hp.lda_burn_in, config.hp.lda_sample_every,
                                    mix_seed(config.seed, "lda/" + window.name()));
            art.lda_rows.reserve(art.count_rows.size());
            for (size_t i = 0; i < art.count_rows.size(); ++i) {
                std::vector<double> theta = feat::lda_transform(
                    *art.lda, art.count_rows[i], config.hp.lda_infer_iters,
                    mix_seed(config.seed, "lda_doc/" + window.name() + "/" + std::to_string(i)));
                std::vector<std::pair<int32_t, double>> entries;
                entries.reserve(theta.size());
                for (size_t k = 0; k < theta.size(); ++k)
                    entries.emplace_back(static_cast<int32_t>(k), theta[k]);
                art.lda_rows.push_back(
                    feat::make_sparse(static_cast<int32_t>(theta.size()), std::move(entries)));
            }
        }
        if (needs.seqs) {
            art.seqs.reserve(art.docs.size());
            for (const text::Document& doc : art.docs) {
                std::vector<int32_t> seq;
                seq.reserve(doc.tokens.size());
                for (const std::string& token : doc.tokens) {
                    int32_t idx = art.vocab.index_of(token);
                    if (idx >= 0) seq.push_back(idx);
                }
                art.seqs.push_back(std::move(seq));
            }
            if (!config.embedding_file.empty()) {
                art.emb_seed = model::load_embedding_tsv(
                    config.embedding_file,
                    [&art](std::string_view token) { return art.vocab.index_of(token); },
                    config.hp.dims.emb);
                log::info("sweep_artifacts",
                          {{"window", window.name()},
                           {"pretrained_rows", std::to_string(art.emb_seed->rows.size())}});
            }
        }
    }

    if (needs.structured) {
        if (!config.gem) throw ConfigError("run_sweep: structured features need a GEM table");
        std::vector<ehr::Encounter> train_encounters;
        for (size_t i : train_members)
            train_encounters.insert(train_encounters.end(), windowed_encounters[i].begin(),
                                    windowed_encounters[i].end());
        art.dict = feat::build_feature_dictionary(train_encounters, *config.gem);
        art.stats = feat::fit_numeric_stats(train_encounters, art.dict);
        log::info("sweep_artifacts", {{"window", window.name()},
                                      {"structured_dims", std::to_string(art.dict.size())}});
        art.structured_rows.reserve(members.size());
        for (size_t i = 0; i < members.size(); ++i) {
            std::vector<feat::SparseVector> encoded;
            encoded.reserve(windowed_encounters[i].size());
            for (const ehr::Encounter& enc : windowed_encounters[i])
                encoded.push_back(feat::encode_encounter(enc, art.dict, art.stats, *config.gem));
            art.structured_rows.push_back(feat::aggregate_encounters(encoded, art.dict));
        }
    }
    return art;
}

feat::SparseVector concat_sparse(const feat::SparseVector& a, const feat::SparseVector& b) {
    feat::SparseVector out;
    out.dim = a.dim + b.dim;
    out.entries = a.entries;
    out.entries.reserve(a.entries.size() + b.entries.size());
    for (const auto& [i, v] : b.entries) out.entries.emplace_back(i + a.dim, v);
    return out;
}

// Feature row for one cohort member under a linear model spec.
feat::SparseVector member_features(const WindowArtifacts& art, const ModelSpec& spec,
                                   DataSource source, size_t i) {
    feat::SparseVector text_vec;
    if (source != DataSource::structured) {
        switch (spec.text_encoder) {
            case ModelSpec::TextEncoder::bow:
                text_vec = feat::apply_norm(art.count_rows[i], spec.norm);
                break;
            case ModelSpec::TextEncoder::binary_bow:
                text_vec = feat::apply_norm(art.binary_rows[i], spec.norm);
                break;
            case ModelSpec::TextEncoder::tfidf:
                text_vec = feat::encode_tfidf(art.count_rows[i], art.idf, spec.norm);
                break;
            case ModelSpec::TextEncoder::lda:
                text_vec = feat::apply_norm(art.lda_rows[i], spec.norm);
                break;
            case ModelSpec::TextEncoder::none:
                throw InvariantError("member_features: linear spec without text encoder");
        }
    }
    if (source == DataSource::notes) return text_vec;
    if (source == DataSource::structured) return art.structured_rows[i];
    return concat_sparse(text_vec, art.structured_rows[i]);
}

feat::FeatureMatrix gather_features(const WindowArtifacts& art, const ModelSpec& spec,
                                    DataSource source, const std::vector<size_t>& members) {
    feat::FeatureMatrix x;
    x.rows.reserve(members.size());
    for (size_t i : members) x.rows.push_back(member_features(art, spec, source, i));
    x.dim = x.rows.empty() ? 0 : x.rows.front().dim;
    return x;
}

std::vector<int> gather_labels(const ehr::Cohort& cohort, const std::vector<size_t>& members) {
    std::vector<int> y;
    y.reserve(members.size());
    for (size_t i : members) y.push_back(cohort.members[i].label.positive ? 1 : 0);
    return y;
}

std::vector<std::vector<int32_t>> gather_seqs(const WindowArtifacts& art,
                                              const std::vector<size_t>& members) {
    std::vector<std::vector<int32_t>> seqs;
    seqs.reserve(members.size());
    for (size_t i : members) seqs.push_back(art.seqs[i]);
    return seqs;
}

struct TrainSelection {
    std::vector<size_t> members;   // post-rebalance member indices
    std::vector<double> weights;   // empty = uniform
};

TrainSelection select_train(const ehr::Cohort& cohort, const std::vector<size_t>& train_members,
                            model::ImbalanceStrategy strategy, uint64_t seed) {
    std::vector<int> y = gather_labels(cohort, train_members);
    model::RebalancePlan plan = model::make_rebalance_plan(y, strategy, seed);
    TrainSelection sel;
    sel.members.reserve(plan.keep.size());
    for (int32_t k : plan.keep) sel.members.push_back(train_members[static_cast<size_t>(k)]);
    if (strategy == model::ImbalanceStrategy::class_weights) sel.weights = plan.weights;
    return sel;
}

struct ScoredSplit {
    ehr::Split split;
    std::vector<double> scores;
    std::vector<int> labels;
};

ResultRow make_row(const Unit& u, SurgeryType task, const ScoredSplit& scored, bool converged,
                   int bootstrap_b) {
    ResultRow row;
    row.task = task;
    row.mode = u.mode;
    row.source = u.source;
    row.model_id = u.spec.id;
    row.window = u.window;
    row.split = scored.split;
    row.converged = converged;
    row.seed = u.seed;
    for (int label : scored.labels) (label == 1 ? row.n_pos : row.n_neg)++;
    if (converged) {
        BootstrapCi ci = bootstrap_auroc_ci(
            scored.scores, scored.labels, bootstrap_b, 0.05,
            mix_seed(u.seed, "ci/" + std::string(to_string(scored.split)) + "/" +
                                 std::string(to_string(task))));
        row.auroc = quantize9(ci.point);
        row.ci_lo = quantize9(std::min(ci.lo, ci.point));
        row.ci_hi = quantize9(std::max(ci.hi, ci.point));
    }
    return row;
}

// Patient-level splits projected onto each task's members.
std::vector<TaskIndex> build_task_index(const SweepConfig& config,
                                        const std::vector<SurgeryType>& types) {
    std::vector<TaskIndex> task_index;
    for (SurgeryType type : types) {
        for (const TaskIndex& existing : task_index)
            if (existing.type == type)
                throw ConfigError("run_sweep: duplicate task " + std::string(to_string(type)));
        TaskIndex ti;
        ti.type = type;
        for (size_t i = 0; i < config.cohort->members.size(); ++i) {
            const ehr::CohortMember& member = config.cohort->members[i];
            if (member.surgery.surgery_type != type) continue;
            switch (config.split->of(member.surgery.patient_id)) {
                case ehr::Split::train: ti.train.push_back(i); break;
                case ehr::Split::validation: ti.validation.push_back(i); break;
                case ehr::Split::test: ti.test.push_back(i); break;
            }
        }
        if (ti.train.empty() || ti.validation.empty() || ti.test.empty())
            throw ConfigError("run_sweep: task " + std::string(to_string(type)) +
                              " has an empty split");
        // AUROC is undefined on a one-class split; fail before any training.
        for (const auto& [split_name, members] :
             {std::pair{"validation", &ti.validation}, std::pair{"test", &ti.test}}) {
            int64_t pos = 0;
            for (size_t i : *members)
                if (config.cohort->members[i].label.positive) ++pos;
            if (pos == 0 || pos == static_cast<int64_t>(members->size()))
                throw ConfigError(
                    "run_sweep: task " + std::string(to_string(type)) + " " + split_name +
                    " split has a single class (" + std::to_string(pos) + " positive of " +
                    std::to_string(members->size()) +
                    "); grow the cohort or raise the prevalence");
        }
        task_index.push_back(std::move(ti));
    }
    return task_index;
}

// Union of train members across tasks: the encoder-fitting population.
std::vector<size_t> union_train(const std::vector<TaskIndex>& task_index) {
    std::vector<size_t> train_members;
    for (const TaskIndex& ti : task_index)
        train_members.insert(train_members.end(), ti.train.begin(), ti.train.end());
    std::sort(train_members.begin(), train_members.end());
    train_members.erase(std::unique(train_members.begin(), train_members.end()),
                        train_members.end());
    return train_members;
}

// Artifact requirements implied by one roster entry.
void mark_needs(Needs& needs, const ModelSpec& spec, DataSource source) {
    if (source != DataSource::structured) {
        needs.text = true;
        needs.counts |= spec.text_encoder == ModelSpec::TextEncoder::bow;
        needs.tfidf |= spec.text_encoder == ModelSpec::TextEncoder::tfidf;
        needs.binary |= spec.text_encoder == ModelSpec::TextEncoder::binary_bow;
        needs.lda |= spec.text_encoder == ModelSpec::TextEncoder::lda;
        needs.seqs |= spec.family == ModelSpec::Family::neural;
    }
    needs.structured |= source != DataSource::notes;
}

std::string hash_hex(uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::vector<ResultRow> run_unit(const SweepConfig& config, const Unit& u,
                                model::ModelBundle* capture = nullptr) {
    const ehr::Cohort& cohort = *config.cohort;
    const WindowArtifacts& art = *u.art;
    std::vector<ResultRow> rows;
    if (capture) {
        capture->seed = u.seed;
        if (u.source != DataSource::structured) capture->vocab_hash = hash_hex(art.vocab.content_hash());
    }

    if (u.spec.family == ModelSpec::Family::linear) {
        bool converged = false;
        std::vector<std::vector<double>> val_scores(u.unit_tasks.size());
        std::vector<std::vector<double>> test_scores(u.unit_tasks.size());

        if (u.mode == Mode::independent) {
            const TaskIndex& ti = *u.unit_tasks.front();
            TrainSelection sel = select_train(
                cohort, ti.train, config.hp.imbalance,
                mix_seed(u.seed, "rebalance/" + std::string(to_string(ti.type))));
            feat::FeatureMatrix x = gather_features(art, u.spec, u.source, sel.members);
            model::LinearModel fitted =
                model::train_lr(x, gather_labels(cohort, sel.members), u.spec.penalty,
                                config.hp.lambda, sel.weights);
            converged = fitted.converged;
            if (capture) {
                capture->kind = "linear";
                capture->linear = fitted;
            }
            val_scores[0] = model::predict(
                fitted, gather_features(art, u.spec, u.source, ti.validation));
            test_scores[0] =
                model::predict(fitted, gather_features(art, u.spec, u.source, ti.test));
        } else {
            std::vector<model::TaskData> tasks;
            for (const TaskIndex* ti : u.unit_tasks) {
                TrainSelection sel = select_train(
                    cohort, ti->train, config.hp.imbalance,
                    mix_seed(u.seed, "rebalance/" + std::string(to_string(ti->type))));
                model::TaskData td;
                td.name = std::string(to_string(ti->type));
                td.x = gather_features(art, u.spec, u.source, sel.members);
                td.y = gather_labels(cohort, sel.members);
                td.sample_weights = sel.weights;
                tasks.push_back(std::move(td));
            }
            model::MultitaskModel fitted = model::train_multitask(
                tasks, config.hp.mt_lambda_shared, config.hp.mt_lambda_task);
            converged = fitted.converged;
            if (capture) {
                capture->kind = "multitask_linear";
                capture->multitask = fitted;
            }
            for (size_t t = 0; t < u.unit_tasks.size(); ++t) {
                const TaskIndex& ti = *u.unit_tasks[t];
                val_scores[t] = model::predict_multitask(
                    fitted, t, gather_features(art, u.spec, u.source, ti.validation));
                test_scores[t] = model::predict_multitask(
                    fitted, t, gather_features(art, u.spec, u.source, ti.test));
            }
        }

        for (size_t t = 0; t < u.unit_tasks.size(); ++t) {
            const TaskIndex& ti = *u.unit_tasks[t];
            rows.push_back(make_row(
                u, ti.type,
                {ehr::Split::validation, val_scores[t], gather_labels(cohort, ti.validation)},
                converged, config.hp.bootstrap_b));
            rows.push_back(make_row(u, ti.type,
                                    {ehr::Split::test, test_scores[t],
                                     gather_labels(cohort, ti.test)},
                                    converged, config.hp.bootstrap_b));
        }
        return rows;
    }

    // Neural: one fit covers the unit's tasks; SGD has no convergence test, so
    // rows report converged = true.
    std::vector<model::NeuralTask> tasks;
    for (const TaskIndex* ti : u.unit_tasks) {
        TrainSelection sel =
            select_train(cohort, ti->train, config.hp.imbalance,
                         mix_seed(u.seed, "rebalance/" + std::string(to_string(ti->type))));
        model::NeuralTask task;
        task.name = std::string(to_string(ti->type));
        task.train.docs = gather_seqs(art, sel.members);
        task.train.y = gather_labels(cohort, sel.members);
        task.train.weights = sel.weights;
        task.val.docs = gather_seqs(art, ti->validation);
        task.val.y = gather_labels(cohort, ti->validation);
        tasks.push_back(std::move(task));
    }
    model::NeuralOptions opts;
    opts.dims = config.hp.dims;
    opts.agg = u.spec.agg;
    opts.lr = config.hp.neural_lr;
    opts.batch_size = config.hp.batch_size;
    opts.max_epochs = config.hp.max_epochs;
    opts.patience = config.hp.patience;
    opts.seed = u.seed;
    opts.pretrained = art.emb_seed ? &*art.emb_seed : nullptr;
    model::NeuralModel fitted = model::train_neural(tasks, art.vocab.size(), opts);
    if (capture) {
        capture->kind = "neural";
        capture->neural = fitted;
    }

    for (size_t t = 0; t < u.unit_tasks.size(); ++t) {
        const TaskIndex& ti = *u.unit_tasks[t];
        rows.push_back(make_row(u, ti.type,
                                {ehr::Split::validation,
                                 model::predict_neural(fitted, t, gather_seqs(art, ti.validation)),
                                 gather_labels(cohort, ti.validation)},
                                true, config.hp.bootstrap_b));
        rows.push_back(make_row(u, ti.type,
                                {ehr::Split::test,
                                 model::predict_neural(fitted, t, gather_seqs(art, ti.test)),
                                 gather_labels(cohort, ti.test)},
                                true, config.hp.bootstrap_b));
    }
    return rows;
}

}  // namespace

ResultsTable run_sweep(const SweepConfig& config) {
    if (!config.corpus || !config.cohort || !config.split)
        throw InvariantError("run_sweep: corpus, cohort, and split are required");
    if (config.windows.empty()) throw ConfigError("run_sweep: no windows configured");
    if (config.tasks.empty()) throw ConfigError("run_sweep: no tasks configured");
    if (config.modes.empty()) throw ConfigError("run_sweep: no modes configured");
    if (config.jobs < 1) throw ConfigError("run_sweep: jobs must be positive");
    for (size_t i = 0; i < config.windows.size(); ++i)
        for (size_t j = i + 1; j < config.windows.size(); ++j)
            if (config.windows[i] == config.windows[j])
                throw ConfigError("run_sweep: duplicate window " + config.windows[i].name());

    // Every roster id is parsed and source-checked before any training.
    Needs needs;
    std::vector<std::pair<DataSource, std::vector<ModelSpec>>> roster;
    for (const auto& [source, ids] : config.roster) {
        if (ids.empty()) continue;
        std::vector<ModelSpec> specs;
        for (const std::string& id : ids) {
            ModelSpec spec = parse_model_id(id);
            check_model_source(spec, source);
            for (const ModelSpec& seen : specs)
                if (seen.id == spec.id)
                    throw ConfigError("run_sweep: duplicate roster id '" + id + "'");
            mark_needs(needs, spec, source);
            specs.push_back(std::move(spec));
        }
        roster.emplace_back(source, std::move(specs));
    }
    if (roster.empty()) throw ConfigError("run_sweep: empty model roster");

    std::vector<TaskIndex> task_index = build_task_index(config, config.tasks);
    std::vector<size_t> train_members = union_train(task_index);

    std::vector<WindowArtifacts> artifacts;
    artifacts.reserve(config.windows.size());
    for (const ObservationWindow& window : config.windows) {
        auto started = std::chrono::steady_clock::now();
        artifacts.push_back(build_artifacts(config, window, needs, train_members));
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - started)
                      .count();
        log::info("sweep_artifacts", {{"window", window.name()},
                                      {"ms", std::to_string(ms)}});
    }

    std::vector<Unit> units;
    for (const auto& [source, specs] : roster) {
        for (Mode mode : config.modes) {
            for (const ModelSpec& spec : specs) {
                for (size_t w = 0; w < config.windows.size(); ++w) {
                    Unit u;
                    u.source = source;
                    u.mode = mode;
                    u.spec = spec;
                    u.window = config.windows[w];
                    u.art = &artifacts[w];
                    if (mode == Mode::independent) {
                        for (const TaskIndex& ti : task_index) {
                            Unit per_task = u;
                            per_task.unit_tasks = {&ti};
                            per_task.seed = mix_seed(config.seed, unit_key(per_task));
                            units.push_back(std::move(per_task));
                        }
                    } else {
                        for (const TaskIndex& ti : task_index) u.unit_tasks.push_back(&ti);
                        u.seed = mix_seed(config.seed, unit_key(u));
                        units.push_back(std::move(u));
                    }
                }
            }
        }
    }

    log::info("run_sweep", {{"units", std::to_string(units.size())},
                            {"jobs", std::to_string(config.jobs)}});

    // Bounded pool; each unit writes its own slot, so scheduling order never
    // reaches the output.
    std::vector<std::vector<ResultRow>> unit_rows(units.size());
    std::atomic<size_t> cursor{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    auto worker = [&]() {
        while (true) {
            size_t i = cursor.fetch_add(1);
            if (i >= units.size()) return;
            {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (first_error) return;
            }
            try {
                auto started = std::chrono::steady_clock::now();
                unit_rows[i] = run_unit(config, units[i]);
                auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                              std::chrono::steady_clock::now() - started)
                              .count();
                log::debug("sweep_cell", {{"key", unit_key(units[i])},
                                          {"ms", std::to_string(ms)}});
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    size_t n_threads = std::min<size_t>(static_cast<size_t>(config.jobs), units.size());
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    ResultsTable results;
    for (std::vector<ResultRow>& rows : unit_rows)
        for (ResultRow& row : rows) results.rows.push_back(std::move(row));
    return results;
}

TrainedCell train_cell(const SweepConfig& config, DataSource source, Mode mode,
                       const std::string& model_id, ObservationWindow window,
                       std::optional<SurgeryType> task) {
    if (!config.corpus || !config.cohort || !config.split)
        throw InvariantError("train_cell: corpus, cohort, and split are required");
    ModelSpec spec = parse_model_id(model_id);
    check_model_source(spec, source);

    std::vector<SurgeryType> types;
    if (mode == Mode::independent) {
        if (!task) throw ConfigError("train_cell: independent mode needs a task");
        types = {*task};
    } else {
        types = config.tasks;
        if (types.empty()) throw ConfigError("train_cell: no tasks configured");
    }
    std::vector<TaskIndex> task_index = build_task_index(config, types);

    Needs needs;
    mark_needs(needs, spec, source);
    // Encoders are fitted on the same population as run_sweep (the union over
    // config.tasks), so a cell trained here matches its sweep twin bit-for-bit.
    std::vector<TaskIndex> fit_index = build_task_index(config, config.tasks);
    WindowArtifacts art = build_artifacts(config, window, needs, union_train(fit_index));

    Unit u;
    u.source = source;
    u.mode = mode;
    u.spec = std::move(spec);
    u.window = window;
    u.art = &art;
    for (const TaskIndex& ti : task_index) u.unit_tasks.push_back(&ti);
    u.seed = mix_seed(config.seed, unit_key(u));

    TrainedCell cell;
    cell.rows = run_unit(config, u, &cell.bundle);
    return cell;
}

}  // namespace wb::eval
