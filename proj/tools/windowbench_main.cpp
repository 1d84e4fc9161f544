// windowbench: observation-window benchmarking for readmission models.
// Subcommands cover the pipeline end to end: synth -> cohort -> featurize ->
// train/sweep -> report. Status goes to stderr as key=value records; data
// products go to files and stdout only.
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "windowbench/cli/runconfig.hpp"
#include "windowbench/config.hpp"
#include "windowbench/ehr/cohort.hpp"
#include "windowbench/ehr/corpus.hpp"
#include "windowbench/error.hpp"
#include "windowbench/eval/auroc.hpp"
#include "windowbench/eval/results.hpp"
#include "windowbench/eval/sweep.hpp"
#include "windowbench/feat/bow.hpp"
#include "windowbench/feat/icd.hpp"
#include "windowbench/feat/structured.hpp"
#include "windowbench/log.hpp"
#include "windowbench/model/serialize.hpp"
#include "windowbench/rng.hpp"
#include "windowbench/synth/generate.hpp"
#include "windowbench/text/document.hpp"
#include "windowbench/text/porter.hpp"
#include "windowbench/text/vocab.hpp"

namespace fs = std::filesystem;
using namespace wb;

namespace {

constexpr const char* kToolVersion = "0.1.0";

struct CommonArgs {
    std::string config_path;
    std::optional<uint64_t> seed;
    std::string out_override;
    bool overwrite = false;
};

cli::RunConfig load_rc(const CommonArgs& args) {
    if (args.config_path.empty()) throw ConfigError("missing --config PATH");
    return cli::load_run_config(args.config_path);
}

uint64_t resolve_seed(const cli::RunConfig& rc, const CommonArgs& args) {
    if (args.seed) return *args.seed;
    if (rc.has_seed) return rc.seed;
    throw ConfigError("seed is mandatory: set `seed` in the config or pass --seed");
}

std::string config_hash_hex(const std::string& config_path) {
    if (config_path.empty()) return "none";
    std::ifstream in(config_path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file " + config_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx",
                  static_cast<unsigned long long>(fnv1a(buf.str())));
    return hex;
}

// Reproducibility record; deliberately free of timestamps and worker counts
// so identical (config, seed) runs write identical bytes.
void write_manifest(const fs::path& dir, const std::string& command,
                    const std::string& config_path, uint64_t seed) {
    nlohmann::ordered_json m;
    m["tool"] = "windowbench";
    m["version"] = kToolVersion;
    m["command"] = command;
    m["config_hash"] = config_hash_hex(config_path);
    m["seed"] = seed;
    fs::create_directories(dir);
    std::ofstream out(dir / "manifest.json", std::ios::binary);
    if (!out) throw ConfigError("cannot write " + (dir / "manifest.json").string());
    out << m.dump(2) << "\n";
}

void refuse_existing(const fs::path& marker, bool overwrite) {
    if (!overwrite && fs::exists(marker))
        throw ConfigError(marker.string() + " already exists; pass --overwrite to replace it");
}

struct Pipeline {
    ehr::Corpus corpus;
    ehr::Cohort cohort;
    ehr::SplitAssignment split;
};

Pipeline build_pipeline(const cli::RunConfig& rc, uint64_t seed) {
    Pipeline p;
    p.corpus = ehr::load_corpus(rc.corpus_dir, rc.criteria.variable_blacklist);
    for (const std::string& warning : p.corpus.warnings)
        log::info("load_corpus", {{"warning", warning}});
    std::vector<ehr::SurgeryEvent> surgeries =
        ehr::identify_surgeries(p.corpus, ehr::CptSets::defaults());
    p.cohort = ehr::build_cohort(p.corpus, surgeries, rc.criteria);
    if (p.cohort.members.empty())
        throw ConfigError("cohort is empty after exclusions; check corpus and criteria");
    p.split = ehr::split_cohort(p.cohort, {}, seed, rc.stratify_split);
    log::info("pipeline", {{"patients", std::to_string(p.corpus.patients.size())},
                           {"surgeries", std::to_string(surgeries.size())},
                           {"cohort", std::to_string(p.cohort.members.size())}});
    return p;
}

bool roster_touches_structured(const cli::RunConfig& rc) {
    for (const auto& [source, ids] : rc.roster)
        if (source != eval::DataSource::notes && !ids.empty()) return true;
    return false;
}

std::optional<feat::GemTable> load_gem_if(const cli::RunConfig& rc, bool required) {
    fs::path path = rc.effective_gem_table();
    if (!fs::exists(path)) {
        if (required) throw ConfigError("GEM table not found at " + path.string());
        return std::nullopt;
    }
    return feat::load_gem_csv(path);
}

eval::SweepConfig make_sweep_config(const cli::RunConfig& rc, const Pipeline& p,
                                    const std::optional<feat::GemTable>& gem, uint64_t seed,
                                    int jobs) {
    eval::SweepConfig sc;
    sc.corpus = &p.corpus;
    sc.cohort = &p.cohort;
    sc.split = &p.split;
    sc.gem = gem ? &*gem : nullptr;
    sc.windows = rc.windows;
    sc.tasks = rc.tasks;
    sc.modes = rc.modes;
    sc.roster = rc.roster;
    sc.embedding_file = rc.embedding_file.string();
    sc.hp = rc.hp;
    sc.seed = seed;
    sc.jobs = jobs;
    return sc;
}

int resolve_jobs(int flag_jobs, const cli::RunConfig& rc) {
    if (flag_jobs > 0) return flag_jobs;
    if (rc.jobs > 0) return rc.jobs;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void emit_day_vs_history(const eval::ResultsTable& results, const fs::path& out_dir) {
    try {
        eval::DayVsHistoryTable table = eval::compare_day_vs_history(results);
        eval::write_day_vs_history_csv(table, out_dir / "day_vs_history.csv");
        std::cout << table.render();
    } catch (const ConfigError& e) {
        log::info("report", {{"day_vs_history", "skipped"}, {"reason", e.what()}});
    }
}

// ---------------------------------------------------------------------------

int cmd_synth(const CommonArgs& args) {
    cli::RunConfig rc = load_rc(args);
    uint64_t seed = resolve_seed(rc, args);
    fs::path target = args.out_override.empty() ? rc.corpus_dir : fs::path(args.out_override);
    synth::SynthConfig sg = rc.synth;
    sg.seed = seed;
    synth::generate(sg, target, args.overwrite);
    write_manifest(target, "synth", args.config_path, seed);
    std::cout << "corpus: " << target.string() << "\n";
    return 0;
}

int cmd_cohort(const CommonArgs& args) {
    cli::RunConfig rc = load_rc(args);
    uint64_t seed = resolve_seed(rc, args);
    Pipeline p = build_pipeline(rc, seed);

    std::cout << ehr::render_funnel(p.cohort.tally) << "\n";
    std::cout << ehr::demographic_summary(p.corpus, p.cohort, p.split).render();

    if (!args.out_override.empty()) {
        fs::path dir(args.out_override);
        refuse_existing(dir / "cohort.csv", args.overwrite);
        fs::create_directories(dir);
        std::ofstream out(dir / "cohort.csv", std::ios::binary);
        if (!out) throw ConfigError("cannot write " + (dir / "cohort.csv").string());
        out << "event_id,patient_id,task,surgery_date,label,split\n";
        for (const ehr::CohortMember& member : p.cohort.members) {
            out << member.surgery.event_id() << ',' << member.surgery.patient_id << ','
                << to_string(member.surgery.surgery_type) << ','
                << format_date(member.surgery.surgery_date) << ','
                << (member.label.positive ? 1 : 0) << ','
                << to_string(p.split.of(member.surgery.patient_id)) << "\n";
        }
        write_manifest(dir, "cohort", args.config_path, seed);
    }
    return 0;
}

void write_sparse_rows(const fs::path& path, const ehr::Cohort& cohort,
                       const ehr::SplitAssignment& split,
                       const std::vector<feat::SparseVector>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    for (size_t i = 0; i < rows.size(); ++i) {
        const ehr::CohortMember& member = cohort.members[i];
        out << member.surgery.event_id() << '\t'
            << to_string(split.of(member.surgery.patient_id)) << '\t'
            << (member.label.positive ? 1 : 0);
        for (const auto& [index, value] : rows[i].entries) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.17g", value);
            out << '\t' << index << ':' << buf;
        }
        out << "\n";
    }
}

int cmd_featurize(const CommonArgs& args) {
    cli::RunConfig rc = load_rc(args);
    uint64_t seed = resolve_seed(rc, args);
    Pipeline p = build_pipeline(rc, seed);
    std::optional<feat::GemTable> gem = load_gem_if(rc, /*required=*/false);

    fs::path root = args.out_override.empty() ? rc.out_dir / "features"
                                              : fs::path(args.out_override);
    refuse_existing(root / "manifest.json", args.overwrite);

    auto in_task = [&](ehr::SurgeryType type) {
        for (ehr::SurgeryType t : rc.tasks)
            if (t == type) return true;
        return false;
    };

    for (const ehr::ObservationWindow& window : rc.windows) {
        fs::path dir = root / window.name();
        fs::create_directories(dir);

        std::vector<text::Document> docs;
        std::vector<std::vector<ehr::Encounter>> encounters;
        docs.reserve(p.cohort.members.size());
        encounters.reserve(p.cohort.members.size());
        std::vector<text::Document> train_docs;
        for (const ehr::CohortMember& member : p.cohort.members) {
            ehr::WindowedRecord slice = ehr::slice_window(p.corpus, member.surgery, window);
            std::vector<text::TokenizedNote> notes;
            notes.reserve(slice.notes.size());
            for (const ehr::ClinicalNote& note : slice.notes)
                notes.push_back(text::tokenize_note(note.note_id, note.text));
            docs.push_back(text::concat_notes(member.surgery.event_id(), notes));
            encounters.push_back(std::move(slice.encounters));
            if (in_task(member.surgery.surgery_type) &&
                p.split.of(member.surgery.patient_id) == ehr::Split::train)
                train_docs.push_back(docs.back());
        }

        text::Vocabulary vocab =
            text::build_vocab(train_docs, rc.hp.min_df, rc.hp.vocab_max, "train");
        text::dump_vocab_tsv(vocab, dir / "vocab.tsv");
        std::vector<feat::SparseVector> counts;
        counts.reserve(docs.size());
        for (const text::Document& doc : docs) counts.push_back(feat::encode_count_bow(doc, vocab));
        write_sparse_rows(dir / "bow.tsv", p.cohort, p.split, counts);

        if (gem) {
            std::vector<ehr::Encounter> train_encounters;
            for (size_t i = 0; i < p.cohort.members.size(); ++i) {
                const ehr::CohortMember& member = p.cohort.members[i];
                if (in_task(member.surgery.surgery_type) &&
                    p.split.of(member.surgery.patient_id) == ehr::Split::train)
                    train_encounters.insert(train_encounters.end(), encounters[i].begin(),
                                            encounters[i].end());
            }
            feat::FeatureDictionary dict = feat::build_feature_dictionary(train_encounters, *gem);
            feat::NumericStats stats = feat::fit_numeric_stats(train_encounters, dict);
            feat::dump_dictionary_tsv(dict, dir / "dict.tsv");
            std::vector<feat::SparseVector> structured;
            structured.reserve(p.cohort.members.size());
            for (const auto& encs : encounters) {
                std::vector<feat::SparseVector> encoded;
                encoded.reserve(encs.size());
                for (const ehr::Encounter& enc : encs)
                    encoded.push_back(feat::encode_encounter(enc, dict, stats, *gem));
                structured.push_back(feat::aggregate_encounters(encoded, dict));
            }
            write_sparse_rows(dir / "structured.tsv", p.cohort, p.split, structured);
        }
        log::info("featurize", {{"window", window.name()},
                                {"vocab", std::to_string(vocab.size())},
                                {"structured", gem ? "yes" : "no"}});
    }
    write_manifest(root, "featurize", args.config_path, seed);
    std::cout << "features: " << root.string() << "\n";
    return 0;
}

int cmd_train(const CommonArgs& args, const std::string& model_id, const std::string& window_name,
              const std::string& source_name, const std::string& mode_name,
              const std::string& task_name) {
    cli::RunConfig rc = load_rc(args);
    uint64_t seed = resolve_seed(rc, args);
    eval::DataSource source = eval::parse_data_source(source_name);
    eval::Mode mode = eval::parse_mode(mode_name);
    ehr::ObservationWindow window = ehr::ObservationWindow::parse(window_name);
    std::optional<ehr::SurgeryType> task;
    if (!task_name.empty()) {
        if (task_name == "hip")
            task = ehr::SurgeryType::hip;
        else if (task_name == "knee")
            task = ehr::SurgeryType::knee;
        else
            throw ConfigError("unknown task '" + task_name + "' (expected hip or knee)");
    }

    Pipeline p = build_pipeline(rc, seed);
    std::optional<feat::GemTable> gem =
        load_gem_if(rc, /*required=*/source != eval::DataSource::notes);
    eval::SweepConfig sc = make_sweep_config(rc, p, gem, seed, /*jobs=*/1);

    eval::TrainedCell cell = eval::train_cell(sc, source, mode, model_id, window, task);

    fs::path dir = args.out_override.empty() ? rc.out_dir / "train" : fs::path(args.out_override);
    refuse_existing(dir / "model.json", args.overwrite);
    fs::create_directories(dir);
    model::save_model((dir / "model.json").string(), cell.bundle);
    eval::ResultsTable table;
    table.rows = cell.rows;
    eval::write_results_csv(table, dir / "results.csv");
    write_manifest(dir, "train", args.config_path, seed);

    for (const eval::ResultRow& row : cell.rows) {
        std::cout << "task=" << to_string(row.task) << " split=" << to_string(row.split);
        if (row.converged) {
            char buf[96];
            std::snprintf(buf, sizeof buf, " auroc=%.6f ci=[%.6f,%.6f]", row.auroc, row.ci_lo,
                          row.ci_hi);
            std::cout << buf;
        } else {
            std::cout << " auroc=-- (not converged)";
        }
        std::cout << " n_pos=" << row.n_pos << " n_neg=" << row.n_neg << "\n";
    }
    std::cout << "model: " << (dir / "model.json").string() << "\n";
    return 0;
}

int cmd_sweep(const CommonArgs& args, int flag_jobs) {
    cli::RunConfig rc = load_rc(args);
    uint64_t seed = resolve_seed(rc, args);
    if (rc.roster.empty())
        throw ConfigError("no models configured: fill roster.notes / roster.structured / "
                          "roster.both");
    fs::path out_dir = args.out_override.empty() ? rc.out_dir : fs::path(args.out_override);
    refuse_existing(out_dir / "results.csv", args.overwrite);

    Pipeline p = build_pipeline(rc, seed);
    std::optional<feat::GemTable> gem =
        load_gem_if(rc, /*required=*/roster_touches_structured(rc));
    int jobs = resolve_jobs(flag_jobs, rc);
    eval::SweepConfig sc = make_sweep_config(rc, p, gem, seed, jobs);

    eval::ResultsTable results = eval::run_sweep(sc);
    eval::emit_report(results, out_dir);
    emit_day_vs_history(results, out_dir);
    write_manifest(out_dir, "sweep", args.config_path, seed);
    std::cout << "rows: " << results.rows.size() << "\n";
    std::cout << "report: " << out_dir.string() << "\n";
    return 0;
}

int cmd_report(const CommonArgs& args, const std::string& results_flag) {
    fs::path results_path;
    fs::path out_dir;
    uint64_t seed = 0;
    if (!results_flag.empty()) {
        results_path = results_flag;
        out_dir = args.out_override.empty() ? results_path.parent_path()
                                            : fs::path(args.out_override);
    } else {
        cli::RunConfig rc = load_rc(args);
        if (args.seed) seed = *args.seed;
        else if (rc.has_seed) seed = rc.seed;
        results_path = rc.out_dir / "results.csv";
        out_dir = args.out_override.empty() ? rc.out_dir : fs::path(args.out_override);
    }
    eval::ResultsTable results = eval::parse_results_csv(results_path);
    eval::emit_report(results, out_dir);
    emit_day_vs_history(results, out_dir);
    write_manifest(out_dir, "report", args.config_path, seed);
    std::cout << "report: " << out_dir.string() << "\n";
    return 0;
}

// Curated end-to-end sanity checks with embedded expectations; fast enough to
// run anywhere, no inputs needed.
int cmd_selftest() {
    int checks = 0;
    auto ok = [&checks](const std::string& name) {
        ++checks;
        std::cout << "ok " << name << "\n";
    };
    auto expect = [](bool cond, const std::string& what) {
        if (!cond) throw InvariantError("selftest: " + what);
    };

    {
        const std::pair<const char*, const char*> pairs[] = {
            {"caresses", "caress"}, {"ponies", "poni"},     {"ties", "ti"},
            {"cats", "cat"},        {"feed", "feed"},       {"agreed", "agre"},
            {"plastered", "plaster"}, {"motoring", "motor"}, {"sing", "sing"},
            {"conflated", "conflat"}, {"troubled", "troubl"}, {"sized", "size"},
            {"hopping", "hop"},     {"tanned", "tan"},      {"falling", "fall"},
            {"hissing", "hiss"},    {"fizzed", "fizz"},     {"failing", "fail"},
            {"filing", "file"},     {"relational", "relat"},
        };
        for (const auto& [word, want] : pairs)
            expect(text::porter_stem(word) == want,
                   std::string("stem(") + word + ") != " + want);
        ok("porter_stem on curated vectors");
    }
    {
        text::Document d1{"d1", {"alpha", "beta"}};
        text::Document d2{"d2", {"alpha"}};
        std::vector<text::Document> docs = {d1, d2};
        text::Vocabulary vocab = text::build_vocab(docs, 1, 100, "train");
        expect(vocab.size() == 2, "vocab size");
        std::vector<feat::SparseVector> rows = {feat::encode_count_bow(d1, vocab),
                                                feat::encode_count_bow(d2, vocab)};
        feat::IdfTable idf = feat::fit_idf(rows, vocab.size());
        feat::SparseVector raw = feat::encode_tfidf(rows[0], idf, feat::Norm::none);
        feat::SparseVector l2 = feat::encode_tfidf(rows[0], idf, feat::Norm::l2);
        auto value_of = [&vocab](const feat::SparseVector& v, std::string_view token) {
            int32_t want = vocab.index_of(token);
            for (const auto& [index, value] : v.entries)
                if (index == want) return value;
            return 0.0;
        };
        expect(std::abs(value_of(raw, "alpha") - 1.0) < 1e-5, "tfidf raw alpha");
        expect(std::abs(value_of(raw, "beta") - 1.405465) < 1e-5, "tfidf raw beta");
        expect(std::abs(value_of(l2, "alpha") - 0.579739) < 1e-5, "tfidf l2 alpha");
        expect(std::abs(value_of(l2, "beta") - 0.814802) < 1e-5, "tfidf l2 beta");
        ok("tf-idf two-document fixture");
    }
    {
        std::vector<double> scores = {0.9, 0.8, 0.7, 0.6};
        std::vector<int> labels = {1, 0, 1, 0};
        double a = eval::auroc(scores, labels);
        expect(std::abs(a - 0.75) < 1e-12, "auroc hand value");
        ok("auroc hand oracle");
    }
    {
        for (const char* name : {"history", "0", "3", "6", "12", "24", "36"}) {
            ehr::ObservationWindow w = ehr::ObservationWindow::parse(name);
            expect(w.name() == name, std::string("window round-trip ") + name);
        }
        ok("window serialization round-trip");
    }
    {
        double q = eval::quantize9(0.123456789123456);
        expect(std::abs(q - 0.123456789) < 1e-15, "quantize9");
        ok("auroc quantization");
    }
    {
        synth::SynthConfig sg;
        sg.n_patients = 60;
        sg.seed = 3;
        synth::SynthCorpus a = synth::generate_corpus(sg);
        synth::SynthCorpus b = synth::generate_corpus(sg);
        expect(a.corpus.patients.size() == b.corpus.patients.size() &&
                   a.corpus.notes.size() == b.corpus.notes.size() &&
                   a.corpus.encounters.size() == b.corpus.encounters.size(),
               "synthetic generation determinism");
        std::vector<ehr::SurgeryEvent> surgeries =
            ehr::identify_surgeries(a.corpus, ehr::CptSets::defaults());
        ehr::Cohort cohort =
            ehr::build_cohort(a.corpus, surgeries, ehr::CohortCriteria::defaults());
        expect(!cohort.members.empty(), "non-empty synthetic cohort");
        ehr::SplitAssignment split = ehr::split_cohort(cohort, {}, 7);
        int64_t n[3] = {0, 0, 0};
        for (const std::string& pid : cohort.patient_ids())
            ++n[static_cast<int>(split.of(pid))];
        expect(n[0] + n[1] + n[2] == static_cast<int64_t>(cohort.patient_ids().size()),
               "split partition");
        ok("synth -> cohort -> split pipeline");
    }
    std::cout << "selftest: all " << checks << " checks passed\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"windowbench: observation-window benchmarking for readmission models"};
    app.require_subcommand(1);

    CommonArgs args;
    int64_t seed_raw = 0;
    auto add_common = [&](CLI::App* sub, bool with_out = true) {
        sub->add_option("--config", args.config_path, "run configuration file (TOML subset)");
        sub->add_option("--seed", seed_raw, "global seed (overrides the config)")
            ->check(CLI::NonNegativeNumber);
        if (with_out) sub->add_option("--out", args.out_override, "output directory override");
        sub->add_flag("--overwrite", args.overwrite, "replace existing outputs");
    };

    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic corpus");
    add_common(synth);
    CLI::App* cohort =
        app.add_subcommand("cohort", "build, label, and split the cohort; print summaries");
    add_common(cohort);
    CLI::App* featurize =
        app.add_subcommand("featurize", "persist per-window feature matrices");
    add_common(featurize);

    CLI::App* train = app.add_subcommand("train", "fit one model cell and save it");
    add_common(train);
    std::string model_id, window_name, source_name = "notes", mode_name = "independent",
                           task_name;
    train->add_option("--model", model_id, "model id, e.g. LR+TFIDF+norm=l2")->required();
    train->add_option("--window", window_name, "observation window (history, 0, 3, ...)")
        ->required();
    train->add_option("--source", source_name, "notes | structured | both");
    train->add_option("--mode", mode_name, "independent | multitask");
    train->add_option("--task", task_name, "hip | knee (independent mode)");

    CLI::App* sweep = app.add_subcommand("sweep", "run the full grid and emit the report");
    add_common(sweep);
    int flag_jobs = 0;
    sweep->add_option("--jobs", flag_jobs, "worker threads (default: logical cores)")
        ->check(CLI::NonNegativeNumber);

    CLI::App* report = app.add_subcommand("report", "rebuild report files from results.csv");
    add_common(report);
    std::string results_flag;
    report->add_option("--results", results_flag, "path to an existing results.csv");

    CLI::App* selftest = app.add_subcommand("selftest", "run embedded sanity checks");
    (void)selftest;

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    for (const CLI::App* sub : {synth, cohort, featurize, train, sweep, report})
        if (sub->parsed() && sub->count("--seed") > 0)
            args.seed = static_cast<uint64_t>(seed_raw);

    try {
        if (synth->parsed()) return cmd_synth(args);
        if (cohort->parsed()) return cmd_cohort(args);
        if (featurize->parsed()) return cmd_featurize(args);
        if (train->parsed())
            return cmd_train(args, model_id, window_name, source_name, mode_name, task_name);
        if (sweep->parsed()) return cmd_sweep(args, flag_jobs);
        if (report->parsed()) return cmd_report(args, results_flag);
        if (selftest->parsed()) return cmd_selftest();
        std::cerr << "error: no subcommand\n";
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const InvariantError& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
}
