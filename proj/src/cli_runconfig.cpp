#include "windowbench/cli/runconfig.hpp"

#include <string_view>

#include "windowbench/error.hpp"

namespace wb::cli {

namespace {

ehr::SurgeryType parse_task(const std::string& name) {
    if (name == "hip") return ehr::SurgeryType::hip;
    if (name == "knee") return ehr::SurgeryType::knee;
    throw ConfigError("unknown task '" + name + "' (expected hip or knee)");
}

std::vector<ehr::ObservationWindow> default_windows() {
    using ehr::ObservationWindow;
    return {ObservationWindow::history_only(), ObservationWindow::day_of_surgery(),
            ObservationWindow::months(3),      ObservationWindow::months(6),
            ObservationWindow::months(12),     ObservationWindow::months(24),
            ObservationWindow::months(36)};
}

int checked_int(const cfg::ConfigFile& cf, const std::string& key, int64_t fallback,
                int64_t lo, int64_t hi) {
    int64_t v = cf.get_int(key, fallback);
    if (v < lo || v > hi)
        throw ConfigError(cf.origin + ": key '" + key + "' = " + std::to_string(v) +
                          " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return static_cast<int>(v);
}

}  // namespace

std::filesystem::path RunConfig::effective_gem_table() const {
    return gem_table.empty() ? corpus_dir / "gem.csv" : gem_table;
}

RunConfig read_run_config(const cfg::ConfigFile& cf) {
    static const std::vector<std::string> known = {
        "seed",
        "paths.corpus_dir", "paths.out_dir", "paths.gem_table", "paths.embedding_file",
        "cohort.min_age", "cohort.max_age", "cohort.exclude_deceased", "cohort.require_notes",
        "cohort.variable_blacklist", "cohort.stratify_split",
        "synth.n_patients", "synth.prevalence_hip", "synth.prevalence_knee",
        "synth.hip_fraction", "synth.note_rate", "synth.encounter_rate",
        "synth.text_signal_start_days", "synth.text_signal_end_days",
        "synth.structured_signal_start_days", "synth.structured_signal_end_days",
        "synth.signal_strength", "synth.signal_leak_rate", "synth.background_vocab",
        "synth.signal_tokens", "synth.signal_codes", "synth.signal_events_mean",
        "synth.exclusion_deceased", "synth.exclusion_over_90", "synth.exclusion_no_notes",
        "synth.history_years", "synth.note_tokens_mean",
        "sweep.windows", "sweep.tasks", "sweep.modes", "sweep.jobs",
        "roster.notes", "roster.structured", "roster.both",
        "imbalance.strategy",
        "hyperparams.lambda", "hyperparams.mt_lambda_shared", "hyperparams.mt_lambda_task",
        "hyperparams.lda_topics", "hyperparams.lda_alpha", "hyperparams.lda_beta",
        "hyperparams.lda_iters", "hyperparams.lda_burn_in", "hyperparams.lda_sample_every",
        "hyperparams.lda_infer_iters",
        "hyperparams.embed_dim", "hyperparams.hidden_dim", "hyperparams.attn_dim",
        "hyperparams.neural_lr", "hyperparams.batch_size", "hyperparams.max_epochs",
        "hyperparams.patience",
        "hyperparams.min_df", "hyperparams.vocab_max", "hyperparams.bootstrap_b",
    };
    cf.reject_unknown(known);

    RunConfig rc;

    if (cf.has("seed")) {
        int64_t seed = cf.get_int("seed", 0);
        if (seed < 0) throw ConfigError(cf.origin + ": seed must be non-negative");
        rc.seed = static_cast<uint64_t>(seed);
        rc.has_seed = true;
    }

    rc.corpus_dir = cf.get_string("paths.corpus_dir", rc.corpus_dir.string());
    rc.out_dir = cf.get_string("paths.out_dir", rc.out_dir.string());
    rc.gem_table = cf.get_string("paths.gem_table", "");
    rc.embedding_file = cf.get_string("paths.embedding_file", "");

    rc.criteria.min_age = checked_int(cf, "cohort.min_age", rc.criteria.min_age, 0, 150);
    rc.criteria.max_age = checked_int(cf, "cohort.max_age", rc.criteria.max_age, 0, 150);
    if (rc.criteria.min_age > rc.criteria.max_age)
        throw ConfigError(cf.origin + ": cohort.min_age exceeds cohort.max_age");
    rc.criteria.exclude_deceased =
        cf.get_bool("cohort.exclude_deceased", rc.criteria.exclude_deceased);
    rc.criteria.require_notes = cf.get_bool("cohort.require_notes", rc.criteria.require_notes);
    rc.criteria.variable_blacklist =
        cf.get_string_array("cohort.variable_blacklist", rc.criteria.variable_blacklist);
    rc.stratify_split = cf.get_bool("cohort.stratify_split", rc.stratify_split);

    synth::SynthConfig& sg = rc.synth;
    sg.n_patients = cf.get_int("synth.n_patients", sg.n_patients);
    sg.prevalence_hip = cf.get_double("synth.prevalence_hip", sg.prevalence_hip);
    sg.prevalence_knee = cf.get_double("synth.prevalence_knee", sg.prevalence_knee);
    sg.hip_fraction = cf.get_double("synth.hip_fraction", sg.hip_fraction);
    sg.note_rate = cf.get_double("synth.note_rate", sg.note_rate);
    sg.encounter_rate = cf.get_double("synth.encounter_rate", sg.encounter_rate);
    sg.text_signal_band.start_days = checked_int(cf, "synth.text_signal_start_days",
                                                 sg.text_signal_band.start_days, 0, 100000);
    sg.text_signal_band.end_days =
        checked_int(cf, "synth.text_signal_end_days", sg.text_signal_band.end_days, 0, 100000);
    sg.structured_signal_band.start_days =
        checked_int(cf, "synth.structured_signal_start_days",
                    sg.structured_signal_band.start_days, 0, 100000);
    sg.structured_signal_band.end_days = checked_int(
        cf, "synth.structured_signal_end_days", sg.structured_signal_band.end_days, 0, 100000);
    sg.signal_strength = cf.get_double("synth.signal_strength", sg.signal_strength);
    sg.signal_leak_rate = cf.get_double("synth.signal_leak_rate", sg.signal_leak_rate);
    sg.background_vocab = cf.get_int("synth.background_vocab", sg.background_vocab);
    sg.signal_tokens = cf.get_string_array("synth.signal_tokens", sg.signal_tokens);
    sg.signal_codes = cf.get_string_array("synth.signal_codes", sg.signal_codes);
    sg.signal_events_mean = cf.get_double("synth.signal_events_mean", sg.signal_events_mean);
    sg.exclusion_deceased = cf.get_double("synth.exclusion_deceased", sg.exclusion_deceased);
    sg.exclusion_over_90 = cf.get_double("synth.exclusion_over_90", sg.exclusion_over_90);
    sg.exclusion_no_notes = cf.get_double("synth.exclusion_no_notes", sg.exclusion_no_notes);
    sg.history_years = checked_int(cf, "synth.history_years", sg.history_years, 1, 100);
    sg.note_tokens_mean = checked_int(cf, "synth.note_tokens_mean", sg.note_tokens_mean, 1,
                                      100000);

    if (cf.has("sweep.windows")) {
        rc.windows.clear();
        for (const std::string& name : cf.get_string_array("sweep.windows", {}))
            rc.windows.push_back(ehr::ObservationWindow::parse(name));
        if (rc.windows.empty())
            throw ConfigError(cf.origin + ": sweep.windows must not be empty");
    } else {
        rc.windows = default_windows();
    }

    if (cf.has("sweep.tasks")) {
        rc.tasks.clear();
        for (const std::string& name : cf.get_string_array("sweep.tasks", {}))
            rc.tasks.push_back(parse_task(name));
    }
    if (cf.has("sweep.modes")) {
        rc.modes.clear();
        for (const std::string& name : cf.get_string_array("sweep.modes", {}))
            rc.modes.push_back(eval::parse_mode(name));
    }
    rc.jobs = checked_int(cf, "sweep.jobs", 0, 0, 4096);

    for (auto [source, key] :
         {std::pair{eval::DataSource::notes, "roster.notes"},
          std::pair{eval::DataSource::structured, "roster.structured"},
          std::pair{eval::DataSource::both, "roster.both"}}) {
        std::vector<std::string> ids = cf.get_string_array(key, {});
        if (!ids.empty()) rc.roster.emplace_back(source, std::move(ids));
    }
    // Every roster id must resolve, even if this run never sweeps.
    for (const auto& [source, ids] : rc.roster)
        for (const std::string& id : ids) eval::check_model_source(eval::parse_model_id(id), source);

    eval::Hyperparams& hp = rc.hp;
    hp.lambda = cf.get_double("hyperparams.lambda", hp.lambda);
    hp.mt_lambda_shared = cf.get_double("hyperparams.mt_lambda_shared", hp.mt_lambda_shared);
    hp.mt_lambda_task = cf.get_double("hyperparams.mt_lambda_task", hp.mt_lambda_task);
    hp.lda_topics = checked_int(cf, "hyperparams.lda_topics", hp.lda_topics, 1, 10000);
    hp.lda_alpha = cf.get_double("hyperparams.lda_alpha", hp.lda_alpha);
    hp.lda_beta = cf.get_double("hyperparams.lda_beta", hp.lda_beta);
    hp.lda_iters = checked_int(cf, "hyperparams.lda_iters", hp.lda_iters, 1, 1000000);
    hp.lda_burn_in = checked_int(cf, "hyperparams.lda_burn_in", hp.lda_burn_in, 0, 1000000);
    hp.lda_sample_every =
        checked_int(cf, "hyperparams.lda_sample_every", hp.lda_sample_every, 1, 1000000);
    hp.lda_infer_iters =
        checked_int(cf, "hyperparams.lda_infer_iters", hp.lda_infer_iters, 1, 1000000);
    hp.dims.emb = checked_int(cf, "hyperparams.embed_dim", hp.dims.emb, 1, 100000);
    hp.dims.hidden = checked_int(cf, "hyperparams.hidden_dim", hp.dims.hidden, 1, 100000);
    hp.dims.attn = checked_int(cf, "hyperparams.attn_dim", hp.dims.attn, 1, 100000);
    hp.neural_lr = cf.get_double("hyperparams.neural_lr", hp.neural_lr);
    hp.batch_size = checked_int(cf, "hyperparams.batch_size", hp.batch_size, 1, 1000000);
    hp.max_epochs = checked_int(cf, "hyperparams.max_epochs", hp.max_epochs, 1, 100000);
    hp.patience = checked_int(cf, "hyperparams.patience", hp.patience, 1, 100000);
    hp.min_df = cf.get_int("hyperparams.min_df", hp.min_df);
    hp.vocab_max = cf.get_int("hyperparams.vocab_max", hp.vocab_max);
    hp.bootstrap_b = checked_int(cf, "hyperparams.bootstrap_b", hp.bootstrap_b, 1, 10000000);
    hp.imbalance = model::parse_imbalance(cf.get_string("imbalance.strategy", "none"));

    return rc;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    return read_run_config(cfg::load_config(path));
}

}  // namespace wb::cli
