#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "windowbench/ehr/cohort.hpp"
#include "windowbench/error.hpp"
#include "windowbench/eval/auroc.hpp"
#include "windowbench/eval/results.hpp"
#include "windowbench/eval/sweep.hpp"
#include "windowbench/rng.hpp"
#include "windowbench/synth/generate.hpp"

using namespace wb;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// O(n^2) pairwise reference: ties count a half.
double auroc_pairwise(const std::vector<double>& s, const std::vector<int>& y) {
    double wins = 0;
    int64_t pairs = 0;
    for (size_t i = 0; i < s.size(); ++i)
        for (size_t j = 0; j < s.size(); ++j) {
            if (y[i] != 1 || y[j] != 0) continue;
            ++pairs;
            if (s[i] > s[j])
                wins += 1.0;
            else if (s[i] == s[j])
                wins += 0.5;
        }
    return wins / static_cast<double>(pairs);
}

}  // namespace

TEST_CASE("auroc matches the pairwise definition on random data with ties") {
    Rng rng(21);
    std::vector<double> s;
    std::vector<int> y;
    for (int i = 0; i < 200; ++i) {
        // Coarse grid forces plenty of exact ties.
        s.push_back(std::round(rng.uniform01() * 20.0) / 20.0);
        y.push_back(rng.uniform01() < 0.3 ? 1 : 0);
    }
    CHECK(eval::auroc(s, y) == doctest::Approx(auroc_pairwise(s, y)).epsilon(1e-12));
}

TEST_CASE("auroc hand values, monotone invariance, complement identity") {
    std::vector<double> s = {0.9, 0.8, 0.7, 0.6};
    std::vector<int> y = {1, 0, 1, 0};
    CHECK(eval::auroc(s, y) == doctest::Approx(0.75).epsilon(1e-12));

    // Any strictly increasing transform preserves the ranking.
    std::vector<double> warped;
    for (double v : s) warped.push_back(std::exp(3.0 * v) - 2.0);
    CHECK(eval::auroc(warped, y) == doctest::Approx(0.75).epsilon(1e-12));

    // Negating scores flips every pair.
    std::vector<double> negated;
    for (double v : s) negated.push_back(-v);
    CHECK(eval::auroc(negated, y) == doctest::Approx(0.25).epsilon(1e-12));

    // All-tied scores sit at chance.
    CHECK(eval::auroc({0.5, 0.5, 0.5, 0.5}, y) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("auroc rejects single-class and non-finite inputs") {
    try {
        eval::auroc({0.1, 0.2}, {1, 1});
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        std::string what = e.what();
        CHECK(what.find("2 positive") != std::string::npos);
        CHECK(what.find("0 negative") != std::string::npos);
    }
    CHECK_THROWS_AS(eval::auroc({0.1, std::nan("")}, {1, 0}), ConfigError);
    CHECK_THROWS_AS(eval::auroc({}, {}), ConfigError);
}

TEST_CASE("bootstrap ci is deterministic, ordered, and tight on separation") {
    Rng rng(22);
    std::vector<double> s;
    std::vector<int> y;
    for (int i = 0; i < 120; ++i) {
        int label = i % 3 == 0 ? 1 : 0;
        s.push_back(label == 1 ? 0.6 + 0.4 * rng.uniform01() : 0.5 * rng.uniform01());
        y.push_back(label);
    }
    eval::BootstrapCi a = eval::bootstrap_auroc_ci(s, y, 500, 0.05, 77);
    eval::BootstrapCi b = eval::bootstrap_auroc_ci(s, y, 500, 0.05, 77);
    CHECK(a.lo == b.lo);
    CHECK(a.hi == b.hi);
    CHECK(a.lo <= a.hi);
    CHECK(a.usable == 500);
    CHECK(a.point == doctest::Approx(eval::auroc(s, y)));

    // Perfect separation: every resample with both classes scores 1.
    CHECK(a.point == 1.0);
    CHECK(a.lo >= 0.99);
    CHECK(a.hi <= 1.0);

    eval::BootstrapCi c = eval::bootstrap_auroc_ci(s, y, 500, 0.05, 78);
    bool same = a.lo == c.lo && a.hi == c.hi;
    CHECK(same);  // degenerate case: every resample is exactly 1
}

TEST_CASE("bootstrap ci brackets the point on noisy scores") {
    Rng rng(23);
    std::vector<double> s;
    std::vector<int> y;
    for (int i = 0; i < 150; ++i) {
        int label = i % 2;
        s.push_back(0.35 * rng.normal() + (label == 1 ? 0.35 : 0.0));
        y.push_back(label);
    }
    eval::BootstrapCi ci = eval::bootstrap_auroc_ci(s, y, 800, 0.05, 5);
    CHECK(ci.lo < ci.point);
    CHECK(ci.hi > ci.point);
    CHECK(ci.hi - ci.lo < 0.35);
    CHECK(ci.usable >= 780);
}

TEST_CASE("quantize9 and fmt9 round-trip losslessly") {
    for (double v : {0.123456789123456, 0.5, 0.999999999, 1.0, 0.0, 0.302100007}) {
        double q = eval::quantize9(v);
        CHECK(std::abs(q - v) <= 5e-10);
        std::string s = eval::fmt9(q);
        CHECK(std::stod(s) == q);  // parsing the printed form recovers q exactly
    }
    CHECK(eval::fmt9(0.75) == "0.750000000");
}

namespace {

eval::ResultsTable sample_results() {
    eval::ResultsTable t;
    auto add = [&](ehr::SurgeryType task, const char* model, const char* window,
                   ehr::Split split, double auroc, bool converged) {
        eval::ResultRow r;
        r.task = task;
        r.mode = eval::Mode::independent;
        r.source = eval::DataSource::notes;
        r.model_id = model;
        r.window = ehr::ObservationWindow::parse(window);
        r.split = split;
        r.converged = converged;
        if (converged) {
            r.auroc = eval::quantize9(auroc);
            r.ci_lo = eval::quantize9(auroc - 0.031);
            r.ci_hi = eval::quantize9(auroc + 0.042);
        }
        r.n_pos = 30;
        r.n_neg = 270;
        r.seed = 99;
        t.rows.push_back(r);
    };
    for (const char* w : {"0", "3", "6"}) {
        double bump = (w[0] == '0') ? 0.0 : (w[0] == '3' ? 0.1 : 0.12);
        add(ehr::SurgeryType::hip, "LR+BinaryBOW", w, ehr::Split::validation, 0.55 + bump, true);
        add(ehr::SurgeryType::hip, "LR+BinaryBOW", w, ehr::Split::test, 0.54 + bump, true);
        add(ehr::SurgeryType::hip, "LR+TFIDF+norm=l2", w, ehr::Split::validation, 0.60 + bump,
            true);
        add(ehr::SurgeryType::hip, "LR+TFIDF+norm=l2", w, ehr::Split::test, 0.58 + bump, true);
    }
    // One non-converged cell: excluded from aggregates, rendered as "--".
    add(ehr::SurgeryType::hip, "Average+Attention", "3", ehr::Split::test, 0.0, false);
    return t;
}

}  // namespace

TEST_CASE("results csv round-trips byte-identically") {
    fs::path dir = fs::temp_directory_path() / "wb_results_io";
    fs::create_directories(dir);
    eval::ResultsTable t = sample_results();
    eval::write_results_csv(t, dir / "results.csv");
    std::string first = slurp(dir / "results.csv");
    CHECK(first.find("task,mode,data_source,model_id,window,split,auroc,ci_lo,ci_hi,"
                     "n_pos,n_neg,converged,seed,wall_ms") == 0);
    CHECK(first.find("--") != std::string::npos);  // the non-converged row

    eval::ResultsTable parsed = eval::parse_results_csv(dir / "results.csv");
    REQUIRE(parsed.rows.size() == t.rows.size());
    eval::write_results_csv(parsed, dir / "results2.csv");
    CHECK(slurp(dir / "results2.csv") == first);
    for (size_t i = 0; i < t.rows.size(); ++i) {
        CHECK(parsed.rows[i].model_id == t.rows[i].model_id);
        CHECK(parsed.rows[i].auroc == t.rows[i].auroc);
        CHECK(parsed.rows[i].converged == t.rows[i].converged);
        CHECK(parsed.rows[i].seed == t.rows[i].seed);
    }
    fs::remove_all(dir);
}

TEST_CASE("pivots group rows and round-trip through csv") {
    eval::ResultsTable t = sample_results();
    std::vector<eval::PivotTable> pivots = eval::build_pivots(t);
    // (notes, independent, hip) x (validation, test) = 2 groups.
    REQUIRE(pivots.size() == 2);
    const eval::PivotTable* test_pivot = nullptr;
    for (const auto& p : pivots)
        if (p.split == ehr::Split::test) test_pivot = &p;
    REQUIRE(test_pivot != nullptr);
    CHECK(test_pivot->filename() == "notes_independent_hip_test.csv");
    REQUIRE(test_pivot->windows.size() == 3);
    CHECK(test_pivot->windows[0].name() == "0");  // canonical order
    REQUIRE(test_pivot->model_ids.size() == 3);
    CHECK(test_pivot->model_ids[0] == "LR+BinaryBOW");

    // The non-converged cell is present but not converged.
    size_t attn = 2;
    CHECK(test_pivot->model_ids[attn] == "Average+Attention");
    bool found_unconverged = false;
    for (size_t w = 0; w < 3; ++w) {
        const auto& cell = test_pivot->cells[attn][w];
        if (cell.present) {
            CHECK_FALSE(cell.converged);
            found_unconverged = true;
        }
    }
    CHECK(found_unconverged);

    fs::path dir = fs::temp_directory_path() / "wb_pivot_io";
    fs::create_directories(dir);
    eval::write_pivot_csv(*test_pivot, dir / test_pivot->filename());
    eval::PivotTable back = eval::parse_pivot_csv(dir / test_pivot->filename());
    CHECK(back.model_ids == test_pivot->model_ids);
    REQUIRE(back.cells.size() == test_pivot->cells.size());
    for (size_t m = 0; m < back.cells.size(); ++m)
        for (size_t w = 0; w < back.cells[m].size(); ++w) {
            CHECK(back.cells[m][w].present == test_pivot->cells[m][w].present);
            CHECK(back.cells[m][w].auroc == test_pivot->cells[m][w].auroc);
        }
    fs::remove_all(dir);
}

TEST_CASE("fig3 series averages converged variants with a normal-sd band") {
    fs::path dir = fs::temp_directory_path() / "wb_fig3";
    fs::remove_all(dir);
    fs::create_directories(dir);
    eval::emit_report(sample_results(), dir);
    std::string fig3 = slurp(dir / "fig3_series.csv");
    REQUIRE(!fig3.empty());
    // Window 0 test rows: {0.54, 0.58} -> mean 0.56, sd 0.0282842712...,
    // band 1.96*sd/sqrt(2).
    bool found = false;
    std::istringstream lines(fig3);
    std::string line;
    std::getline(lines, line);  // header
    CHECK(line == "task,split,window,k,mean_auroc,band_lo,band_hi");
    while (std::getline(lines, line)) {
        if (line.find("hip,test,0,") == 0) {
            found = true;
            std::istringstream fields(line);
            std::string f;
            std::vector<std::string> cols;
            while (std::getline(fields, f, ',')) cols.push_back(f);
            REQUIRE(cols.size() == 7);
            CHECK(std::stoi(cols[3]) == 2);
            double mean = std::stod(cols[4]);
            double lo = std::stod(cols[5]);
            double hi = std::stod(cols[6]);
            CHECK(mean == doctest::Approx(0.56).epsilon(1e-9));
            double sd = std::sqrt((0.0004 + 0.0004));  // sample sd of {0.54, 0.58}
            double half = 1.96 * sd / std::sqrt(2.0);
            CHECK(hi - mean == doctest::Approx(half).epsilon(1e-6));
            CHECK(mean - lo == doctest::Approx(half).epsilon(1e-6));
        }
    }
    CHECK(found);

    // fig4 takes the best converged variant per window.
    std::string fig4 = slurp(dir / "fig4_best.csv");
    CHECK(fig4.find("hip,test,0,LR+TFIDF+norm=l2,0.580000000") != std::string::npos);
    CHECK(fig4.find("hip,test,3,LR+TFIDF+norm=l2,0.680000000") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("day-vs-history compares best test auroc and flags the winner") {
    eval::ResultsTable t = sample_results();
    eval::DayVsHistoryTable cmp = eval::compare_day_vs_history(t);
    REQUIRE(cmp.rows.size() == 1);
    const eval::DayVsHistoryRow& row = cmp.rows[0];
    CHECK(row.source == eval::DataSource::notes);
    CHECK(row.task == ehr::SurgeryType::hip);
    CHECK(row.day0 == doctest::Approx(0.58));
    CHECK(row.months3 == doctest::Approx(0.68));
    CHECK(row.best_model_day0 == "LR+TFIDF+norm=l2");
    CHECK_FALSE(row.flag_day0);
    CHECK(row.flag_months3);

    // Ties flag both sides.
    eval::ResultsTable tied;
    for (const eval::ResultRow& r : t.rows) {
        eval::ResultRow copy = r;
        if (copy.split == ehr::Split::test && copy.converged) copy.auroc = 0.6;
        tied.rows.push_back(copy);
    }
    eval::DayVsHistoryTable both = eval::compare_day_vs_history(tied);
    REQUIRE(both.rows.size() == 1);
    CHECK(both.rows[0].flag_day0);
    CHECK(both.rows[0].flag_months3);
    std::string text = both.rows[0].flag_day0 ? both.render() : "";
    CHECK(!text.empty());
}

TEST_CASE("model-id grammar accepts the roster and rejects malformed ids") {
    eval::ModelSpec lr = eval::parse_model_id("LR");
    CHECK(lr.family == eval::ModelSpec::Family::linear);
    CHECK(lr.penalty == model::Penalty::l2);  // bare LR trains as l2
    CHECK(lr.text_encoder == eval::ModelSpec::TextEncoder::none);

    eval::ModelSpec a = eval::parse_model_id("LR+L1+TFIDF+norm=l2");
    CHECK(a.penalty == model::Penalty::l1);
    CHECK(a.text_encoder == eval::ModelSpec::TextEncoder::tfidf);
    CHECK(a.norm == feat::Norm::l2);

    eval::ModelSpec b = eval::parse_model_id("LR+BinaryBOW+Structured");
    CHECK(b.text_encoder == eval::ModelSpec::TextEncoder::binary_bow);
    CHECK(b.structured);

    eval::ModelSpec c = eval::parse_model_id("LR+None+BOW+norm=1");
    CHECK(c.penalty == model::Penalty::none);
    CHECK(c.norm == feat::Norm::l1);

    eval::ModelSpec d = eval::parse_model_id("LR+LDA");
    CHECK(d.text_encoder == eval::ModelSpec::TextEncoder::lda);

    eval::ModelSpec e = eval::parse_model_id("Average+Attention");
    CHECK(e.family == eval::ModelSpec::Family::neural);
    CHECK(e.agg == model::Aggregation::attention);
    CHECK(eval::parse_model_id("Average").agg == model::Aggregation::mean);
    CHECK(eval::parse_model_id("Average+Maxpool").agg == model::Aggregation::maxpool);

    for (const char* bad :
         {"", "LR+", "LR+BOW+TFIDF", "LR+L1+L2", "LR+norm=l2", "LR+BOW+norm=l3", "LR+Fancy",
          "Average+BOW", "Average+Mean+Maxpool", "SVM", "lr+bow", "+LR", "LR++BOW"}) {
        CAPTURE(bad);
        CHECK_THROWS_AS(eval::parse_model_id(bad), ConfigError);
    }
}

TEST_CASE("model-source compatibility is enforced") {
    using eval::DataSource;
    CHECK_NOTHROW(
        eval::check_model_source(eval::parse_model_id("LR+BOW"), DataSource::notes));
    CHECK_NOTHROW(eval::check_model_source(eval::parse_model_id("LR+Structured"),
                                           DataSource::structured));
    CHECK_NOTHROW(eval::check_model_source(eval::parse_model_id("LR+TFIDF+Structured"),
                                           DataSource::both));
    CHECK_NOTHROW(
        eval::check_model_source(eval::parse_model_id("Average+Mean"), DataSource::notes));

    // Text encoders cannot run off the structured-only source, neural ids run
    // only off notes, and `both` requires text + structured.
    CHECK_THROWS_AS(
        eval::check_model_source(eval::parse_model_id("LR+BOW"), DataSource::structured),
        ConfigError);
    CHECK_THROWS_AS(
        eval::check_model_source(eval::parse_model_id("Average"), DataSource::structured),
        ConfigError);
    CHECK_THROWS_AS(
        eval::check_model_source(eval::parse_model_id("LR+Structured"), DataSource::notes),
        ConfigError);
    CHECK_THROWS_AS(eval::check_model_source(eval::parse_model_id("LR+BOW"), DataSource::both),
                    ConfigError);
    CHECK_THROWS_AS(
        eval::check_model_source(eval::parse_model_id("LR+Structured"), DataSource::both),
        ConfigError);
}

namespace {

struct SweepFixture {
    synth::SynthCorpus sc;
    ehr::Cohort cohort;
    ehr::SplitAssignment split;
    feat::GemTable gem;

    SweepFixture() {
        synth::SynthConfig cfg;
        cfg.n_patients = 260;
        cfg.prevalence_hip = 0.25;
        cfg.prevalence_knee = 0.25;
        cfg.note_rate = 6.0;
        cfg.note_tokens_mean = 25;
        cfg.background_vocab = 120;
        cfg.seed = 41;
        sc = synth::generate_corpus(cfg);
        auto surgeries = ehr::identify_surgeries(sc.corpus, ehr::CptSets::defaults());
        cohort = ehr::build_cohort(sc.corpus, surgeries, ehr::CohortCriteria::defaults());
        split = ehr::split_cohort(cohort, {}, 17, /*stratify=*/true);
        for (const auto& [src, dst] : sc.gem_rows) gem.forward[src] = dst;
    }

    eval::SweepConfig config() const {
        eval::SweepConfig c;
        c.corpus = &sc.corpus;
        c.cohort = &cohort;
        c.split = &split;
        c.gem = &gem;
        c.windows = {ehr::ObservationWindow::day_of_surgery(), ehr::ObservationWindow::months(3)};
        c.tasks = {ehr::SurgeryType::hip, ehr::SurgeryType::knee};
        c.modes = {eval::Mode::independent};
        c.roster = {{eval::DataSource::notes, {"LR+BinaryBOW", "LR+TFIDF+norm=l2"}}};
        c.hp.bootstrap_b = 60;
        c.hp.min_df = 2;
        c.seed = 9;
        c.jobs = 2;
        return c;
    }
};

}  // namespace

TEST_CASE("run_sweep emits one row per cell in configuration order") {
    SweepFixture fx;
    eval::SweepConfig cfg = fx.config();
    eval::ResultsTable t = eval::run_sweep(cfg);
    // 2 models x 2 windows x 2 tasks x 2 splits = 16 rows.
    REQUIRE(t.rows.size() == 16);
    // Order: model-major, then window, then task, validation before test.
    CHECK(t.rows[0].model_id == "LR+BinaryBOW");
    CHECK(t.rows[0].window.name() == "0");
    CHECK(t.rows[0].task == ehr::SurgeryType::hip);
    CHECK(t.rows[0].split == ehr::Split::validation);
    CHECK(t.rows[1].split == ehr::Split::test);
    CHECK(t.rows[2].task == ehr::SurgeryType::knee);
    CHECK(t.rows[4].window.name() == "3");
    CHECK(t.rows[8].model_id == "LR+TFIDF+norm=l2");
    for (const eval::ResultRow& r : t.rows) {
        CHECK(r.converged);
        CHECK(r.n_pos > 0);
        CHECK(r.n_neg > 0);
        CHECK(r.ci_lo <= r.auroc);
        CHECK(r.auroc <= r.ci_hi);
    }

    // Determinism across scheduling: 1 worker vs 4 workers, identical rows.
    eval::SweepConfig serial = cfg;
    serial.jobs = 1;
    eval::ResultsTable t1 = eval::run_sweep(serial);
    eval::SweepConfig wide = cfg;
    wide.jobs = 4;
    eval::ResultsTable t4 = eval::run_sweep(wide);
    REQUIRE(t1.rows.size() == t.rows.size());
    REQUIRE(t4.rows.size() == t.rows.size());
    for (size_t i = 0; i < t.rows.size(); ++i) {
        CHECK(t1.rows[i].auroc == t.rows[i].auroc);
        CHECK(t4.rows[i].auroc == t.rows[i].auroc);
        CHECK(t1.rows[i].ci_lo == t.rows[i].ci_lo);
        CHECK(t4.rows[i].ci_hi == t.rows[i].ci_hi);
        CHECK(t1.rows[i].seed == t.rows[i].seed);
    }
}

TEST_CASE("train_cell reproduces its sweep twin rows and returns the model") {
    SweepFixture fx;
    eval::SweepConfig cfg = fx.config();
    eval::ResultsTable sweep = eval::run_sweep(cfg);
    eval::TrainedCell cell =
        eval::train_cell(cfg, eval::DataSource::notes, eval::Mode::independent,
                         "LR+TFIDF+norm=l2", ehr::ObservationWindow::months(3),
                         ehr::SurgeryType::knee);
    CHECK(cell.bundle.kind == "linear");
    REQUIRE(cell.bundle.linear.has_value());
    REQUIRE(cell.rows.size() == 2);
    int matched = 0;
    for (const eval::ResultRow& r : sweep.rows) {
        if (r.model_id != "LR+TFIDF+norm=l2" || r.window.name() != "3" ||
            r.task != ehr::SurgeryType::knee)
            continue;
        const eval::ResultRow& mine =
            r.split == ehr::Split::validation ? cell.rows[0] : cell.rows[1];
        CHECK(mine.auroc == r.auroc);
        CHECK(mine.ci_lo == r.ci_lo);
        CHECK(mine.ci_hi == r.ci_hi);
        CHECK(mine.seed == r.seed);
        ++matched;
    }
    CHECK(matched == 2);
}

TEST_CASE("run_sweep validates the configuration up front") {
    SweepFixture fx;
    eval::SweepConfig cfg = fx.config();
    cfg.windows.clear();
    CHECK_THROWS_AS(eval::run_sweep(cfg), ConfigError);

    cfg = fx.config();
    cfg.roster = {{eval::DataSource::notes, {"LR+Bogus"}}};
    CHECK_THROWS_AS(eval::run_sweep(cfg), ConfigError);

    cfg = fx.config();
    cfg.roster = {{eval::DataSource::structured, {"LR+Structured"}}};
    cfg.gem = nullptr;
    CHECK_THROWS_AS(eval::run_sweep(cfg), ConfigError);

    cfg = fx.config();
    cfg.roster = {{eval::DataSource::notes, {"LR+BOW", "LR+BOW"}}};
    CHECK_THROWS_AS(eval::run_sweep(cfg), ConfigError);  // duplicate roster id

    cfg = fx.config();
    cfg.windows = {ehr::ObservationWindow::months(3), ehr::ObservationWindow::months(3)};
    CHECK_THROWS_AS(eval::run_sweep(cfg), ConfigError);  // duplicate window
}
