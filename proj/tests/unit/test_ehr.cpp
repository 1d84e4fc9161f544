#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "windowbench/ehr/cohort.hpp"
#include "windowbench/ehr/corpus.hpp"
#include "windowbench/error.hpp"
#include "windowbench/rng.hpp"

using namespace wb;
namespace fs = std::filesystem;

namespace {

ehr::Patient patient(std::string id, int birth_year) {
    ehr::Patient p;
    p.patient_id = std::move(id);
    p.birth_date = make_date(birth_year, 1, 1);
    return p;
}

ehr::Encounter encounter(std::string id, std::string pid, Date admit,
                         ehr::Setting setting = ehr::Setting::inpatient,
                         std::vector<std::string> cpt = {}) {
    ehr::Encounter e;
    e.encounter_id = std::move(id);
    e.patient_id = std::move(pid);
    e.admit_date = admit;
    e.setting = setting;
    e.cpt_codes = std::move(cpt);
    return e;
}

ehr::ClinicalNote note(std::string id, std::string pid, Date date, std::string text) {
    return ehr::ClinicalNote{std::move(id), std::move(pid), date, std::move(text)};
}

// One patient with an index hip surgery on `surgery_date` plus optional extras.
ehr::Corpus tiny_corpus(Date surgery_date, int birth_year = 1950) {
    ehr::Corpus c;
    c.patients.push_back(patient("p1", birth_year));
    c.encounters.push_back(encounter("e.idx", "p1", surgery_date, ehr::Setting::inpatient,
                                     {"27130"}));
    c.notes.push_back(note("n1", "p1", surgery_date - 10, "pre op check"));
    c.reindex();
    return c;
}

const std::string kHipCpt = "27130";
const std::string kKneeCpt = "27447";

}  // namespace

TEST_CASE("identify_surgeries finds hip and knee index events") {
    ehr::Corpus c;
    c.patients.push_back(patient("p1", 1950));
    c.patients.push_back(patient("p2", 1960));
    c.encounters.push_back(
        encounter("e1", "p1", make_date(2015, 5, 1), ehr::Setting::inpatient, {kHipCpt}));
    c.encounters.push_back(
        encounter("e2", "p2", make_date(2016, 6, 1), ehr::Setting::inpatient, {kKneeCpt}));
    c.encounters.push_back(
        encounter("e3", "p2", make_date(2016, 7, 1), ehr::Setting::inpatient, {}));
    c.reindex();
    auto surgeries = ehr::identify_surgeries(c, ehr::CptSets::defaults());
    REQUIRE(surgeries.size() == 2);
    CHECK(surgeries[0].surgery_type == ehr::SurgeryType::hip);
    CHECK(surgeries[1].surgery_type == ehr::SurgeryType::knee);
    CHECK(surgeries[0].age_at_surgery == 65);
}

TEST_CASE("tie-rule encounter with both code families emits one event per type") {
    ehr::Corpus c;
    c.patients.push_back(patient("p1", 1950));
    c.encounters.push_back(encounter("e1", "p1", make_date(2015, 5, 1), ehr::Setting::inpatient,
                                     {kHipCpt, kKneeCpt}));
    c.reindex();
    auto both = ehr::identify_surgeries(c, ehr::CptSets::defaults(), ehr::CptTieRule::both);
    REQUIRE(both.size() == 2);
    CHECK(both[0].surgery_type != both[1].surgery_type);
    CHECK(both[0].event_id() != both[1].event_id());

    auto hip_only =
        ehr::identify_surgeries(c, ehr::CptSets::defaults(), ehr::CptTieRule::hip_only);
    REQUIRE(hip_only.size() == 1);
    CHECK(hip_only[0].surgery_type == ehr::SurgeryType::hip);
}

TEST_CASE("label boundaries: days 29, 30 positive; 0 and 31 not") {
    Date surgery = make_date(2015, 5, 1);
    ehr::Corpus c = tiny_corpus(surgery);
    auto check_label = [&](int offset_days, ehr::Setting setting, bool want) {
        ehr::Corpus local = c;
        local.encounters.push_back(
            encounter("e.next", "p1", surgery + offset_days, setting));
        local.reindex();
        auto surgeries = ehr::identify_surgeries(local, ehr::CptSets::defaults());
        REQUIRE(surgeries.size() == 1);
        auto encs = local.encounters_of("p1");
        ehr::Label label = ehr::assign_label(surgeries[0], encs);
        CHECK_MESSAGE(label.positive == want, "offset ", offset_days);
        if (want) CHECK(label.readmit_encounter_id == "e.next");
    };
    check_label(29, ehr::Setting::inpatient, true);
    check_label(30, ehr::Setting::inpatient, true);
    check_label(31, ehr::Setting::inpatient, false);
    check_label(0, ehr::Setting::inpatient, false);   // same-day: not after surgery
    check_label(15, ehr::Setting::outpatient, false);  // outpatient never counts
}

TEST_CASE("windows admit the documented ranges") {
    Date surgery = make_date(2015, 5, 1);
    ehr::ObservationWindow history = ehr::ObservationWindow::history_only();
    ehr::ObservationWindow day = ehr::ObservationWindow::day_of_surgery();
    ehr::ObservationWindow m3 = ehr::ObservationWindow::months(3);

    CHECK(history.admits(surgery - 1, surgery));
    CHECK(history.admits(surgery - 10000, surgery));
    CHECK_FALSE(history.admits(surgery, surgery));

    CHECK(day.admits(surgery, surgery));
    CHECK_FALSE(day.admits(surgery - 1, surgery));
    CHECK_FALSE(day.admits(surgery + 1, surgery));

    CHECK(m3.admits(surgery, surgery));
    CHECK(m3.admits(surgery - 90, surgery));
    CHECK_FALSE(m3.admits(surgery - 91, surgery));
    CHECK_FALSE(m3.admits(surgery + 1, surgery));
}

TEST_CASE("window names round-trip and reject junk") {
    using ehr::ObservationWindow;
    CHECK(ObservationWindow::history_only().name() == "history");
    CHECK(ObservationWindow::day_of_surgery().name() == "0");
    CHECK(ObservationWindow::months(6).name() == "6");
    for (const char* name : {"history", "0", "3", "6", "12", "24", "36"})
        CHECK(ObservationWindow::parse(name).name() == name);
    CHECK_THROWS_AS(ObservationWindow::parse("week"), ConfigError);
    CHECK_THROWS_AS(ObservationWindow::parse("-3"), ConfigError);
    CHECK_THROWS_AS(ObservationWindow::months(0), InvariantError);
}

TEST_CASE("slice_window returns date-ordered notes and encounters inside the window") {
    Date surgery = make_date(2015, 5, 1);
    ehr::Corpus c;
    c.patients.push_back(patient("p1", 1950));
    c.encounters.push_back(
        encounter("e.idx", "p1", surgery, ehr::Setting::inpatient, {kHipCpt}));
    c.encounters.push_back(encounter("e.old", "p1", surgery - 200, ehr::Setting::outpatient));
    c.encounters.push_back(encounter("e.in", "p1", surgery - 30, ehr::Setting::outpatient));
    c.encounters.push_back(encounter("e.post", "p1", surgery + 5, ehr::Setting::inpatient));
    c.notes.push_back(note("n.b", "p1", surgery - 5, "beta"));
    c.notes.push_back(note("n.a", "p1", surgery - 50, "alpha"));
    c.notes.push_back(note("n.post", "p1", surgery + 1, "post"));
    c.reindex();
    auto surgeries = ehr::identify_surgeries(c, ehr::CptSets::defaults());
    REQUIRE(surgeries.size() == 1);

    ehr::WindowedRecord m3 =
        ehr::slice_window(c, surgeries[0], ehr::ObservationWindow::months(3));
    REQUIRE(m3.notes.size() == 2);
    CHECK(m3.notes[0].note_id == "n.a");
    CHECK(m3.notes[1].note_id == "n.b");
    REQUIRE(m3.encounters.size() == 2);
    CHECK(m3.encounters[0].encounter_id == "e.in");
    CHECK(m3.encounters[1].encounter_id == "e.idx");

    ehr::WindowedRecord hist =
        ehr::slice_window(c, surgeries[0], ehr::ObservationWindow::history_only());
    CHECK(hist.encounters.size() == 2);  // e.old, e.in; never the index encounter
    CHECK(hist.notes.size() == 2);
}

TEST_CASE("window nesting: narrower windows yield sub-multisets") {
    // Randomized surgeries with events scattered across four years.
    Rng rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        Date surgery = make_date(2015, 1, 1) + static_cast<int>(rng.uniform_int(0, 300));
        ehr::Corpus c;
        c.patients.push_back(patient("p1", 1950));
        c.encounters.push_back(
            encounter("e.idx", "p1", surgery, ehr::Setting::inpatient, {kHipCpt}));
        int n_notes = static_cast<int>(rng.uniform_int(0, 12));
        for (int i = 0; i < n_notes; ++i) {
            int offset = static_cast<int>(rng.uniform_int(-1400, 40));
            c.notes.push_back(
                note("n" + std::to_string(i), "p1", surgery + offset, "tok"));
        }
        c.reindex();
        auto surgeries = ehr::identify_surgeries(c, ehr::CptSets::defaults());
        REQUIRE(surgeries.size() == 1);

        std::vector<ehr::ObservationWindow> order = {
            ehr::ObservationWindow::day_of_surgery(), ehr::ObservationWindow::months(3),
            ehr::ObservationWindow::months(6), ehr::ObservationWindow::months(12),
            ehr::ObservationWindow::months(36)};
        std::vector<std::vector<std::string>> ids;
        for (const auto& w : order) {
            ehr::WindowedRecord rec = ehr::slice_window(c, surgeries[0], w);
            std::vector<std::string> got;
            for (const auto& n : rec.notes) got.push_back(n.note_id);
            ids.push_back(std::move(got));
        }
        for (size_t i = 0; i + 1 < ids.size(); ++i) {
            // Every note of the narrower window appears in the wider one.
            std::multiset<std::string> narrow(ids[i].begin(), ids[i].end());
            std::multiset<std::string> wide(ids[i + 1].begin(), ids[i + 1].end());
            CHECK(std::includes(wide.begin(), wide.end(), narrow.begin(), narrow.end()));
        }
    }
}

TEST_CASE("cohort funnel applies criteria in order and tallies first failure") {
    Date surgery = make_date(2015, 5, 1);
    ehr::Corpus c;
    // p1 fine, p2 deceased, p3 too old, p4 too young, p5 no notes.
    for (int i = 1; i <= 5; ++i) c.patients.push_back(patient("p" + std::to_string(i), 1950));
    c.patients[1].death_date = surgery - 1;
    c.patients[2].birth_date = make_date(1920, 1, 1);  // 95 at surgery
    c.patients[3].birth_date = make_date(2000, 1, 1);  // 15 at surgery
    for (int i = 1; i <= 5; ++i) {
        std::string pid = "p" + std::to_string(i);
        c.encounters.push_back(
            encounter("e" + pid, pid, surgery, ehr::Setting::inpatient, {kHipCpt}));
        if (i != 5) c.notes.push_back(note("n" + pid, pid, surgery - 10, "text"));
    }
    c.reindex();
    auto surgeries = ehr::identify_surgeries(c, ehr::CptSets::defaults());
    REQUIRE(surgeries.size() == 5);
    ehr::Cohort cohort = ehr::build_cohort(c, surgeries, ehr::CohortCriteria::defaults());
    CHECK(cohort.tally.input_surgeries == 5);
    CHECK(cohort.tally.deceased == 1);
    CHECK(cohort.tally.over_age == 1);
    CHECK(cohort.tally.under_age == 1);
    CHECK(cohort.tally.no_notes == 1);
    CHECK(cohort.tally.included == 1);
    REQUIRE(cohort.members.size() == 1);
    CHECK(cohort.members[0].surgery.patient_id == "p1");
}

namespace {

ehr::Cohort synthetic_cohort(int n_patients, double prevalence, uint64_t seed,
                             ehr::Corpus* corpus_out = nullptr) {
    Rng rng(seed);
    ehr::Corpus c;
    Date base = make_date(2015, 1, 1);
    for (int i = 0; i < n_patients; ++i) {
        std::string pid = "p" + std::to_string(1000 + i);
        c.patients.push_back(patient(pid, 1950));
        Date surgery = base + static_cast<int>(rng.uniform_int(0, 600));
        bool knee = rng.uniform01() < 0.5;
        c.encounters.push_back(encounter("e." + pid, pid, surgery, ehr::Setting::inpatient,
                                         {knee ? kKneeCpt : kHipCpt}));
        if (rng.uniform01() < prevalence)
            c.encounters.push_back(encounter("r." + pid, pid,
                                             surgery + static_cast<int>(rng.uniform_int(1, 30)),
                                             ehr::Setting::inpatient));
        c.notes.push_back(note("n." + pid, pid, surgery - 5, "note text"));
    }
    c.reindex();
    auto surgeries = ehr::identify_surgeries(c, ehr::CptSets::defaults());
    ehr::Cohort cohort = ehr::build_cohort(c, surgeries, ehr::CohortCriteria::defaults());
    if (corpus_out) *corpus_out = std::move(c);
    return cohort;
}

}  // namespace

TEST_CASE("split yields exact 70/15/15 on N=100 and partitions patients") {
    ehr::Cohort cohort = synthetic_cohort(100, 0.10, 5);
    REQUIRE(cohort.patient_ids().size() == 100);
    ehr::SplitAssignment split = ehr::split_cohort(cohort, {}, 42);
    int n[3] = {0, 0, 0};
    for (const std::string& pid : cohort.patient_ids()) ++n[static_cast<int>(split.of(pid))];
    CHECK(n[0] == 70);
    CHECK(n[1] == 15);
    CHECK(n[2] == 15);
}

TEST_CASE("split remainder goes to the largest fractional parts") {
    // N=7: floors are 4/1/1 (4.9/1.05/1.05), remainder 1 goes to train (.9).
    ehr::Cohort cohort = synthetic_cohort(7, 0.3, 6);
    ehr::SplitAssignment split = ehr::split_cohort(cohort, {}, 1);
    int n[3] = {0, 0, 0};
    for (const std::string& pid : cohort.patient_ids()) ++n[static_cast<int>(split.of(pid))];
    CHECK(n[0] == 5);
    CHECK(n[1] == 1);
    CHECK(n[2] == 1);
}

TEST_CASE("split is deterministic in seed and differs across seeds") {
    ehr::Cohort cohort = synthetic_cohort(200, 0.10, 7);
    ehr::SplitAssignment a = ehr::split_cohort(cohort, {}, 11);
    ehr::SplitAssignment b = ehr::split_cohort(cohort, {}, 11);
    ehr::SplitAssignment c = ehr::split_cohort(cohort, {}, 12);
    CHECK(a.by_patient == b.by_patient);
    CHECK(a.by_patient != c.by_patient);
}

TEST_CASE("stratified split keeps per-split prevalence near global") {
    ehr::Cohort cohort = synthetic_cohort(1000, 0.10, 8);
    ehr::SplitAssignment split = ehr::split_cohort(cohort, {}, 3, /*stratify=*/true);
    std::map<ehr::Split, std::pair<int, int>> counts;  // split -> (pos, total)
    for (const ehr::CohortMember& m : cohort.members) {
        auto& [pos, total] = counts[split.of(m.surgery.patient_id)];
        pos += m.label.positive ? 1 : 0;
        ++total;
    }
    double global_pos = 0, global_total = 0;
    for (auto& [s, pt] : counts) {
        global_pos += pt.first;
        global_total += pt.second;
    }
    double global = global_pos / global_total;
    for (auto& [s, pt] : counts) {
        double prev = static_cast<double>(pt.first) / pt.second;
        CHECK(std::abs(prev - global) <= 0.02);
    }
}

TEST_CASE("demographic age quartiles interpolate on (n-1)p") {
    // {60, 62, 68, 70, 76}: h lands on exact indices -> q1=62, median=68, q3=70.
    ehr::Corpus c;
    Date surgery = make_date(2015, 6, 1);
    int ages[] = {60, 62, 68, 70, 76};
    for (int i = 0; i < 5; ++i) {
        std::string pid = "p" + std::to_string(i);
        ehr::Patient p = patient(pid, 2015 - ages[i]);
        p.birth_date = make_date(2015 - ages[i], 1, 1);
        p.sex = ehr::Sex::female;
        c.patients.push_back(p);
        c.encounters.push_back(
            encounter("e" + pid, pid, surgery, ehr::Setting::inpatient, {kHipCpt}));
        c.notes.push_back(note("n" + pid, pid, surgery - 3, "x"));
    }
    c.reindex();
    auto surgeries = ehr::identify_surgeries(c, ehr::CptSets::defaults());
    ehr::Cohort cohort = ehr::build_cohort(c, surgeries, ehr::CohortCriteria::defaults());
    REQUIRE(cohort.members.size() == 5);
    // Force all five into train so one cell holds the whole sample.
    ehr::SplitAssignment split;
    for (int i = 0; i < 5; ++i) split.by_patient["p" + std::to_string(i)] = ehr::Split::train;
    ehr::DemographicSummary summary = ehr::demographic_summary(c, cohort, split);
    const ehr::DemographicCell& cell = summary.cells[0][0];
    CHECK(cell.n == 5);
    CHECK(cell.age.q1 == doctest::Approx(62));
    CHECK(cell.age.median == doctest::Approx(68));
    CHECK(cell.age.q3 == doctest::Approx(70));
    CHECK(cell.age.mean == doctest::Approx(67.2));
}

TEST_CASE("loader reports malformed lines with file and line number") {
    fs::path dir = fs::temp_directory_path() / "wb_loader_test";
    fs::create_directories(dir);
    std::ofstream(dir / "patients.jsonl")
        << R"({"patient_id":"p1","birth_date":"1950-01-01","sex":"female","race":"white"})"
        << "\n"
        << "{not json\n";
    std::ofstream(dir / "encounters.jsonl") << "";
    std::ofstream(dir / "notes.jsonl") << "";
    try {
        ehr::load_corpus(dir);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        std::string what = e.what();
        CHECK(what.find("patients.jsonl") != std::string::npos);
        CHECK(what.find(":2") != std::string::npos);
    }
    fs::remove_all(dir);
}

TEST_CASE("loader keeps dangling references and warns") {
    fs::path dir = fs::temp_directory_path() / "wb_loader_dangle";
    fs::create_directories(dir);
    std::ofstream(dir / "patients.jsonl")
        << R"({"patient_id":"p1","birth_date":"1950-01-01","sex":"male","race":"other"})"
        << "\n";
    std::ofstream(dir / "encounters.jsonl")
        << R"({"encounter_id":"e1","patient_id":"ghost","admit_date":"2015-01-01","setting":"inpatient"})"
        << "\n";
    std::ofstream(dir / "notes.jsonl") << "";
    ehr::Corpus c = ehr::load_corpus(dir);
    CHECK(c.encounters.size() == 1);
    REQUIRE(!c.warnings.empty());
    CHECK(c.warnings[0].find("ghost") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("loader drops blacklisted variables at ingestion") {
    fs::path dir = fs::temp_directory_path() / "wb_loader_blacklist";
    fs::create_directories(dir);
    std::ofstream(dir / "patients.jsonl")
        << R"({"patient_id":"p1","birth_date":"1950-01-01","sex":"male","race":"other"})"
        << "\n";
    std::ofstream(dir / "encounters.jsonl")
        << R"({"encounter_id":"e1","patient_id":"p1","admit_date":"2015-01-01","setting":"inpatient",)"
        << R"("labs":[{"code":"keep_me","value":1.0,"unit":"u"},{"code":"drop_me","value":2.0,"unit":"u"}]})"
        << "\n";
    std::ofstream(dir / "notes.jsonl") << "";
    ehr::Corpus c = ehr::load_corpus(dir, {"drop_me"});
    REQUIRE(c.encounters.size() == 1);
    REQUIRE(c.encounters[0].labs.size() == 1);
    CHECK(c.encounters[0].labs[0].code == "keep_me");
    fs::remove_all(dir);
}
