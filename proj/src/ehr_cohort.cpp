#include "windowbench/ehr/cohort.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "windowbench/error.hpp"
#include "windowbench/log.hpp"
#include "windowbench/rng.hpp"

namespace wb::ehr {

CptSets CptSets::defaults() {
    return CptSets{
        {"27130", "27132", "27134", "27236", "27137", "27138", "27120", "27125"},
        {"27445", "27446", "27447", "27486", "27487"},
    };
}

std::vector<SurgeryEvent> identify_surgeries(const Corpus& corpus, const CptSets& cpt,
                                             CptTieRule tie_rule) {
    if (cpt.hip.empty() || cpt.knee.empty())
        throw ConfigError("surgery CPT sets must be non-empty");
    std::unordered_set<std::string> hip(cpt.hip.begin(), cpt.hip.end());
    std::unordered_set<std::string> knee(cpt.knee.begin(), cpt.knee.end());
    for (const std::string& c : cpt.hip)
        if (knee.count(c)) throw ConfigError("CPT code in both hip and knee sets: " + c);

    std::vector<SurgeryEvent> events;
    for (const Encounter& e : corpus.encounters) {
        bool is_hip = false, is_knee = false;
        for (const std::string& c : e.cpt_codes) {
            is_hip = is_hip || hip.count(c) > 0;
            is_knee = is_knee || knee.count(c) > 0;
        }
        if (!is_hip && !is_knee) continue;
        if (is_hip && is_knee) {
            log::info("identify_surgeries", {{"encounter", e.encounter_id},
                                             {"event", "cpt_tie"},
                                             {"rule", tie_rule == CptTieRule::both ? "both"
                                                      : tie_rule == CptTieRule::hip_only
                                                          ? "hip_only"
                                                          : "knee_only"}});
            if (tie_rule == CptTieRule::hip_only) is_knee = false;
            if (tie_rule == CptTieRule::knee_only) is_hip = false;
        }
        const Patient* p = corpus.find_patient(e.patient_id);
        int age = p ? years_between(p->birth_date, e.admit_date) : 0;
        if (is_hip)
            events.push_back({e.patient_id, e.encounter_id, e.admit_date, SurgeryType::hip, age});
        if (is_knee)
            events.push_back({e.patient_id, e.encounter_id, e.admit_date, SurgeryType::knee, age});
    }
    return events;
}

Label assign_label(const SurgeryEvent& surgery, std::span<const Encounter* const> encounters,
                   int horizon_days) {
    // Order-independent: the earliest qualifying readmission (ties broken by
    // encounter_id) is reported regardless of input order.
    const Encounter* best = nullptr;
    for (const Encounter* e : encounters) {
        if (e->setting != Setting::inpatient) continue;
        if (e->encounter_id == surgery.encounter_id) continue;
        if (!(surgery.surgery_date < e->admit_date &&
              e->admit_date <= surgery.surgery_date + horizon_days))
            continue;
        if (!best || e->admit_date < best->admit_date ||
            (e->admit_date == best->admit_date && e->encounter_id < best->encounter_id))
            best = e;
    }
    if (best) return Label{true, best->encounter_id};
    return Label{false, std::nullopt};
}

Cohort build_cohort(const Corpus& corpus, std::span<const SurgeryEvent> surgeries,
                    const CohortCriteria& criteria, int label_horizon_days) {
    Cohort cohort;
    ExclusionTally& tally = cohort.tally;
    tally.input_surgeries = static_cast<int64_t>(surgeries.size());

    std::set<std::string> patients_in, patients_vital, patients_kept;
    for (const SurgeryEvent& s : surgeries) {
        patients_in.insert(s.patient_id);
        const Patient* p = corpus.find_patient(s.patient_id);
        if (!p) throw InvariantError("surgery references unknown patient " + s.patient_id);
        if (criteria.exclude_deceased && p->death_date) {
            ++tally.deceased;
            continue;
        }
        if (s.age_at_surgery < criteria.min_age) {
            ++tally.under_age;
            continue;
        }
        if (s.age_at_surgery > criteria.max_age) {
            ++tally.over_age;
            continue;
        }
        patients_vital.insert(s.patient_id);
        if (criteria.require_notes && corpus.notes_of(s.patient_id).empty()) {
            ++tally.no_notes;
            continue;
        }
        patients_kept.insert(s.patient_id);
        Label label = assign_label(s, corpus.encounters_of(s.patient_id), label_horizon_days);
        cohort.members.push_back({s, label});
        ++tally.included;
    }
    tally.patients_input = static_cast<int64_t>(patients_in.size());
    tally.patients_after_vitality = static_cast<int64_t>(patients_vital.size());
    tally.patients_included = static_cast<int64_t>(patients_kept.size());

    if (cohort.members.empty())
        throw ConfigError("cohort is empty: every surgery failed the inclusion criteria");
    return cohort;
}

WindowedRecord slice_window(const Corpus& corpus, const SurgeryEvent& surgery,
                            ObservationWindow window) {
    WindowedRecord rec{surgery, {}, {}, window};
    for (const ClinicalNote* n : corpus.notes_of(surgery.patient_id))
        if (window.admits(n->date, surgery.surgery_date)) rec.notes.push_back(*n);
    for (const Encounter* e : corpus.encounters_of(surgery.patient_id))
        if (window.admits(e->admit_date, surgery.surgery_date)) rec.encounters.push_back(*e);
    std::stable_sort(rec.notes.begin(), rec.notes.end(),
                     [](const ClinicalNote& a, const ClinicalNote& b) { return a.date < b.date; });
    std::stable_sort(rec.encounters.begin(), rec.encounters.end(),
                     [](const Encounter& a, const Encounter& b) {
                         return a.admit_date < b.admit_date;
                     });
    return rec;
}

namespace {

// floor(ratio*n) per split, remainder to the largest fractional parts
// (ties favoring train, then validation, then test).
std::array<int64_t, 3> apportion(int64_t n, const SplitRatios& r) {
    std::array<double, 3> want = {r.train * static_cast<double>(n),
                                  r.validation * static_cast<double>(n),
                                  r.test * static_cast<double>(n)};
    std::array<int64_t, 3> got{};
    int64_t used = 0;
    for (int i = 0; i < 3; ++i) {
        got[static_cast<size_t>(i)] = static_cast<int64_t>(std::floor(want[static_cast<size_t>(i)]));
        used += got[static_cast<size_t>(i)];
    }
    std::array<int, 3> order = {0, 1, 2};
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        double fa = want[static_cast<size_t>(a)] - std::floor(want[static_cast<size_t>(a)]);
        double fb = want[static_cast<size_t>(b)] - std::floor(want[static_cast<size_t>(b)]);
        return fa > fb;
    });
    for (int64_t i = 0; i < n - used; ++i) ++got[static_cast<size_t>(order[static_cast<size_t>(i % 3)])];
    return got;
}

void assign_group(std::vector<std::string> ids, const SplitRatios& ratios, Rng& rng,
                  std::map<std::string, Split>& out) {
    std::sort(ids.begin(), ids.end());
    rng.shuffle(ids);
    std::array<int64_t, 3> counts = apportion(static_cast<int64_t>(ids.size()), ratios);
    size_t at = 0;
    for (int s = 0; s < 3; ++s)
        for (int64_t i = 0; i < counts[static_cast<size_t>(s)]; ++i)
            out[ids[at++]] = static_cast<Split>(s);
}

}  // namespace

SplitAssignment split_cohort(const Cohort& cohort, SplitRatios ratios, uint64_t seed,
                             bool stratify) {
    double sum = ratios.train + ratios.validation + ratios.test;
    if (std::abs(sum - 1.0) > 1e-9)
        throw ConfigError("split ratios must sum to 1, got " + std::to_string(sum));
    std::vector<std::string> ids = cohort.patient_ids();
    if (ids.size() < 3) throw ConfigError("cannot split a cohort of fewer than 3 patients");

    SplitAssignment assign;
    assign.seed = seed;
    Rng rng(mix_seed(seed, "split_cohort"));
    if (!stratify) {
        assign_group(std::move(ids), ratios, rng, assign.by_patient);
        return assign;
    }

    // Stratum = (surgery_type, label) of the patient's earliest surgery.
    std::unordered_map<std::string, const CohortMember*> first;
    for (const CohortMember& m : cohort.members) {
        auto [it, inserted] = first.try_emplace(m.surgery.patient_id, &m);
        if (!inserted && m.surgery.surgery_date < it->second->surgery.surgery_date)
            it->second = &m;
    }
    std::map<std::pair<int, int>, std::vector<std::string>> strata;
    for (const std::string& id : ids) {
        const CohortMember* m = first.at(id);
        strata[{static_cast<int>(m->surgery.surgery_type), m->label.positive ? 1 : 0}].push_back(
            id);
    }
    for (auto& [key, group] : strata) assign_group(std::move(group), ratios, rng, assign.by_patient);
    return assign;
}

namespace {

// Linearly interpolated quantile (the common statistical-software default).
double quantile(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) return 0.0;
    if (sorted.size() == 1) return sorted[0];
    double h = p * static_cast<double>(sorted.size() - 1);
    size_t lo = static_cast<size_t>(std::floor(h));
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + (h - std::floor(h)) * (sorted[lo + 1] - sorted[lo]);
}

AgeStats age_stats(std::vector<double> ages) {
    AgeStats st;
    if (ages.empty()) return st;
    std::sort(ages.begin(), ages.end());
    st.min = ages.front();
    st.max = ages.back();
    st.q1 = quantile(ages, 0.25);
    st.median = quantile(ages, 0.50);
    st.q3 = quantile(ages, 0.75);
    double sum = 0;
    for (double a : ages) sum += a;
    st.mean = sum / static_cast<double>(ages.size());
    return st;
}

}  // namespace

DemographicSummary demographic_summary(const Corpus& corpus, const Cohort& cohort,
                                       const SplitAssignment& split) {
    // Patient counted once, at the age of their earliest surgery.
    std::unordered_map<std::string, const CohortMember*> first;
    for (const CohortMember& m : cohort.members) {
        auto [it, inserted] = first.try_emplace(m.surgery.patient_id, &m);
        if (!inserted && m.surgery.surgery_date < it->second->surgery.surgery_date)
            it->second = &m;
    }

    DemographicSummary summary;
    std::array<std::array<std::vector<double>, 2>, 3> ages;
    for (const auto& [pid, member] : first) {
        const Patient* p = corpus.find_patient(pid);
        if (!p || p->sex == Sex::other) continue;
        size_t si = static_cast<size_t>(split.of(pid));
        size_t xi = p->sex == Sex::female ? 0 : 1;
        DemographicCell& cell = summary.cells[si][xi];
        ++cell.n;
        ++cell.race_counts[static_cast<size_t>(p->race)];
        ages[si][xi].push_back(static_cast<double>(member->surgery.age_at_surgery));
    }
    for (size_t si = 0; si < 3; ++si)
        for (size_t xi = 0; xi < 2; ++xi)
            summary.cells[si][xi].age = age_stats(std::move(ages[si][xi]));
    return summary;
}

std::string DemographicSummary::render() const {
    auto pct = [](int64_t part, int64_t whole) {
        return whole == 0 ? 0.0 : 100.0 * static_cast<double>(part) / static_cast<double>(whole);
    };
    std::string out;
    char buf[256];
    out += "group                 train/F    train/M    valid/F    valid/M     test/F     test/M\n";
    auto row = [&](const std::string& name, auto value) {
        std::snprintf(buf, sizeof buf, "%-18s", name.c_str());
        out += buf;
        for (size_t si = 0; si < 3; ++si)
            for (size_t xi = 0; xi < 2; ++xi) {
                std::snprintf(buf, sizeof buf, " %10s", value(cells[si][xi]).c_str());
                out += buf;
            }
        out += '\n';
    };
    auto fmt = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.2f", v);
        return std::string(buf);
    };
    row("n", [&](const DemographicCell& c) { return std::to_string(c.n); });
    row("age.min", [&](const DemographicCell& c) { return fmt(c.age.min); });
    row("age.q1", [&](const DemographicCell& c) { return fmt(c.age.q1); });
    row("age.median", [&](const DemographicCell& c) { return fmt(c.age.median); });
    row("age.mean", [&](const DemographicCell& c) { return fmt(c.age.mean); });
    row("age.q3", [&](const DemographicCell& c) { return fmt(c.age.q3); });
    row("age.max", [&](const DemographicCell& c) { return fmt(c.age.max); });
    for (int r = 0; r < 5; ++r) {
        std::string name = "race." + std::string(to_string(static_cast<Race>(r)));
        row(name, [&](const DemographicCell& c) {
            std::snprintf(buf, sizeof buf, "%.1f%%", pct(c.race_counts[static_cast<size_t>(r)], c.n));
            return std::string(buf);
        });
    }
    return out;
}

std::string render_funnel(const ExclusionTally& t) {
    std::string out;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "surgeries: input=%lld deceased=%lld under_age=%lld over_age=%lld "
                  "no_notes=%lld included=%lld\n",
                  static_cast<long long>(t.input_surgeries), static_cast<long long>(t.deceased),
                  static_cast<long long>(t.under_age), static_cast<long long>(t.over_age),
                  static_cast<long long>(t.no_notes), static_cast<long long>(t.included));
    out += buf;
    std::snprintf(buf, sizeof buf, "patients:  input=%lld after_vitality=%lld included=%lld\n",
                  static_cast<long long>(t.patients_input),
                  static_cast<long long>(t.patients_after_vitality),
                  static_cast<long long>(t.patients_included));
    out += buf;
    return out;
}

}  // namespace wb::ehr
