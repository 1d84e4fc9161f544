#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "windowbench/ehr/types.hpp"

namespace wb::ehr {

struct CptSets {
    std::vector<std::string> hip;
    std::vector<std::string> knee;

    static CptSets defaults();
};

// Encounters carrying codes from both sets are classified by this rule;
// "both" emits one event per type so each task sees the example.
enum class CptTieRule { both, hip_only, knee_only };

std::vector<SurgeryEvent> identify_surgeries(const Corpus& corpus, const CptSets& cpt,
                                             CptTieRule tie_rule = CptTieRule::both);

// Positive iff some inpatient encounter other than the index has admit_date in
// (surgery_date, surgery_date + horizon_days].
Label assign_label(const SurgeryEvent& surgery, std::span<const Encounter* const> encounters,
                   int horizon_days = 30);

// Applies criteria in funnel order (deceased, age bounds, note requirement),
// tallying the first failed criterion per surgery, then labels survivors.
Cohort build_cohort(const Corpus& corpus, std::span<const SurgeryEvent> surgeries,
                    const CohortCriteria& criteria, int label_horizon_days = 30);

WindowedRecord slice_window(const Corpus& corpus, const SurgeryEvent& surgery,
                            ObservationWindow window);

struct SplitRatios {
    double train = 0.70;
    double validation = 0.15;
    double test = 0.15;
};

// Patient-level assignment: per-split counts are floor(ratio*N) with the
// remainder going to the splits with the largest fractional parts; membership
// is decided by a seeded shuffle. stratify groups patients by the
// (surgery_type, label) of their earliest surgery and apportions each group
// the same way, keeping per-split prevalence near the global value.
SplitAssignment split_cohort(const Cohort& cohort, SplitRatios ratios, uint64_t seed,
                             bool stratify = false);

struct AgeStats {
    double min = 0, q1 = 0, median = 0, mean = 0, q3 = 0, max = 0;
};

struct DemographicCell {
    int64_t n = 0;
    AgeStats age;
    std::array<int64_t, 5> race_counts{};  // indexed by Race
};

struct DemographicSummary {
    // [split][sex], sexes female/male; patients of other sex are counted in
    // totals but not given a column, mirroring the two-column table layout.
    std::array<std::array<DemographicCell, 2>, 3> cells;

    std::string render() const;
};

DemographicSummary demographic_summary(const Corpus& corpus, const Cohort& cohort,
                                       const SplitAssignment& split);

std::string render_funnel(const ExclusionTally& tally);

}  // namespace wb::ehr
