#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "windowbench/dates.hpp"

namespace wb::ehr {

enum class Sex { female, male, other };
enum class Race { white, black, asian, hispanic, other };
enum class Setting { inpatient, outpatient };
enum class IcdVersion { icd9, icd10 };
enum class SurgeryType { hip, knee };
enum class Split { train, validation, test };

std::string_view to_string(Sex s);
std::string_view to_string(Race r);
std::string_view to_string(Setting s);
std::string_view to_string(IcdVersion v);
std::string_view to_string(SurgeryType t);
std::string_view to_string(Split s);

struct Patient {
    std::string patient_id;
    Date birth_date;
    Sex sex = Sex::other;
    Race race = Race::other;
    std::optional<Date> death_date;
    std::map<std::string, std::string> demographics;  // education, language, ...
};

struct Diagnosis {
    std::string code;
    IcdVersion version = IcdVersion::icd10;
};

struct Medication {
    std::string name;
    std::string code;
    double dose = 0.0;
    std::string unit;
};

struct Lab {
    std::string code;
    std::optional<double> value;
    std::string unit;
};

struct Vital {
    std::string code;
    double value = 0.0;
    std::string unit;
};

struct Encounter {
    std::string encounter_id;
    std::string patient_id;
    Date admit_date;
    std::optional<Date> discharge_date;
    Setting setting = Setting::outpatient;
    std::vector<std::string> cpt_codes;
    std::vector<Diagnosis> diagnoses;
    std::vector<Medication> medications;
    std::vector<Lab> labs;
    std::vector<Vital> vitals;
    std::map<std::string, std::string> admission_info;  // payer, drg, disposition, ...
};

struct ClinicalNote {
    std::string note_id;
    std::string patient_id;
    Date date;
    std::string text;
};

struct SurgeryEvent {
    std::string patient_id;
    std::string encounter_id;
    Date surgery_date;  // admit date of the qualifying encounter
    SurgeryType surgery_type = SurgeryType::hip;
    int age_at_surgery = 0;

    // Unique per (encounter, type): tie-rule encounters emit one event per type.
    std::string event_id() const;
};

struct Label {
    bool positive = false;
    std::optional<std::string> readmit_encounter_id;
};

// Time-slice policy. months(m) admits [surgery_date - 30*m days, surgery_date];
// day_of_surgery admits exactly surgery_date; history_only admits everything
// strictly before surgery_date.
struct ObservationWindow {
    enum class Kind { history_only, day_of_surgery, months };
    Kind kind = Kind::day_of_surgery;
    int m = 0;  // meaningful only for Kind::months, and then >= 1

    static ObservationWindow history_only() { return {Kind::history_only, 0}; }
    static ObservationWindow day_of_surgery() { return {Kind::day_of_surgery, 0}; }
    static ObservationWindow months(int m);

    bool admits(Date item_date, Date surgery_date) const;

    // Serialized as the sweep-table column headers: "history", "0", "3", ...
    std::string name() const;
    static ObservationWindow parse(std::string_view name);

    friend bool operator==(const ObservationWindow&, const ObservationWindow&) = default;
};

struct WindowedRecord {
    SurgeryEvent surgery;
    std::vector<ClinicalNote> notes;       // date-ordered, stable tie order
    std::vector<Encounter> encounters;     // date-ordered, stable tie order
    ObservationWindow window;
};

struct SplitAssignment {
    std::map<std::string, Split> by_patient;
    uint64_t seed = 0;

    Split of(const std::string& patient_id) const;
};

struct Corpus {
    std::vector<Patient> patients;
    std::vector<Encounter> encounters;
    std::vector<ClinicalNote> notes;
    std::vector<std::string> warnings;  // dangling references etc.

    // Rebuilds the per-patient lookup tables; call after mutating the vectors.
    void reindex();

    const Patient* find_patient(const std::string& patient_id) const;
    // File order preserved, so downstream date sorts keep a stable tie order.
    std::vector<const Encounter*> encounters_of(const std::string& patient_id) const;
    std::vector<const ClinicalNote*> notes_of(const std::string& patient_id) const;

private:
    std::unordered_map<std::string, size_t> patient_by_id_;
    std::unordered_map<std::string, std::vector<size_t>> encounters_by_patient_;
    std::unordered_map<std::string, std::vector<size_t>> notes_by_patient_;
};

struct CohortCriteria {
    int min_age = 18;
    int max_age = 90;
    bool exclude_deceased = true;
    bool require_notes = true;
    std::vector<std::string> variable_blacklist;  // field names dropped at ingestion

    static CohortCriteria defaults();
};

// Field names dropped by default: variables that are predominantly missing in
// typical EHR extracts carry no usable signal. Config-overridable.
const std::vector<std::string>& default_variable_blacklist();

struct ExclusionTally {
    // Surgery-level: each surgery is tallied under the first criterion it fails.
    int64_t input_surgeries = 0;
    int64_t deceased = 0;
    int64_t under_age = 0;
    int64_t over_age = 0;
    int64_t no_notes = 0;
    int64_t included = 0;
    // Patient-level funnel: input -> after deceased/age stage -> after note stage.
    int64_t patients_input = 0;
    int64_t patients_after_vitality = 0;
    int64_t patients_included = 0;
};

struct CohortMember {
    SurgeryEvent surgery;
    Label label;
};

struct Cohort {
    std::vector<CohortMember> members;
    ExclusionTally tally;

    std::vector<std::string> patient_ids() const;  // unique, sorted
};

}  // namespace wb::ehr
