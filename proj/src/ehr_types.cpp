#include "windowbench/ehr/types.hpp"

#include <algorithm>
#include <unordered_map>

#include "windowbench/error.hpp"

namespace wb::ehr {

std::string_view to_string(Sex s) {
    switch (s) {
        case Sex::female: return "female";
        case Sex::male: return "male";
        default: return "other";
    }
}

std::string_view to_string(Race r) {
    switch (r) {
        case Race::white: return "white";
        case Race::black: return "black";
        case Race::asian: return "asian";
        case Race::hispanic: return "hispanic";
        default: return "other";
    }
}

std::string_view to_string(Setting s) {
    return s == Setting::inpatient ? "inpatient" : "outpatient";
}

std::string_view to_string(IcdVersion v) { return v == IcdVersion::icd9 ? "icd9" : "icd10"; }

std::string_view to_string(SurgeryType t) { return t == SurgeryType::hip ? "hip" : "knee"; }

std::string_view to_string(Split s) {
    switch (s) {
        case Split::train: return "train";
        case Split::validation: return "validation";
        default: return "test";
    }
}

std::string SurgeryEvent::event_id() const {
    return encounter_id + ":" + std::string(to_string(surgery_type));
}

ObservationWindow ObservationWindow::months(int m) {
    if (m < 1) throw InvariantError("months window requires m >= 1");
    return {Kind::months, m};
}

bool ObservationWindow::admits(Date item_date, Date surgery_date) const {
    switch (kind) {
        case Kind::history_only: return item_date < surgery_date;
        case Kind::day_of_surgery: return item_date == surgery_date;
        case Kind::months:
            return surgery_date - 30 * m <= item_date && item_date <= surgery_date;
    }
    return false;
}

std::string ObservationWindow::name() const {
    switch (kind) {
        case Kind::history_only: return "history";
        case Kind::day_of_surgery: return "0";
        case Kind::months: return std::to_string(m);
    }
    return {};
}

ObservationWindow ObservationWindow::parse(std::string_view name) {
    if (name == "history") return history_only();
    if (name == "0") return day_of_surgery();
    int m = 0;
    for (char c : name) {
        if (c < '0' || c > '9') throw ConfigError("bad window name: " + std::string(name));
        m = m * 10 + (c - '0');
    }
    if (m < 1) throw ConfigError("bad window name: " + std::string(name));
    return months(m);
}

void Corpus::reindex() {
    patient_by_id_.clear();
    encounters_by_patient_.clear();
    notes_by_patient_.clear();
    for (size_t i = 0; i < patients.size(); ++i) patient_by_id_[patients[i].patient_id] = i;
    for (size_t i = 0; i < encounters.size(); ++i)
        encounters_by_patient_[encounters[i].patient_id].push_back(i);
    for (size_t i = 0; i < notes.size(); ++i) notes_by_patient_[notes[i].patient_id].push_back(i);
}

const Patient* Corpus::find_patient(const std::string& patient_id) const {
    auto it = patient_by_id_.find(patient_id);
    return it == patient_by_id_.end() ? nullptr : &patients[it->second];
}

std::vector<const Encounter*> Corpus::encounters_of(const std::string& patient_id) const {
    std::vector<const Encounter*> out;
    if (auto it = encounters_by_patient_.find(patient_id); it != encounters_by_patient_.end()) {
        out.reserve(it->second.size());
        for (size_t i : it->second) out.push_back(&encounters[i]);
    }
    return out;
}

std::vector<const ClinicalNote*> Corpus::notes_of(const std::string& patient_id) const {
    std::vector<const ClinicalNote*> out;
    if (auto it = notes_by_patient_.find(patient_id); it != notes_by_patient_.end()) {
        out.reserve(it->second.size());
        for (size_t i : it->second) out.push_back(&notes[i]);
    }
    return out;
}

Split SplitAssignment::of(const std::string& patient_id) const {
    auto it = by_patient.find(patient_id);
    if (it == by_patient.end())
        throw InvariantError("patient missing from split assignment: " + patient_id);
    return it->second;
}

CohortCriteria CohortCriteria::defaults() {
    return CohortCriteria{18, 90, true, true, default_variable_blacklist()};
}

std::vector<std::string> Cohort::patient_ids() const {
    std::vector<std::string> ids;
    ids.reserve(members.size());
    for (const CohortMember& m : members) ids.push_back(m.surgery.patient_id);
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

const std::vector<std::string>& default_variable_blacklist() {
    static const std::vector<std::string> names = {
    "AAA (Abdominal Aortic Aneurysm) Screening",
    "ANA Screen",
    "Albumin/creatinine ratio",
    "Alcohol Drinks Per Week",
    "Alcohol Oz Per Week",
    "Alcohol Use Screening",
    "Amino Acids",
    "Amino Acids, urine",
    "Antibody Screen",
    "Antiphospholipid Antibodies",
    "Antiphospholipid Antibody",
    "Auto-Antibodies",
    "B12 injection",
    "Blood Gases/Oximetry",
    "Blood Pressure-LFA1162",
    "Blood Type",
    "Body Surface Area (BSA)",
    "Bone Marrow Stain",
    "Bone density",
    "Breast Exam",
    "Breast Exam - LHA3537",
    "Breast Exam - LHA4003",
    "Breast Exam Instruction",
    "CRYOs",
    "CSF Chemistries",
    "CSF Counts and Diff",
    "CSF/Fluid, Other",
    "Calcium Requirements Recommendation",
    "Carnitine, serum",
    "Carnitine, urine",
    "Chlamydia",
    "Cholesterol",
    "Cholesterol-HDL",
    "Cholesterol-LDL",
    "Cigarettes",
    "Coagulation Factor Studies",
    "Colonoscopy",
    "Complement",
    "Complete Physical Exam",
    "Condoms",
    "Creatinine",
    "Cystic Fibrosis Carrier",
    "DNA Diagnostic Tests",
    "DPT",
    "DS Glucose",
    "Dental Exams",
    "Depo-provera Shot",
    "Diet",
    "Diphtheria and Tetanus booster (DT booster)",
    "Domestic Violence Screening",
    "Drug Use Screening",
    "Drugs A-E",
    "Drugs F-N",
    "Drugs O-Z",
    "EGD (upper GI endoscopy)",
    "EKG",
    "Echocardiogram",
    "Exercise Advice",
    "FEV1-pre (Pre-Forced Expiratory Volume)",
    "FVC-pre (Pre-Forced Vital Capacity)",
    "Fetal Activity",
    "Fluid Chemistries",
    "Fluid Counts and Diff",
    "Folic Acid Recommendation",
    "Foot exam",
    "Functional Status Screen",
    "GFR (estimated)",
    "Glucose",
    "Gonorrhea",
    "HCG (Human Chorionic Gonadotropin)",
    "HCV Ab-LHA3507",
    "HIVx",
    "Haemophilus Influenzae type B (HIB)",
    "Hand Gun Counseling",
    "HbA1c (Hemoglobin A1c)",
    "Hct (Hematocrit)",
    "Head Circumference",
    "Hearing",
    "Hemocult x 3",
    "Hemoglobin Electrophoresis",
    "Hepatitis A vaccine (Hep A vac)",
    "Hepatitis B vaccine (Hep B vac)",
    "Hgb (Hemoglobin)",
    "HgbA1C",
    "Home Hemocult",
    "Home glucose monitoring",
    "Hypercoagulation Studies",
    "Hypoglycemia Assessment/Counseling",
    "INR Result",
    "Immune globulin",
    "Inhibitors",
    "Japanese encephalitis",
    "KPS (Karnofsky performance status)",
    "Liver - AST",
    "Liver - Alkaline Phosphatase",
    "Liver - Total Bilirubin",
    "Liver ALT",
    "Lyme",
    "Lyme vaccine",
    "Lymph - % Difference",
    "Lymph - Left Arm Volume",
    "Lymph - Right Arm Volume",
    "Mammogram",
    "Measles, Mumps, Rubella (MMR)",
    "Medicare Annual Wellness Visit",
    "Meningococcal vaccine",
    "Microalbumin",
    "Nutrition Referral",
    "O2 Saturation - LFA15000",
    "O2 Saturation - LFA15000.1",
    "O2 Saturation - LFA12575",
    "O2 Saturation - LFA38131",
    "O2 Saturation - LFA38132",
    "O2 Saturation - LFA4826",
    "O2 Saturation - LFA4828",
    "O2 Saturation - LFA5392",
    "O2 Saturation - SPO2",
    "OPV / IPV",
    "On Oxygen?",
    "Ophthalmology Exam",
    "Organic Acids, urine",
    "PSA",
    "Pain 0-10",
    "Pain Assessment",
    "Pain Scale (0-10)",
    "Pain Score",
    "Pap Smear",
    "Peak Flow",
    "Peak Flow - LHA4483",
    "Pelvic Exam",
    "Personal Best Peak Flow",
    "Platelet Aggregation",
    "Platelet Antibodies",
    "Pneumovax",
    "Podiatry exam",
    "Positive Antibody Screen",
    "Pregnancy Weight",
    "Prepregnancy Height",
    "Prepregnancy Weight",
    "Principal ICD Procedure CD",
    "Prostate exam",
    "Rabies",
    "Rabies immune globulin",
    "Rapid Strep",
    "Rectal Exam",
    "Rh Factor",
    "Routine Serology",
    "Safe Sexual Practice Counseling",
    "Seat belt counseling",
    "Second hand smoke exposure",
    "Sigmoidoscopy",
    "Smoking Quit Date",
    "Smoking Start Date",
    "Special Coagulation Interp",
    "Stool Guaiac - 3",
    "Stool Guaiac-LHA4072",
    "T-cell Subsets",
    "TSH-LHA18009",
    "Testicular Exam",
    "Testicular Exam Instruction",
    "Tetanus, Diphtheria, acellular Pertussis vaccine",
    "Tobacco Pack Per Day",
    "Tobacco Used Years",
    "Toxicology",
    "Triglycerides",
    "Trisomy 21",
    "Tuberculin purified protein derivative",
    "Typhoid",
    "UA-Protein",
    "Urine Chemistries",
    "Urine Chemistries Timed",
    "Urine Chemistries Unspec",
    "Urine Culture",
    "Urine Dip-LHA4935",
    "Urine Glucose",
    "Urine Protein",
    "Urine Toxicology",
    "VAS score",
    "Varicella",
    "Vision",
    "Vision-Left Eye",
    "Vision-Right Eye",
    "Vitamin D (25 OH)",
    "Weight Management",
    "Yellow fever",
    };
    return names;
}

}  // namespace wb::ehr
