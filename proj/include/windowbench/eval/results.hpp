#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "windowbench/ehr/types.hpp"

namespace wb::eval {

enum class Mode { independent, multitask };
enum class DataSource { notes, structured, both };

std::string_view to_string(Mode m);
Mode parse_mode(std::string_view name);
std::string_view to_string(DataSource s);
DataSource parse_data_source(std::string_view name);

// AUROC values are rounded to 9 decimals when a row is created, so printing
// with nine digits and parsing back is lossless.
double quantize9(double x);
std::string fmt9(double x);

struct ResultRow {
    ehr::SurgeryType task = ehr::SurgeryType::hip;
    Mode mode = Mode::independent;
    DataSource source = DataSource::notes;
    std::string model_id;
    ehr::ObservationWindow window;
    ehr::Split split = ehr::Split::validation;
    double auroc = 0.0;  // meaningful only when converged
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    int64_t n_pos = 0;
    int64_t n_neg = 0;
    bool converged = false;
    uint64_t seed = 0;
};

struct ResultsTable {
    std::vector<ResultRow> rows;
};

// Full-row CSV, exact column order:
// task,mode,data_source,model_id,window,split,auroc,ci_lo,ci_hi,n_pos,n_neg,
// converged,seed,wall_ms. Non-converged rows render auroc/ci_lo/ci_hi as
// "--". wall_ms is written as 0 so identical runs stay byte-identical;
// measured times go to the log instead.
void write_results_csv(const ResultsTable& results, const std::filesystem::path& path);
ResultsTable parse_results_csv(const std::filesystem::path& path);

// One model x window grid for a (source, mode, task, split) group.
struct PivotTable {
    DataSource source = DataSource::notes;
    Mode mode = Mode::independent;
    ehr::SurgeryType task = ehr::SurgeryType::hip;
    ehr::Split split = ehr::Split::validation;
    std::vector<ehr::ObservationWindow> windows;  // canonical order
    std::vector<std::string> model_ids;           // first-appearance order
    struct Cell {
        bool present = false;
        bool converged = false;
        double auroc = 0.0;
    };
    std::vector<std::vector<Cell>> cells;  // [model][window]

    std::string filename() const;  // e.g. "notes_independent_hip_validation.csv"
};

std::vector<PivotTable> build_pivots(const ResultsTable& results);
void write_pivot_csv(const PivotTable& pivot, const std::filesystem::path& path);
PivotTable parse_pivot_csv(const std::filesystem::path& path);

// Writes results.csv, tables/<group>.csv pivots, fig3_series.csv (per-window
// mean over converged variants with a mean +/- 1.96*sd/sqrt(k) band), and
// fig4_best.csv (per-window best converged variant).
void emit_report(const ResultsTable& results, const std::filesystem::path& out_dir);

// Day-of-surgery vs +3-months comparison over the test split: per
// (source, task), the best converged AUROC across models and modes for each
// of the two windows, with the larger value flagged (ties flag both).
struct DayVsHistoryRow {
    DataSource source = DataSource::notes;
    ehr::SurgeryType task = ehr::SurgeryType::hip;
    double day0 = 0.0;
    double months3 = 0.0;
    std::string best_model_day0;
    std::string best_model_months3;
    bool flag_day0 = false;
    bool flag_months3 = false;
};

struct DayVsHistoryTable {
    std::vector<DayVsHistoryRow> rows;  // sources x tasks, fixed order

    std::string render() const;
};

DayVsHistoryTable compare_day_vs_history(const ResultsTable& results);
void write_day_vs_history_csv(const DayVsHistoryTable& table,
                              const std::filesystem::path& path);

}  // namespace wb::eval
