#include "windowbench/eval/results.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "windowbench/error.hpp"

namespace wb::eval {

namespace fs = std::filesystem;

std::string_view to_string(Mode m) {
    return m == Mode::independent ? "independent" : "multitask";
}

Mode parse_mode(std::string_view name) {
    if (name == "independent") return Mode::independent;
    if (name == "multitask") return Mode::multitask;
    throw ConfigError("unknown mode '" + std::string(name) + "'");
}

std::string_view to_string(DataSource s) {
    switch (s) {
        case DataSource::notes: return "notes";
        case DataSource::structured: return "structured";
        default: return "both";
    }
}

DataSource parse_data_source(std::string_view name) {
    if (name == "notes") return DataSource::notes;
    if (name == "structured") return DataSource::structured;
    if (name == "both") return DataSource::both;
    throw ConfigError("unknown data source '" + std::string(name) + "'");
}

double quantize9(double x) { return std::round(x * 1e9) / 1e9; }

std::string fmt9(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9f", x);
    return buf;
}

namespace {

ehr::SurgeryType parse_task(std::string_view name) {
    if (name == "hip") return ehr::SurgeryType::hip;
    if (name == "knee") return ehr::SurgeryType::knee;
    throw ConfigError("unknown task '" + std::string(name) + "'");
}

ehr::Split parse_split(std::string_view name) {
    if (name == "train") return ehr::Split::train;
    if (name == "validation") return ehr::Split::validation;
    if (name == "test") return ehr::Split::test;
    throw ConfigError("unknown split '" + std::string(name) + "'");
}

void validate_row(const ResultRow& row) {
    if (row.model_id.empty() || row.model_id.find(',') != std::string::npos)
        throw InvariantError("results: bad model_id '" + row.model_id + "'");
    if (row.converged) {
        if (!(row.auroc >= 0.0 && row.auroc <= 1.0))
            throw InvariantError("results: auroc outside [0,1] for " + row.model_id);
        if (!(row.ci_lo <= row.auroc && row.auroc <= row.ci_hi))
            throw InvariantError("results: CI does not bracket auroc for " + row.model_id);
    }
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    size_t start = 0;
    while (true) {
        size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

double parse_double(const std::string& s, const std::string& what) {
    try {
        size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("results: cannot parse " + what + " from '" + s + "'");
    }
}

int64_t parse_i64(const std::string& s, const std::string& what) {
    try {
        size_t used = 0;
        int64_t v = std::stoll(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("results: cannot parse " + what + " from '" + s + "'");
    }
}

uint64_t parse_u64(const std::string& s, const std::string& what) {
    try {
        size_t used = 0;
        uint64_t v = std::stoull(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("results: cannot parse " + what + " from '" + s + "'");
    }
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open '" + path.string() + "' for writing");
    return out;
}

// history < day-of-surgery < months ascending, the table column order.
bool window_less(const ehr::ObservationWindow& a, const ehr::ObservationWindow& b) {
    auto key = [](const ehr::ObservationWindow& w) {
        switch (w.kind) {
            case ehr::ObservationWindow::Kind::history_only: return -1;
            case ehr::ObservationWindow::Kind::day_of_surgery: return 0;
            default: return w.m;
        }
    };
    return key(a) < key(b);
}

constexpr std::string_view kResultsHeader =
    "task,mode,data_source,model_id,window,split,auroc,ci_lo,ci_hi,n_pos,n_neg,"
    "converged,seed,wall_ms";

}  // namespace

void write_results_csv(const ResultsTable& results, const fs::path& path) {
    std::ofstream out = open_out(path);
    out << kResultsHeader << "\n";
    for (const ResultRow& row : results.rows) {
        validate_row(row);
        out << to_string(row.task) << ',' << to_string(row.mode) << ','
            << to_string(row.source) << ',' << row.model_id << ',' << row.window.name() << ','
            << to_string(row.split) << ',';
        if (row.converged)
            out << fmt9(row.auroc) << ',' << fmt9(row.ci_lo) << ',' << fmt9(row.ci_hi);
        else
            out << "--,--,--";
        out << ',' << row.n_pos << ',' << row.n_neg << ','
            << (row.converged ? "true" : "false") << ',' << row.seed << ",0\n";
    }
    if (!out) throw ConfigError("write failed for '" + path.string() + "'");
}

ResultsTable parse_results_csv(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line) || line != kResultsHeader)
        throw ConfigError("'" + path.string() + "' does not start with the results header");
    ResultsTable table;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> f = split_fields(line);
        if (f.size() != 14)
            throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected 14 fields, got " +
                              std::to_string(f.size()));
        ResultRow row;
        row.task = parse_task(f[0]);
        row.mode = parse_mode(f[1]);
        row.source = parse_data_source(f[2]);
        row.model_id = f[3];
        row.window = ehr::ObservationWindow::parse(f[4]);
        row.split = parse_split(f[5]);
        bool dashes = f[6] == "--" || f[7] == "--" || f[8] == "--";
        row.converged = f[11] == "true";
        if (f[11] != "true" && f[11] != "false")
            throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": bad converged flag '" +
                              f[11] + "'");
        if (row.converged == dashes)
            throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                              ": converged flag disagrees with '--' markers");
        if (row.converged) {
            row.auroc = parse_double(f[6], "auroc");
            row.ci_lo = parse_double(f[7], "ci_lo");
            row.ci_hi = parse_double(f[8], "ci_hi");
        }
        row.n_pos = parse_i64(f[9], "n_pos");
        row.n_neg = parse_i64(f[10], "n_neg");
        row.seed = parse_u64(f[12], "seed");
        parse_i64(f[13], "wall_ms");
        validate_row(row);
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::string PivotTable::filename() const {
    std::string name;
    name += to_string(source);
    name += '_';
    name += to_string(mode);
    name += '_';
    name += to_string(task);
    name += '_';
    name += to_string(split);
    name += ".csv";
    return name;
}

std::vector<PivotTable> build_pivots(const ResultsTable& results) {
    std::vector<PivotTable> pivots;
    auto group_of = [&](const ResultRow& row) -> PivotTable& {
        for (PivotTable& p : pivots)
            if (p.source == row.source && p.mode == row.mode && p.task == row.task &&
                p.split == row.split)
                return p;
        PivotTable p;
        p.source = row.source;
        p.mode = row.mode;
        p.task = row.task;
        p.split = row.split;
        pivots.push_back(std::move(p));
        return pivots.back();
    };

    // First pass fixes each group's axes, second pass fills cells.
    for (const ResultRow& row : results.rows) {
        PivotTable& p = group_of(row);
        if (std::find(p.windows.begin(), p.windows.end(), row.window) == p.windows.end())
            p.windows.push_back(row.window);
        if (std::find(p.model_ids.begin(), p.model_ids.end(), row.model_id) ==
            p.model_ids.end())
            p.model_ids.push_back(row.model_id);
    }
    for (PivotTable& p : pivots) {
        std::sort(p.windows.begin(), p.windows.end(), window_less);
        p.cells.assign(p.model_ids.size(),
                       std::vector<PivotTable::Cell>(p.windows.size()));
    }
    for (const ResultRow& row : results.rows) {
        PivotTable& p = group_of(row);
        auto mi = static_cast<size_t>(
            std::find(p.model_ids.begin(), p.model_ids.end(), row.model_id) -
            p.model_ids.begin());
        auto wi = static_cast<size_t>(
            std::find(p.windows.begin(), p.windows.end(), row.window) - p.windows.begin());
        PivotTable::Cell& cell = p.cells[mi][wi];
        if (cell.present)
            throw InvariantError("results: duplicate cell " + row.model_id + " x " +
                                 row.window.name() + " in group " + p.filename());
        cell.present = true;
        cell.converged = row.converged;
        cell.auroc = row.auroc;
    }
    return pivots;
}

void write_pivot_csv(const PivotTable& pivot, const fs::path& path) {
    std::ofstream out = open_out(path);
    out << "model_id";
    for (const ehr::ObservationWindow& w : pivot.windows) out << ',' << w.name();
    out << "\n";
    for (size_t mi = 0; mi < pivot.model_ids.size(); ++mi) {
        out << pivot.model_ids[mi];
        for (size_t wi = 0; wi < pivot.windows.size(); ++wi) {
            const PivotTable::Cell& cell = pivot.cells[mi][wi];
            out << ',';
            if (!cell.present)
                ;  // absent cell stays empty
            else if (!cell.converged)
                out << "--";
            else
                out << fmt9(cell.auroc);
        }
        out << "\n";
    }
    if (!out) throw ConfigError("write failed for '" + path.string() + "'");
}

PivotTable parse_pivot_csv(const fs::path& path) {
    std::string stem = path.stem().string();
    std::vector<std::string> parts;
    {
        std::stringstream ss(stem);
        std::string part;
        while (std::getline(ss, part, '_')) parts.push_back(part);
    }
    if (parts.size() != 4)
        throw ConfigError("pivot filename '" + stem +
                          "' is not <source>_<mode>_<task>_<split>");
    PivotTable p;
    p.source = parse_data_source(parts[0]);
    p.mode = parse_mode(parts[1]);
    p.task = parse_task(parts[2]);
    p.split = parse_split(parts[3]);

    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line))
        throw ConfigError("'" + path.string() + "' is empty");
    std::vector<std::string> header = split_fields(line);
    if (header.empty() || header[0] != "model_id")
        throw ConfigError("'" + path.string() + "' header must start with model_id");
    for (size_t i = 1; i < header.size(); ++i)
        p.windows.push_back(ehr::ObservationWindow::parse(header[i]));

    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> f = split_fields(line);
        if (f.size() != header.size())
            throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                              ": expected " + std::to_string(header.size()) + " fields");
        p.model_ids.push_back(f[0]);
        std::vector<PivotTable::Cell> row(p.windows.size());
        for (size_t wi = 0; wi < p.windows.size(); ++wi) {
            const std::string& v = f[wi + 1];
            if (v.empty()) continue;
            row[wi].present = true;
            if (v == "--") continue;
            row[wi].converged = true;
            row[wi].auroc = parse_double(v, "auroc");
        }
        p.cells.push_back(std::move(row));
    }
    return p;
}

namespace {

struct SeriesKey {
    ehr::SurgeryType task;
    Mode mode;
    DataSource source;
    ehr::ObservationWindow window;
    ehr::Split split;

    bool operator==(const SeriesKey&) const = default;
};

void write_fig3(const ResultsTable& results, const fs::path& path) {
    std::ofstream out = open_out(path);
    out << "task,mode,data_source,window,split,k,mean_auroc,band_lo,band_hi\n";
    std::vector<SeriesKey> keys;
    for (const ResultRow& row : results.rows) {
        SeriesKey key{row.task, row.mode, row.source, row.window, row.split};
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
    }
    for (const SeriesKey& key : keys) {
        std::vector<double> aurocs;
        for (const ResultRow& row : results.rows)
            if (SeriesKey{row.task, row.mode, row.source, row.window, row.split} == key &&
                row.converged)
                aurocs.push_back(row.auroc);
        out << to_string(key.task) << ',' << to_string(key.mode) << ','
            << to_string(key.source) << ',' << key.window.name() << ','
            << to_string(key.split) << ',' << aurocs.size() << ',';
        if (aurocs.empty()) {
            out << "--,--,--\n";
            continue;
        }
        double mean = 0.0;
        for (double a : aurocs) mean += a;
        mean /= static_cast<double>(aurocs.size());
        double sd = 0.0;
        if (aurocs.size() > 1) {
            for (double a : aurocs) sd += (a - mean) * (a - mean);
            sd = std::sqrt(sd / static_cast<double>(aurocs.size() - 1));
        }
        double half = 1.96 * sd / std::sqrt(static_cast<double>(aurocs.size()));
        out << fmt9(quantize9(mean)) << ',' << fmt9(quantize9(mean - half)) << ','
            << fmt9(quantize9(mean + half)) << "\n";
    }
    if (!out) throw ConfigError("write failed for '" + path.string() + "'");
}

void write_fig4(const ResultsTable& results, const fs::path& path) {
    std::ofstream out = open_out(path);
    out << "task,mode,data_source,window,split,best_model_id,auroc\n";
    std::vector<SeriesKey> keys;
    for (const ResultRow& row : results.rows) {
        SeriesKey key{row.task, row.mode, row.source, row.window, row.split};
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
    }
    for (const SeriesKey& key : keys) {
        const ResultRow* best = nullptr;
        for (const ResultRow& row : results.rows)
            if (SeriesKey{row.task, row.mode, row.source, row.window, row.split} == key &&
                row.converged && (!best || row.auroc > best->auroc))
                best = &row;
        out << to_string(key.task) << ',' << to_string(key.mode) << ','
            << to_string(key.source) << ',' << key.window.name() << ','
            << to_string(key.split) << ',';
        if (best)
            out << best->model_id << ',' << fmt9(best->auroc) << "\n";
        else
            out << "--,--\n";
    }
    if (!out) throw ConfigError("write failed for '" + path.string() + "'");
}

}  // namespace

void emit_report(const ResultsTable& results, const fs::path& out_dir) {
    if (results.rows.empty()) throw ConfigError("emit_report: no result rows");
    std::error_code ec;
    fs::create_directories(out_dir / "tables", ec);
    if (ec)
        throw ConfigError("emit_report: cannot create '" + (out_dir / "tables").string() +
                          "': " + ec.message());
    write_results_csv(results, out_dir / "results.csv");
    for (const PivotTable& pivot : build_pivots(results))
        write_pivot_csv(pivot, out_dir / "tables" / pivot.filename());
    write_fig3(results, out_dir / "fig3_series.csv");
    write_fig4(results, out_dir / "fig4_best.csv");
}

DayVsHistoryTable compare_day_vs_history(const ResultsTable& results) {
    const ehr::ObservationWindow day0 = ehr::ObservationWindow::day_of_surgery();
    const ehr::ObservationWindow m3 = ehr::ObservationWindow::months(3);
    DayVsHistoryTable table;
    std::vector<std::string> missing;
    for (DataSource source : {DataSource::structured, DataSource::notes, DataSource::both}) {
        for (ehr::SurgeryType task : {ehr::SurgeryType::hip, ehr::SurgeryType::knee}) {
            DayVsHistoryRow out_row;
            out_row.source = source;
            out_row.task = task;
            for (const ehr::ObservationWindow& window : {day0, m3}) {
                const ResultRow* best = nullptr;
                for (const ResultRow& row : results.rows)
                    if (row.source == source && row.task == task && row.window == window &&
                        row.split == ehr::Split::test && row.converged &&
                        (!best || row.auroc > best->auroc))
                        best = &row;
                if (!best) {
                    missing.push_back(std::string(to_string(source)) + "/" +
                                      std::string(to_string(task)) + "/" + window.name());
                    continue;
                }
                if (window == day0) {
                    out_row.day0 = best->auroc;
                    out_row.best_model_day0 = best->model_id;
                } else {
                    out_row.months3 = best->auroc;
                    out_row.best_model_months3 = best->model_id;
                }
            }
            out_row.flag_day0 = out_row.day0 >= out_row.months3;
            out_row.flag_months3 = out_row.months3 >= out_row.day0;
            table.rows.push_back(std::move(out_row));
        }
    }
    if (!missing.empty()) {
        std::string msg = "compare_day_vs_history: missing test-split cells:";
        for (const std::string& m : missing) msg += " " + m;
        throw ConfigError(msg);
    }
    return table;
}

std::string DayVsHistoryTable::render() const {
    std::string out;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-11s %-5s %15s %15s\n", "source", "task",
                  "day-of-surgery", "+3 months");
    out += buf;
    for (const DayVsHistoryRow& row : rows) {
        char day[24], m3[24];
        std::snprintf(day, sizeof(day), "%.3f%s", row.day0, row.flag_day0 ? "*" : " ");
        std::snprintf(m3, sizeof(m3), "%.3f%s", row.months3, row.flag_months3 ? "*" : " ");
        std::snprintf(buf, sizeof(buf), "%-11s %-5s %15s %15s\n",
                      std::string(to_string(row.source)).c_str(),
                      std::string(to_string(row.task)).c_str(), day, m3);
        out += buf;
    }
    return out;
}

void write_day_vs_history_csv(const DayVsHistoryTable& table, const fs::path& path) {
    std::ofstream out = open_out(path);
    out << "data_source,task,day0_auroc,day0_best_model,months3_auroc,months3_best_model,"
           "flagged\n";
    for (const DayVsHistoryRow& row : table.rows) {
        const char* flagged = row.flag_day0 && row.flag_months3 ? "both"
                              : row.flag_day0                   ? "day0"
                                                                : "months3";
        out << to_string(row.source) << ',' << to_string(row.task) << ','
            << fmt9(row.day0) << ',' << row.best_model_day0 << ',' << fmt9(row.months3)
            << ',' << row.best_model_months3 << ',' << flagged << "\n";
    }
    if (!out) throw ConfigError("write failed for '" + path.string() + "'");
}

}  // namespace wb::eval
