#pragma once

#include <string>
#include <vector>

#include "capcav/config.hpp"

namespace capcav {

struct ReportRow {
    std::string quantity;
    double reference = 0.0;
    double toolkit = 0.0;
    double deviation = 0.0; // relative, or absolute for *_abs rows
    double tolerance = 0.0;
    bool absolute = false;  // deviation/tolerance semantics
    bool pass = false;
    std::string note;
};

struct PaperReport {
    std::vector<ReportRow> rows;
    std::vector<std::string> notes;
    bool all_pass = false;
};

// Runs the closed-form figure relations against the reference values, then
// the calibrated-cavity pipeline (resonance, Q, effective length, N-sweep
// scattering-rate fit). Pass criterion per row: deviation strictly below
// tolerance (inside the range for the l_eff row).
PaperReport reproduce_paper(const RunConfig& config, int jobs);

// Fixed-width table, one line per row plus the notes block.
std::string report_table(const PaperReport& report);

// report as JSON (stable key order).
std::string report_json(const PaperReport& report, const struct Provenance& prov);

} // namespace capcav
