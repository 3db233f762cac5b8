// CSV artifact writing and reading.  Plain comma-separated values with
// '#'-prefixed metadata comment lines before the header; no quoting (none of
// the emitted fields contain commas).
#pragma once

#include <string>
#include <vector>

#include "hybrid/oc.hpp"
#include "hybrid/survival.hpp"

namespace hybrid {

struct CsvTable {
    std::vector<std::string> comments;  // written as "# <line>" before header
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

// Shortest representation that round-trips doubles for reporting: "%.12g".
// NaN renders as "nan".
std::string format_double(double v);

// Writes atomically: to "<path>.tmp", then renames over path.
void write_csv(const std::string& path, const CsvTable& table);

CsvTable read_csv(const std::string& path);

// Row layouts for the toolkit's artifacts.
CsvTable oc_table(const std::vector<SweepRow>& rows);
CsvTable survival_oc_table(const std::vector<SurvivalSweepRow>& rows);
CsvTable table1_table(const std::vector<Table1Row>& rows);

}  // namespace hybrid
