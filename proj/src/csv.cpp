#include "hybrid/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hybrid {
namespace {

std::string join(const std::vector<std::string>& fields) {
    std::string line;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) line += ',';
        line += fields[i];
    }
    return line;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

std::vector<std::string> result_fields(const OCResult& r) {
    return {method_name(r.method),
            format_double(r.reject_rate),
            format_double(r.borrow_rate),
            format_double(r.bias),
            format_double(r.mean_alpha0),
            format_double(r.mc_se_reject),
            format_double(r.mc_se_bias),
            std::to_string(r.n_reps),
            std::to_string(r.seed)};
}

const std::vector<std::string> kResultColumns = {
    "method",       "reject_rate", "borrow_rate", "bias",  "mean_alpha0",
    "mc_se_reject", "mc_se_bias",  "n_reps",      "seed"};

}  // namespace

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void write_csv(const std::string& path, const CsvTable& table) {
    const std::string tmp = path + ".tmp";
    try {
        std::ofstream out(tmp);
        if (!out) throw std::runtime_error("write_csv: cannot open " + tmp);
        for (const auto& c : table.comments) out << "# " << c << '\n';
        out << join(table.columns) << '\n';
        for (const auto& row : table.rows) {
            if (row.size() != table.columns.size())
                throw std::runtime_error("write_csv: row width mismatch");
            out << join(row) << '\n';
        }
        out.flush();
        if (!out) throw std::runtime_error("write_csv: write failed for " + tmp);
    } catch (...) {
        std::remove(tmp.c_str());
        throw;
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw std::runtime_error("write_csv: cannot rename " + tmp + " to " + path);
    }
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_csv: cannot open " + path);
    CsvTable table;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::size_t start = 1;
            if (start < line.size() && line[start] == ' ') ++start;
            table.comments.push_back(line.substr(start));
            continue;
        }
        if (!have_header) {
            table.columns = split(line);
            have_header = true;
            continue;
        }
        auto fields = split(line);
        if (fields.size() != table.columns.size())
            throw std::runtime_error("read_csv: row width mismatch in " + path);
        table.rows.push_back(std::move(fields));
    }
    if (!have_header) throw std::runtime_error("read_csv: no header in " + path);
    return table;
}

CsvTable oc_table(const std::vector<SweepRow>& rows) {
    CsvTable t;
    t.columns = {"Delta", "delta"};
    t.columns.insert(t.columns.end(), kResultColumns.begin(), kResultColumns.end());
    for (const auto& row : rows) {
        std::vector<std::string> fields = {format_double(row.Delta),
                                           format_double(row.delta)};
        auto rest = result_fields(row.result);
        fields.insert(fields.end(), rest.begin(), rest.end());
        t.rows.push_back(std::move(fields));
    }
    return t;
}

CsvTable survival_oc_table(const std::vector<SurvivalSweepRow>& rows) {
    CsvTable t;
    t.columns = {"log_theta_T", "log_theta_R"};
    t.columns.insert(t.columns.end(), kResultColumns.begin(), kResultColumns.end());
    for (const auto& row : rows) {
        std::vector<std::string> fields = {format_double(row.log_theta_T),
                                           format_double(row.log_theta_R)};
        auto rest = result_fields(row.result);
        fields.insert(fields.end(), rest.begin(), rest.end());
        t.rows.push_back(std::move(fields));
    }
    return t;
}

CsvTable table1_table(const std::vector<Table1Row>& rows) {
    CsvTable t;
    t.columns = {"delta_eq", "alpha_eq",    "v",           "yuan_type1", "alpha1",
                 "alpha2",   "alpha_star",  "beta_eq",     "borrow_prob", "power_a3"};
    for (const auto& row : rows) {
        t.rows.push_back({format_double(row.delta_eq), format_double(row.alpha_eq),
                          format_double(row.v), format_double(row.yuan_type1),
                          format_double(row.alpha1), format_double(row.alpha2),
                          format_double(row.alpha_star), format_double(row.beta_eq),
                          format_double(row.borrow_prob), format_double(row.power_a3)});
    }
    return t;
}

}  // namespace hybrid
