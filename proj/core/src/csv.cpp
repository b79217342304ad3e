#include "flapkit/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "flapkit/error.hpp"

namespace flapkit::io {

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw ValidationError("CSV column not found: " + name);
}

std::vector<double> CsvTable::column_values(const std::string& name) const {
    const std::size_t c = column(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r.at(c));
    return out;
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open CSV file: " + path.string());
    CsvTable table;
    std::string line;
    bool first = true;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        if (first) {
            while (std::getline(ss, cell, ',')) table.header.push_back(cell);
            first = false;
            continue;
        }
        std::vector<double> row;
        row.reserve(table.header.size());
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(cell.empty() ? 0.0 : std::stod(cell));
            } catch (const std::exception&) {
                std::ostringstream os;
                os << path.string() << ":" << lineno << ": not a number: '" << cell << "'";
                throw Error(os.str());
            }
        }
        if (row.size() != table.header.size()) {
            std::ostringstream os;
            os << path.string() << ":" << lineno << ": expected " << table.header.size()
               << " fields, got " << row.size();
            throw Error(os.str());
        }
        table.rows.push_back(std::move(row));
    }
    if (first) throw Error("CSV file has no header: " + path.string());
    return table;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path, std::ios::binary);  // binary: identical bytes everywhere
    if (!out) throw Error("cannot write CSV file: " + path.string());
    for (std::size_t i = 0; i < header.size(); ++i)
        out << (i ? "," : "") << header[i];
    out << '\n';
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i)
            out << (i ? "," : "") << format_double(r[i]);
        out << '\n';
    }
}

}  // namespace flapkit::io
