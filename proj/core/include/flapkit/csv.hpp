#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace flapkit::io {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    // column index by header name; throws if absent
    std::size_t column(const std::string& name) const;
    std::vector<double> column_values(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

// Writes with enough digits to round-trip doubles exactly; byte-deterministic.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

std::string format_double(double v);

}  // namespace flapkit::io
