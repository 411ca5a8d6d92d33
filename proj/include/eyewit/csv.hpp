#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace eyewit {

using CsvCell = std::variant<double, std::int64_t, std::string>;

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<CsvCell>> rows;

    void add(std::vector<CsvCell> row);
};

/// Shortest decimal that reads back to the same double.
std::string format_double(double v);

/// Renders `# <comment>` followed by the header row and the data rows.
std::string render_csv(const CsvTable &table, const std::string &comment);

/// Writes atomically: the content goes to a sibling temporary file that is
/// renamed over `path` once complete.
void write_file_atomic(const std::string &path, const std::string &content);

}  // namespace eyewit
