#include "eyewit/csv.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "eyewit/error.hpp"

namespace eyewit {

void CsvTable::add(std::vector<CsvCell> row) {
    require(row.size() == columns.size(), ErrorCode::invalid_argument, "CSV row width does not match the header");
    rows.push_back(std::move(row));
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

std::string quote(const std::string &s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (const char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

}  // namespace

std::string render_csv(const CsvTable &table, const std::string &comment) {
    std::string out = "# " + comment + "\n";
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        if (i > 0) out += ',';
        out += quote(table.columns[i]);
    }
    out += '\n';
    for (const auto &row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i > 0) out += ',';
            if (const auto *d = std::get_if<double>(&row[i])) {
                out += format_double(*d);
            } else if (const auto *n = std::get_if<std::int64_t>(&row[i])) {
                out += std::to_string(*n);
            } else {
                out += quote(std::get<std::string>(row[i]));
            }
        }
        out += '\n';
    }
    return out;
}

void write_file_atomic(const std::string &path, const std::string &content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        require(static_cast<bool>(out), ErrorCode::invalid_argument, "cannot write '" + tmp.string() + "'");
        out << content;
        out.flush();
        if (!out) {
            out.close();
            fs::remove(tmp);
            fail(ErrorCode::invalid_argument, "failed while writing '" + tmp.string() + "'");
        }
    }
    fs::rename(tmp, target);
}

}  // namespace eyewit
