#include "qbatt/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "qbatt/error.hpp"

namespace qbatt {

std::string format_csv_value(double v)
{
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

namespace {

// Quote a field that would otherwise break the row.
std::string field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        out += c;
        if (c == '"') {
            out += '"';
        }
    }
    return out + "\"";
}

} // namespace

void write_csv(std::ostream& out, const Table& table, const HeaderLines& header)
{
    for (const auto& [key, value] : header) {
        out << "# " << key << " = " << value << '\n';
    }
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        out << (c ? "," : "") << field(table.columns[c]);
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            out << (c ? "," : "") << format_csv_value(row[c]);
        }
        out << '\n';
    }
}

void write_csv_file(const std::string& path, const Table& table, const HeaderLines& header)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    write_csv(out, table, header);
    out.flush();
    if (!out) {
        throw IoError("failed writing '" + path + "'");
    }
}

} // namespace qbatt
