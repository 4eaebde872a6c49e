#pragma once

#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "qbatt/table.hpp"

namespace qbatt {

using HeaderLines = std::vector<std::pair<std::string, std::string>>;

// 17 significant digits, '.' decimal separator; "nan" / "inf" / "-inf".
std::string format_csv_value(double v);

// '#'-prefixed "key = value" header block, then the column row and the data.
void write_csv(std::ostream& out, const Table& table, const HeaderLines& header);
// Throws IoError if the file cannot be written.
void write_csv_file(const std::string& path, const Table& table, const HeaderLines& header);

} // namespace qbatt
