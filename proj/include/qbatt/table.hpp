#pragma once

#include <string>
#include <vector>

namespace qbatt {

// Column-oriented numeric output, one row per record time.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::size_t column_index(const std::string& name) const;
    std::vector<double> column(const std::string& name) const;
};

} // namespace qbatt
