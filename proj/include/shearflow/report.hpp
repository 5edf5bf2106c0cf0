#pragma once

/// @file report.hpp
/// @brief Summary tables and gnuplot data files from report.csv.

#include "shearflow/monitors.hpp"

#include <string>
#include <vector>

namespace shearflow {

struct ColumnSummary {
    std::string name;
    double first = 0.0;
    double last = 0.0;
    double min = 0.0;
    double max = 0.0;
    std::size_t finite = 0; ///< number of finite samples; the statistics skip the rest
};

std::vector<ColumnSummary> summarize(const RegularityReport& report);

/// Fixed-width text table, one line per column.
std::string render_summary(const RegularityReport& report);

/// Whitespace-separated data with a '#' header listing the column numbers.
std::string to_gnuplot(const RegularityReport& report);

} // namespace shearflow
