#include "shearflow/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace shearflow {

namespace {

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

} // namespace

std::vector<ColumnSummary> summarize(const RegularityReport& report) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<ColumnSummary> out;
    for (std::size_t c = 0; c < report.columns().size(); ++c) {
        ColumnSummary s{report.columns()[c], nan, nan, nan, nan, 0};
        for (const auto& row : report.rows()) {
            const double v = row[c];
            if (!std::isfinite(v)) continue;
            if (s.finite == 0) {
                s.first = s.min = s.max = v;
            }
            s.last = v;
            s.min = std::min(s.min, v);
            s.max = std::max(s.max, v);
            ++s.finite;
        }
        out.push_back(s);
    }
    return out;
}

std::string render_summary(const RegularityReport& report) {
    std::string out;
    char line[256];
    std::snprintf(line, sizeof line, "samples %zu\n", report.size());
    out += line;
    std::snprintf(line, sizeof line, "%-18s %18s %18s %18s %18s\n", "column", "first", "last", "min", "max");
    out += line;
    for (const auto& s : summarize(report)) {
        std::snprintf(line, sizeof line, "%-18s %18s %18s %18s %18s\n", s.name.c_str(), num(s.first).c_str(),
                      num(s.last).c_str(), num(s.min).c_str(), num(s.max).c_str());
        out += line;
    }
    return out;
}

std::string to_gnuplot(const RegularityReport& report) {
    std::string out = "#";
    for (std::size_t c = 0; c < report.columns().size(); ++c) {
        out += ' ' + std::to_string(c + 1) + ':' + report.columns()[c];
    }
    out += '\n';
    for (const auto& row : report.rows()) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c > 0) out += ' ';
            out += num(row[c]);
        }
        out += '\n';
    }
    return out;
}

} // namespace shearflow
