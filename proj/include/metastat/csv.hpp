#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "metastat/errors.hpp"

namespace metastat {

/// %.17g: shortest form that round-trips a double exactly.
inline std::string csv_num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

inline std::vector<std::string> csv_split(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        size_t b = cell.find_first_not_of(" \t\r");
        size_t e = cell.find_last_not_of(" \t\r");
        cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    return cells;
}

/// Plain comma-splitting reader (no quoting; none of our formats needs it).
inline CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open CSV file: " + path);
    CsvTable t;
    std::string line;
    if (std::getline(in, line)) t.header = csv_split(line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        t.rows.push_back(csv_split(line));
    }
    return t;
}

inline double csv_to_double(const std::string& cell, const std::string& context) {
    char* end = nullptr;
    double x = std::strtod(cell.c_str(), &end);
    if (end == cell.c_str() || *end != '\0')
        throw ConfigError(context + ": not a number: '" + cell + "'");
    return x;
}

inline long csv_to_long(const std::string& cell, const std::string& context) {
    char* end = nullptr;
    long x = std::strtol(cell.c_str(), &end, 10);
    if (end == cell.c_str() || *end != '\0')
        throw ConfigError(context + ": not an integer: '" + cell + "'");
    return x;
}

} // namespace metastat
