#include "dimertrap/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "dimertrap/error.hpp"

namespace dimertrap {

std::string format_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

void write_csv(std::ostream& os, const TimeSeries& series, const std::string& value_name) {
    series.validate();
    os << "t," << value_name;
    if (series.errors) os << ",stderr";
    os << '\n';
    for (std::size_t i = 0; i < series.size(); ++i) {
        os << format_number(series.times[i]) << ',' << format_number(series.values[i]);
        if (series.errors) os << ',' << format_number((*series.errors)[i]);
        os << '\n';
    }
}

void write_csv(const std::string& path, const TimeSeries& series, const std::string& value_name) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open " + path + " for writing");
    write_csv(os, series, value_name);
    if (!os) throw ConfigError("write to " + path + " failed");
}

TimeSeries read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw ConfigError("CSV: missing header");
    std::size_t columns = 1;
    for (const char ch : line) columns += ch == ',';
    if (columns != 2 && columns != 3) throw ConfigError("CSV: expected 2 or 3 columns");
    if (line.rfind("t,", 0) != 0) throw ConfigError("CSV: first column must be 't'");

    TimeSeries s;
    if (columns == 3) s.errors.emplace();
    std::size_t row = 1;
    while (std::getline(is, line)) {
        ++row;
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::string cell;
        std::vector<double> v;
        while (std::getline(fields, cell, ',')) {
            try {
                std::size_t used = 0;
                v.push_back(std::stod(cell, &used));
                if (used != cell.size() && cell.find_first_not_of(" \r", used) != std::string::npos)
                    throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw ConfigError("CSV: bad number on row " + std::to_string(row));
            }
        }
        if (v.size() != columns)
            throw ConfigError("CSV: wrong column count on row " + std::to_string(row));
        s.times.push_back(v[0]);
        s.values.push_back(v[1]);
        if (s.errors) s.errors->push_back(v[2]);
    }
    s.validate();
    return s;
}

TimeSeries read_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open " + path);
    return read_csv(is);
}

}  // namespace dimertrap
