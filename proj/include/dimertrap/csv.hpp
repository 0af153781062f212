#pragma once

#include <iosfwd>
#include <string>

#include "dimertrap/time_series.hpp"

namespace dimertrap {

/// Header `t,<value_name>[,stderr]`, rows with 12 significant digits.
void write_csv(std::ostream& os, const TimeSeries& series, const std::string& value_name);
void write_csv(const std::string& path, const TimeSeries& series, const std::string& value_name);

/// Reads the format written by write_csv. A third column becomes `errors`.
TimeSeries read_csv(std::istream& is);
TimeSeries read_csv(const std::string& path);

/// 12-significant-digit decimal rendering shared by all CSV writers.
std::string format_number(double x);

}  // namespace dimertrap
