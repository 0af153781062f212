#include "dimertrap/time_series.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dimertrap/error.hpp"

namespace dimertrap {

void TimeSeries::validate() const {
    if (values.size() != times.size())
        throw ConfigError("time series: values and times differ in length");
    if (errors && errors->size() != times.size())
        throw ConfigError("time series: errors and times differ in length");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] >= 0.0)) throw ConfigError("time series: negative time");
        if (i > 0 && !(times[i] > times[i - 1]))
            throw ConfigError("time series: times not strictly increasing at index " +
                              std::to_string(i));
        if (errors && !((*errors)[i] >= 0.0))
            throw ConfigError("time series: negative error at index " + std::to_string(i));
    }
}

double TimeSeries::interpolate(double t) const {
    if (times.empty() || t < times.front() || t > times.back())
        throw ConfigError("time series: t = " + std::to_string(t) + " outside grid");
    auto it = std::lower_bound(times.begin(), times.end(), t);
    auto i = static_cast<std::size_t>(it - times.begin());
    if (times[i] == t) return values[i];
    const double w = (t - times[i - 1]) / (times[i] - times[i - 1]);
    return (1.0 - w) * values[i - 1] + w * values[i];
}

TimeSeries TimeSeries::slice(double t_a, double t_b) const {
    TimeSeries out;
    if (errors) out.errors.emplace();
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < t_a || times[i] > t_b) continue;
        out.times.push_back(times[i]);
        out.values.push_back(values[i]);
        if (errors) out.errors->push_back((*errors)[i]);
    }
    return out;
}

std::vector<double> uniform_grid(double t_max, std::size_t n) {
    if (n < 2) throw ConfigError("n_points must be >= 2");
    if (!(t_max > 0.0)) throw ConfigError("t_max must be > 0");
    std::vector<double> grid(n);
    for (std::size_t i = 0; i < n; ++i)
        grid[i] = t_max * static_cast<double>(i) / static_cast<double>(n - 1);
    grid.back() = t_max;
    return grid;
}

}  // namespace dimertrap
