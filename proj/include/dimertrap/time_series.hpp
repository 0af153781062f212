#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace dimertrap {

/// Sampled observable on a strictly increasing, non-negative time grid.
/// `errors` holds one standard error per point when present.
struct TimeSeries {
    std::vector<double> times;
    std::vector<double> values;
    std::optional<std::vector<double>> errors;

    std::size_t size() const { return times.size(); }
    bool has_errors() const { return errors.has_value(); }

    /// Throws ConfigError on length mismatch, unordered or negative times,
    /// or negative errors.
    void validate() const;

    /// Linear interpolation; throws ConfigError outside [times.front(), times.back()].
    double interpolate(double t) const;

    /// Points with t_a <= t <= t_b.
    TimeSeries slice(double t_a, double t_b) const;
};

/// n >= 2 equally spaced points on [0, t_max].
std::vector<double> uniform_grid(double t_max, std::size_t n);

}  // namespace dimertrap
