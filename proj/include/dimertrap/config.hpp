#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "dimertrap/lindblad.hpp"
#include "dimertrap/monte_carlo.hpp"
#include "dimertrap/params.hpp"

namespace dimertrap {

struct RunConfig {
    DimerParams dimer;
    BathParams bath;
    double t_max{10.0};
    std::size_t n_points{101};
    IntegratorConfig integrator{1e-3, 10.0};  // t_max mirrors the grid end
    std::int64_t sweeps{100000};
    std::int64_t burn_in{5000};
    std::size_t chains{4};
    std::uint64_t seed{42};
    std::string out{"out"};

    void validate() const;
    McConfig mc() const;
    std::vector<double> grid() const;

    bool operator==(const RunConfig&) const = default;
};

/// key=value lines, '#' starts a comment. Keys: E V Gamma alpha omega_c T
/// t_max n_points dt sweeps burn_in chains seed out. Throws ConfigError naming
/// key and line.
RunConfig parse_config(std::string_view text);

/// Inverse of parse_config; doubles are written with round-trip precision.
std::string render_config(const RunConfig& config);

/// Default values and key descriptions, used by --help.
std::string config_help();

}  // namespace dimertrap
