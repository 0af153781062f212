#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "dimertrap/params.hpp"
#include "dimertrap/time_series.hpp"

namespace dimertrap {

struct McConfig {
    std::int64_t sweeps{100000};
    std::int64_t burn_in{5000};
    std::vector<std::uint64_t> seeds{42};
    int bins{50};
    /// Worker cap; 0 reads DIMERTRAP_THREADS, falling back to hardware concurrency.
    unsigned threads{0};

    std::size_t chains() const { return seeds.size(); }

    void validate() const;

    /// `chains` seeds derived from `seed` by splitmix64.
    static std::vector<std::uint64_t> derive_seeds(std::uint64_t seed, std::size_t chains);
};

/// Statistics of one simulated time point.
struct PimcPoint {
    double t{0.0};
    int slices{0};
    double survival{1.0};
    double survival_error{0.0};
    double trap{0.0};
    double trap_error{0.0};
    double average_sign{1.0};
    double acceptance{0.0};
};

struct PimcResult {
    TimeSeries survival;  ///< pi_{1,1}(t) with errors
    TimeSeries trap;      ///< pi_{2,1}(t) with errors
    std::vector<PimcPoint> points;
};

using SliceRule = std::function<int(double t)>;

/// P = ceil(t V / 0.1) capped at 64 (the cap logs a warning to stderr once).
int default_slices(double t, double V);

/// Metropolis sampling of one time point with stationary density |W| over the
/// interior spins and the shared endpoint. Populations use the reference-
/// normalized sign estimator <delta_n W/|W|> / <W0/|W|>, W0 being the same
/// path's trap-free weight. Chains run in parallel and are merged by inverse-
/// variance weighting in seed order, so output does not depend on scheduling.
///
/// Throws SignCollapseError when the denominator lies within 3 sigma of zero
/// and NumericalError when burn-in accepts no move.
PimcPoint simulate_time_point(const DimerParams& params, const BathParams& bath, double t,
                              int slices, const McConfig& mc);

/// One independent simulation per grid time.
PimcResult run_pimc(const DimerParams& params, const BathParams& bath,
                    std::span<const double> grid, const SliceRule& slices_of_t,
                    const McConfig& mc);

/// Worker count honoring DIMERTRAP_THREADS.
unsigned worker_count(unsigned requested);

}  // namespace dimertrap
