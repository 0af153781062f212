#pragma once

#include <utility>

#include "dimertrap/lindblad.hpp"
#include "dimertrap/params.hpp"
#include "dimertrap/time_series.hpp"

namespace dimertrap {

struct AlphaFit {
    double alpha{0.0};
    double goodness{0.0};  ///< sqrt(mean(((lvne - pimc)/sigma)^2)) over the window
    std::pair<double, double> window;
    bool lindblad_valid{true};
};

/// Reduced chi^2 above which the Lindblad description is flagged invalid.
inline constexpr double lindblad_goodness_threshold = 3.0;

/// Weighted RMS between LvNE(alpha) and PIMC over `window`.
double match_goodness(const TimeSeries& pimc, const DimerParams& params, double T,
                      double alpha, std::pair<double, double> window,
                      const IntegratorConfig& cfg);

/// Golden-section minimization of match_goodness over alpha in
/// [0, 2 * alpha_physical]. A coarse scan must show a single interior or
/// boundary minimum; otherwise NumericalError("non-unimodal objective; widen bounds").
AlphaFit fit_alpha(const TimeSeries& pimc, const DimerParams& params, double T,
                   std::pair<double, double> window, double alpha_physical,
                   const IntegratorConfig& cfg);

/// Last half of the PIMC time span.
std::pair<double, double> default_match_window(const TimeSeries& pimc);

struct StitchResult {
    TimeSeries series;
    double t_cross{0.0};
    double factor{1.0};
};

/// PIMC for t <= t_cross, LvNE rescaled to PIMC at t_cross beyond. The factor
/// must lie in [1 - 3 sigma_rel, 1 + 3 sigma_rel]; otherwise NumericalError
/// "inconsistent stitch".
StitchResult stitch(const TimeSeries& pimc, const TimeSeries& lvne, double t_cross);

struct MatchResult {
    AlphaFit fit;
    StitchResult stitched;
};

/// Fit alpha on `window`, run LvNE to `t_max` and stitch at window end.
MatchResult match_and_extrapolate(const TimeSeries& pimc, const DimerParams& params, double T,
                                  std::pair<double, double> window, double alpha_physical,
                                  double t_max, std::size_t n_points,
                                  const IntegratorConfig& cfg);

}  // namespace dimertrap
