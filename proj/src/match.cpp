#include "dimertrap/match.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/tools/minima.hpp>

#include "dimertrap/error.hpp"

namespace dimertrap {

namespace {

struct Window {
    std::vector<double> times;
    std::vector<double> values;
    std::vector<double> sigmas;
};

Window weighted_window(const TimeSeries& pimc, std::pair<double, double> window) {
    pimc.validate();
    if (!pimc.errors) throw ConfigError("matching needs PIMC standard errors");
    const TimeSeries w = pimc.slice(window.first, window.second);
    Window out;
    bool any_positive = false;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double sigma = (*w.errors)[i];
        if (!std::isfinite(sigma)) continue;
        if (sigma > 0.0) any_positive = true;
        // Exact points (sigma = 0, e.g. t = 0) carry no statistical information.
        if (sigma == 0.0) continue;
        out.times.push_back(w.times[i]);
        out.values.push_back(w.values[i]);
        out.sigmas.push_back(sigma);
    }
    if (!any_positive && w.size() > 0)
        throw NumericalError("matching: all PIMC errors in the window are zero");
    if (out.times.size() < 5)
        throw ConfigError("matching window needs >= 5 PIMC points with finite errors");
    return out;
}

double goodness_on(const Window& w, const DimerParams& params, double T, double alpha,
                   const IntegratorConfig& cfg) {
    const double lambda = std::numbers::pi * alpha * T;
    IntegratorConfig run = IntegratorConfig::defaults_for(params, lambda, w.times.back());
    run.dt = std::min(run.dt, cfg.dt);
    const TimeSeries lvne =
        propagate_lvne(DensityMatrix2::localized(Node::initial), params, lambda, w.times, run);
    double chi2 = 0.0;
    for (std::size_t i = 0; i < w.times.size(); ++i) {
        const double z = (lvne.values[i] - w.values[i]) / w.sigmas[i];
        chi2 += z * z;
    }
    return std::sqrt(chi2 / static_cast<double>(w.times.size()));
}

}  // namespace

double match_goodness(const TimeSeries& pimc, const DimerParams& params, double T,
                      double alpha, std::pair<double, double> window,
                      const IntegratorConfig& cfg) {
    return goodness_on(weighted_window(pimc, window), params, T, alpha, cfg);
}

AlphaFit fit_alpha(const TimeSeries& pimc, const DimerParams& params, double T,
                   std::pair<double, double> window, double alpha_physical,
                   const IntegratorConfig& cfg) {
    if (!(alpha_physical > 0.0)) throw ConfigError("alpha bracket needs alpha_physical > 0");
    const Window w = weighted_window(pimc, window);
    auto f = [&](double a) { return goodness_on(w, params, T, a, cfg); };

    const double upper = 2.0 * alpha_physical;
    constexpr int scan = 20;
    std::vector<double> xs(scan + 1);
    std::vector<double> fs(scan + 1);
    for (int i = 0; i <= scan; ++i) {
        xs[i] = upper * i / scan;
        fs[i] = f(xs[i]);
    }
    int minima = 0;
    int best = 0;
    for (int i = 0; i <= scan; ++i) {
        const bool left_ok = i == 0 || fs[i] < fs[i - 1];
        const bool right_ok = i == scan || fs[i] <= fs[i + 1];
        if (left_ok && right_ok) ++minima;
        if (fs[i] < fs[best]) best = i;
    }
    if (minima != 1) throw NumericalError("non-unimodal objective; widen bounds");

    // Brent refinement on the bracket around the coarse minimum.
    const double a = xs[std::max(best - 1, 0)];
    const double b = xs[std::min(best + 1, scan)];
    std::uintmax_t max_iter = 200;
    AlphaFit out;
    out.alpha = boost::math::tools::brent_find_minima(f, a, b, std::numeric_limits<double>::digits / 2, max_iter).first;
    out.goodness = f(out.alpha);
    if (fs[best] < out.goodness) {
        out.alpha = xs[best];
        out.goodness = fs[best];
    }
    out.window = window;
    out.lindblad_valid = out.goodness <= lindblad_goodness_threshold;
    return out;
}

std::pair<double, double> default_match_window(const TimeSeries& pimc) {
    if (pimc.size() == 0) throw ConfigError("empty PIMC series");
    const double t0 = pimc.times.front();
    const double t1 = pimc.times.back();
    return {t0 + 0.5 * (t1 - t0), t1};
}

StitchResult stitch(const TimeSeries& pimc, const TimeSeries& lvne, double t_cross) {
    pimc.validate();
    lvne.validate();
    const auto it = std::find(pimc.times.begin(), pimc.times.end(), t_cross);
    if (it == pimc.times.end()) throw ConfigError("t_cross must be a PIMC grid time");
    if (lvne.size() == 0 || lvne.times.back() <= t_cross)
        throw ConfigError("LvNE extension must extend beyond t_cross");
    const auto i = static_cast<std::size_t>(it - pimc.times.begin());
    const double value = pimc.values[i];
    const double sigma = pimc.errors ? (*pimc.errors)[i] : 0.0;
    const double reference = lvne.interpolate(t_cross);
    if (!(reference > 0.0) || !(value > 0.0))
        throw NumericalError("inconsistent stitch: non-positive survival at t_cross");

    StitchResult out;
    out.t_cross = t_cross;
    out.factor = value / reference;
    const double band = 3.0 * sigma / value;
    if (std::abs(out.factor - 1.0) > band + 1e-12) {
        std::ostringstream msg;
        msg << "inconsistent stitch: rescale factor " << out.factor << " outside [" << 1.0 - band
            << ", " << 1.0 + band << "]";
        throw NumericalError(msg.str());
    }

    TimeSeries& s = out.series;
    if (pimc.errors) s.errors.emplace();
    for (std::size_t k = 0; k <= i; ++k) {
        s.times.push_back(pimc.times[k]);
        s.values.push_back(pimc.values[k]);
        if (pimc.errors) s.errors->push_back((*pimc.errors)[k]);
    }
    for (std::size_t k = 0; k < lvne.size(); ++k) {
        if (lvne.times[k] <= t_cross) continue;
        s.times.push_back(lvne.times[k]);
        s.values.push_back(out.factor * lvne.values[k]);
        if (pimc.errors) s.errors->push_back(0.0);
    }
    return out;
}

MatchResult match_and_extrapolate(const TimeSeries& pimc, const DimerParams& params, double T,
                                  std::pair<double, double> window, double alpha_physical,
                                  double t_max, std::size_t n_points,
                                  const IntegratorConfig& cfg) {
    MatchResult out;
    out.fit = fit_alpha(pimc, params, T, window, alpha_physical, cfg);

    const TimeSeries in_window = pimc.slice(window.first, window.second);
    const double t_cross = in_window.times.back();
    std::vector<double> grid = uniform_grid(t_max, n_points);
    if (!std::binary_search(grid.begin(), grid.end(), t_cross)) {
        grid.push_back(t_cross);
        std::sort(grid.begin(), grid.end());
    }
    const double lambda = std::numbers::pi * out.fit.alpha * T;
    IntegratorConfig run = IntegratorConfig::defaults_for(params, lambda, t_max);
    run.dt = std::min(run.dt, cfg.dt);
    const TimeSeries lvne =
        propagate_lvne(DensityMatrix2::localized(Node::initial), params, lambda, grid, run);
    out.stitched = stitch(pimc.slice(pimc.times.front(), t_cross), lvne, t_cross);
    return out;
}

}  // namespace dimertrap
