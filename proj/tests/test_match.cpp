#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dimertrap/error.hpp"
#include "dimertrap/lindblad.hpp"
#include "dimertrap/match.hpp"
#include "dimertrap/monte_carlo.hpp"

using namespace dimertrap;
using std::numbers::pi;

namespace {

const DimerParams dimer{1, 1, 0.1};
const IntegratorConfig cfg{1e-3, 60.0};

TimeSeries lvne_with_errors(double alpha, double t_max, std::size_t n, double sigma) {
    const auto grid = uniform_grid(t_max, n);
    TimeSeries s = propagate_lvne(DensityMatrix2::localized(Node::initial), dimer, pi * alpha, grid, cfg);
    s.errors.emplace(s.size(), sigma);
    return s;
}

}  // namespace

TEST_CASE("fitted alpha reproduces noiseless master-equation data") {
    const TimeSeries fake = lvne_with_errors(0.1, 5.0, 21, 0.01);
    const auto window = default_match_window(fake);
    CHECK(window.first == doctest::Approx(2.5));
    CHECK(window.second == doctest::Approx(5.0));
    const AlphaFit fit = fit_alpha(fake, dimer, 1.0, window, 0.1, cfg);
    CHECK(fit.alpha == doctest::Approx(0.1).epsilon(1e-3));
    CHECK(std::abs(fit.alpha - 0.1) < 1e-4);
    CHECK(fit.goodness < 1e-3);
    CHECK(fit.lindblad_valid);

    // local-minimum certificate
    for (double delta : {0.01, 0.02}) {
        CHECK(match_goodness(fake, dimer, 1.0, fit.alpha + delta, window, cfg) >= fit.goodness);
        CHECK(match_goodness(fake, dimer, 1.0, fit.alpha - delta, window, cfg) >= fit.goodness);
    }
}

TEST_CASE("fit preconditions") {
    TimeSeries fake = lvne_with_errors(0.1, 5.0, 21, 0.0);
    CHECK_THROWS_AS(fit_alpha(fake, dimer, 1.0, {2.5, 5.0}, 0.1, cfg), NumericalError);
    fake.errors.emplace(fake.size(), 0.01);
    CHECK_THROWS_AS(fit_alpha(fake, dimer, 1.0, {4.5, 5.0}, 0.1, cfg), ConfigError);
    CHECK_THROWS_AS(fit_alpha(fake, dimer, 1.0, {2.5, 5.0}, 0.0, cfg), ConfigError);
    fake.errors.reset();
    CHECK_THROWS_AS(fit_alpha(fake, dimer, 1.0, {2.5, 5.0}, 0.1, cfg), ConfigError);
}

TEST_CASE("strong-coupling Monte Carlo is flagged outside Lindblad validity") {
    std::vector<double> grid;
    for (int i = 1; i <= 12; ++i) grid.push_back(0.25 * i);
    McConfig mc;
    mc.sweeps = 20000;
    mc.burn_in = 1000;
    mc.seeds = McConfig::derive_seeds(5, 2);
    mc.bins = 20;
    const PimcResult r = run_pimc(dimer, {10, 5, 1}, grid, [](double t) { return default_slices(t, 1.0); }, mc);
    const AlphaFit fit = fit_alpha(r.survival, dimer, 1.0, default_match_window(r.survival), 10.0, cfg);
    CAPTURE(fit.alpha);
    CHECK(fit.goodness > lindblad_goodness_threshold);
    CHECK_FALSE(fit.lindblad_valid);
}

TEST_CASE("stitching identical series is the identity") {
    const TimeSeries a = lvne_with_errors(0.1, 10.0, 41, 0.005);
    const TimeSeries ext = lvne_with_errors(0.1, 20.0, 81, 0.0);
    const StitchResult s = stitch(a, ext, 10.0);
    CHECK(s.factor == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.t_cross == 10.0);
    CHECK(s.series.times == ext.times);
    for (std::size_t i = 0; i < ext.size(); ++i) CHECK(s.series.values[i] == doctest::Approx(ext.values[i]).epsilon(1e-12));
}

TEST_CASE("stitched curve continuity, idempotence and long-time rate") {
    const TimeSeries pimc = lvne_with_errors(0.1, 10.0, 41, 0.005);
    TimeSeries ext = lvne_with_errors(0.1, 60.0, 1201, 0.0);
    for (double& v : ext.values) v *= 1.01;  // small offset within the 3 sigma band
    const StitchResult s = stitch(pimc, ext, 10.0);
    CHECK(s.factor == doctest::Approx(1.0 / 1.01));

    const auto at = std::find(s.series.times.begin(), s.series.times.end(), 10.0) - s.series.times.begin();
    CHECK(std::abs(s.series.values[at] - s.series.values[at + 1]) <= (*pimc.errors)[40]);

    TimeSeries branch;
    for (std::size_t i = 0; i < s.series.size(); ++i)
        if (s.series.times[i] > 10.0) {
            branch.times.push_back(s.series.times[i]);
            branch.values.push_back(s.series.values[i]);
        }
    branch.times.insert(branch.times.begin(), 10.0);
    branch.values.insert(branch.values.begin(), s.series.values[at]);
    const StitchResult again = stitch(s.series, branch, 10.0);
    CHECK(again.factor == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(again.series.times == s.series.times);
    for (std::size_t i = 0; i < s.series.size(); ++i) CHECK(again.series.values[i] == doctest::Approx(s.series.values[i]).epsilon(1e-14));

    const double rate = fit_decay_rate(s.series, {20.0, 60.0}, oscillation_period(dimer));
    CHECK(rate == doctest::Approx(0.1).epsilon(0.05));
}

TEST_CASE("stitch rejects inconsistent inputs") {
    const TimeSeries pimc = lvne_with_errors(0.1, 10.0, 41, 0.005);
    const TimeSeries wrong = lvne_with_errors(1.0, 60.0, 241, 0.0);
    CHECK_THROWS_WITH_AS(stitch(pimc, wrong, 10.0), doctest::Contains("inconsistent stitch"), NumericalError);
    const TimeSeries ext = lvne_with_errors(0.1, 60.0, 241, 0.0);
    CHECK_THROWS_AS(stitch(pimc, ext, 9.9), ConfigError);
    const TimeSeries short_ext = lvne_with_errors(0.1, 10.0, 41, 0.0);
    CHECK_THROWS_AS(stitch(pimc, short_ext, 10.0), ConfigError);
}

TEST_CASE("match and extrapolate end to end") {
    const TimeSeries fake = lvne_with_errors(0.1, 5.0, 21, 0.01);
    const MatchResult m = match_and_extrapolate(fake, dimer, 1.0, default_match_window(fake), 0.1, 30.0, 301, cfg);
    CHECK(m.fit.alpha == doctest::Approx(0.1).epsilon(1e-3));
    CHECK(m.stitched.t_cross == 5.0);
    CHECK(m.stitched.factor == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(m.stitched.series.times.back() == doctest::Approx(30.0));
}
