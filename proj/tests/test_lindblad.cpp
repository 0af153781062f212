#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dimertrap/error.hpp"
#include "dimertrap/lindblad.hpp"
#include "dimertrap/spectrum.hpp"

using namespace dimertrap;
using std::numbers::pi;

namespace {

const DensityMatrix2 rho1 = DensityMatrix2::localized(Node::initial);

IntegratorConfig rk(double dt, double t_max) { return {dt, t_max}; }

double max_deviation_from_closed(double Gamma, double dt) {
    const DimerParams p{1, 1, Gamma};
    const auto grid = uniform_grid(20.0, 401);
    const TimeSeries s = propagate_lvne(rho1, p, 0.0, grid, rk(dt, 20.0));
    double m = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        m = std::max(m, std::abs(s.values[i] - survival_closed_form(p, grid[i])));
    return m;
}

}  // namespace

TEST_CASE("rhs of a diagonal state has no dephasing contribution") {
    Mat2c rho;
    rho << 0.7, 0.0, 0.0, 0.3;
    const DimerParams p{1, 1, 0};
    const Mat2c h0 = hamiltonian_trap_free(p);
    const Mat2c commutator = cplx(0, -1) * (h0 * rho - rho * h0);
    for (double lambda : {0.0, 0.3, 5.0})
        CHECK((lvne_rhs(rho, p, lambda) - commutator).norm() < 1e-15);
}

TEST_CASE("trap term vanishes on the initial node") {
    const DimerParams p{1, 1, 0.1};
    const Mat2c rho = rho1.matrix();
    const Mat2c h0 = hamiltonian_trap_free(p);
    CHECK((lvne_rhs(rho, p, 0.0) - cplx(0, -1) * (h0 * rho - rho * h0)).norm() < 1e-15);
}

TEST_CASE("rhs of a coherent state matches a finite difference of the propagated solution") {
    const DimerParams p{1, 1, 0};
    const double lambda = pi / 10;
    Mat2c plus;
    plus << 0.5, 0.5, 0.5, 0.5;
    const double t0 = 0.5, h = 1e-3;
    const std::vector<double> grid{0.0, t0 - h, t0, t0 + h};
    const auto states = propagate_lvne_states(DensityMatrix2(plus), p, lambda, grid, rk(1e-4, 1.0));
    const Mat2c fd = (states[3].matrix() - states[1].matrix()) / (2 * h);
    CHECK((lvne_rhs(states[2].matrix(), p, lambda) - fd).norm() < 1e-6);

    // coherence decays at 2 lambda on top of the commutator
    const Mat2c d = lvne_rhs(plus, p, lambda);
    const Mat2c h0 = hamiltonian_trap_free(p);
    const Mat2c comm = cplx(0, -1) * (h0 * plus - plus * h0);
    CHECK(std::abs(d(0, 1) - comm(0, 1) + 2 * lambda * 0.5) < 1e-15);
}

TEST_CASE("numeric propagation reproduces the closed form without bath") {
    for (double gamma : {0.05, 0.1, 0.5, 1.9}) {
        CAPTURE(gamma);
        CHECK(max_deviation_from_closed(gamma, 1e-3) < 1e-8);
    }
    const std::vector<double> grid{0.0, pi / 2};
    const TimeSeries s = propagate_lvne(rho1, {1, 1, 0}, 0.0, grid, rk(1e-3, 2.0));
    CHECK(std::abs(s.values[1]) < 1e-10);
}

TEST_CASE("numeric propagation reproduces the trap-free dephasing solution") {
    for (double lambda : {pi / 10, pi / 4, 3.0}) {
        CAPTURE(lambda);
        const auto grid = uniform_grid(20.0, 201);
        const TimeSeries s = propagate_lvne(rho1, {1, 1, 0}, lambda, grid, rk(1e-3, 20.0));
        for (std::size_t i = 0; i < grid.size(); ++i)
            CHECK(std::abs(s.values[i] - pi11_trapfree_closed(1.0, lambda, grid[i])) < 1e-8);
    }
}

TEST_CASE("RK4 converges at fourth order") {
    // steps divide the 0.05 output spacing exactly
    const double coarse = max_deviation_from_closed(0.1, 0.05);
    const double fine = max_deviation_from_closed(0.1, 0.025);
    CAPTURE(coarse);
    CAPTURE(fine);
    CHECK(coarse / fine >= 12.0);
}

TEST_CASE("trap-free dephasing closed form") {
    for (double t = 0.0; t < 15.0; t += 0.1)
        CHECK(pi11_trapfree_closed(1.3, 0.0, t) == doctest::Approx(std::pow(std::cos(1.3 * t), 2)).epsilon(1e-12));
    CHECK(pi11_trapfree_closed(1.0, pi / 10, 200.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(pi11_trapfree_closed(1.0, 5.0, 200.0) == doctest::Approx(0.5).epsilon(1e-12));

    // continuous across lambda = 2V
    for (double t : {0.3, 1.0, 4.0}) {
        const double at = pi11_trapfree_closed(1.0, 2.0, t);
        CHECK(std::abs(pi11_trapfree_closed(1.0, 2.0 - 1e-7, t) - at) < 1e-6);
        CHECK(std::abs(pi11_trapfree_closed(1.0, 2.0 + 1e-7, t) - at) < 1e-6);
    }

    // envelope approaches 1/2 monotonically for lambda > 0
    const double lambda = pi / 10;
    double previous = 1.0;
    for (double t = 0.0; t < 40.0; t += pi / 2) {
        const double dev = std::abs(pi11_trapfree_closed(1.0, lambda, t) - 0.5);
        CHECK(dev <= previous + 1e-12);
        previous = dev;
    }
}

TEST_CASE("approximate survival") {
    for (double t = 0.0; t < 10.0; t += 0.1) {
        CHECK(survival_approx({1, 1, 0}, 0.0, t) == doctest::Approx(std::pow(std::cos(t), 2)).epsilon(1e-12));
        CHECK(survival_approx({1, 1, 0.1}, 0.0, t) ==
              doctest::Approx(std::exp(-0.1 * t) * std::pow(std::cos(t), 2)).epsilon(1e-12));
    }
}

TEST_CASE("approximate survival within 0.05 of the numeric master equation at alpha 0.1") {
    const DimerParams p{1, 1, 0.1};
    const auto grid = uniform_grid(10.0, 201);
    const TimeSeries s = propagate_lvne(rho1, p, pi / 10, grid, rk(1e-3, 10.0));
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        worst = std::max(worst, std::abs(s.values[i] - survival_approx(p, pi / 10, grid[i])));
    CHECK(worst < 0.05);
}

TEST_CASE("approximate and exact survival differ at first order in Gamma") {
    // The dropped phase phi = asin(Gamma/2V) enters linearly, so the gap scales
    // as Gamma/2 * sin(2Vt) at short times.
    auto coefficient = [](double gamma) {
        const DimerParams p{1, 1, gamma};
        double c = 0.0;
        for (double t = 0.01; t <= 2.0; t += 0.01)
            c = std::max(c, std::abs(survival_approx(p, 0.0, t) - survival_closed_form(p, t)) /
                                (gamma * std::exp(-gamma * t)));
        return c;
    };
    const double c1 = coefficient(0.04), c2 = coefficient(0.02), c3 = coefficient(0.01);
    CHECK(c2 / c1 == doctest::Approx(1.0).epsilon(0.05));
    CHECK(c3 / c2 == doctest::Approx(1.0).epsilon(0.05));
    CHECK(c3 == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("density matrix invariants along trajectories") {
    const auto grid = uniform_grid(50.0, 501);
    for (double gamma : {0.0, 0.1, 1.0}) {
        for (double lambda : {0.0, pi / 10, 10 * pi}) {
            CAPTURE(gamma);
            CAPTURE(lambda);
            const DimerParams p{1, 1, gamma};
            const auto states = propagate_lvne_states(rho1, p, lambda, grid,
                                                      IntegratorConfig::defaults_for(p, lambda, 50.0));
            double previous = 1.0;
            for (const DensityMatrix2& r : states) {
                REQUIRE(r.is_physical());
                if (gamma == 0.0) {
                    REQUIRE(std::abs(r.trace() - 1.0) < 1e-9);
                } else {
                    REQUIRE(r.trace() <= previous + 1e-10);
                }
                previous = r.trace();
            }
        }
    }
}

TEST_CASE("integrator blow-up names the time") {
    // dt far beyond the RK4 stability limit for lambda = 1000
    const auto grid = uniform_grid(50.0, 51);
    CHECK_THROWS_AS(propagate_lvne(rho1, {1, 1, 0}, 1000.0, grid, rk(0.5, 50.0)), NumericalError);
    CHECK_THROWS_AS(IntegratorConfig({0.0, 1.0}).validate(), ConfigError);
    CHECK(IntegratorConfig::defaults_for({1, 3, 0.1}, 0.3, 10.0).dt == doctest::Approx(1e-3));
    CHECK(IntegratorConfig::defaults_for({1, 1, 0.1}, 30.0, 10.0).dt == doctest::Approx(0.01 / 30));
}

TEST_CASE("decay rate fit") {
    TimeSeries exact;
    exact.times = uniform_grid(60.0, 601);
    for (double t : exact.times) exact.values.push_back(std::exp(-0.1 * t));
    CHECK(fit_decay_rate(exact, {20.0, 60.0}) == doctest::Approx(0.1).epsilon(1e-10));
    CHECK(fit_decay_rate(exact, {20.0, 60.0}, pi) == doctest::Approx(0.1).epsilon(1e-10));

    CHECK_THROWS_AS(fit_decay_rate(exact, {20.0, 20.5}), std::exception);
    TimeSeries bad = exact;
    bad.values[300] = 0.0;
    CHECK_THROWS_AS(fit_decay_rate(bad, {20.0, 60.0}), std::exception);

    const auto grid = uniform_grid(60.0, 1201);
    for (double alpha : {0.0, 0.1, 0.25}) {
        CAPTURE(alpha);
        const DimerParams p{1, 1, 0.1};
        const TimeSeries s = propagate_lvne(rho1, p, pi * alpha, grid, rk(1e-3, 60.0));
        CHECK(fit_decay_rate(s, {20.0, 60.0}, oscillation_period(p)) == doctest::Approx(0.1).epsilon(0.05));
    }
    const DimerParams p{1, 1, 0.1};
    const TimeSeries zeno = propagate_lvne(rho1, p, 10 * pi, grid, IntegratorConfig::defaults_for(p, 10 * pi, 60.0));
    CHECK(fit_decay_rate(zeno, {20.0, 60.0}, oscillation_period(p)) < 0.1);
}
