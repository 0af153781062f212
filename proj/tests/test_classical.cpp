#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "dimertrap/classical.hpp"
#include "dimertrap/error.hpp"
#include "oracles.hpp"

using namespace dimertrap;

namespace {

TimeSeries synthetic(const ClassicalRates& r, double t_max, std::size_t n) {
    TimeSeries s;
    s.times = uniform_grid(t_max, n);
    for (double t : s.times) s.values.push_back(classical_survival(r, t));
    return s;
}

const ClassicalRates sweep[] = {{1, 1, 0}, {1, 1, 0.2}, {0.3, 0.2, 1.5}, {2, 1, 0.05}, {0.5, 3, 4}};

}  // namespace

TEST_CASE("eigenvalues of the transfer matrix") {
    const ClassicalSpectrum bare = classical_eigensystem({1, 0.4, 0});
    CHECK(bare.eigenvalues[0] == doctest::Approx(1.4));
    CHECK(bare.eigenvalues[1] == doctest::Approx(0.6));

    const ClassicalSpectrum s = classical_eigensystem({1, 1, 0.2});
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(ClassicalRates{1, 1, 0.2}.transfer_matrix());
    CHECK(s.eigenvalues[0] == doctest::Approx(es.eigenvalues()(1)).epsilon(1e-13));
    CHECK(s.eigenvalues[1] == doctest::Approx(es.eigenvalues()(0)).epsilon(1e-13));
    CHECK(s.eigenvalues[0] == doctest::Approx(2.10499).epsilon(1e-5));
    CHECK(s.eigenvalues[1] == doctest::Approx(0.09501).epsilon(1e-4));

    for (const ClassicalRates& r : sweep) {
        const ClassicalSpectrum sp = classical_eigensystem(r);
        CHECK(sp.eigenvalues[0] + sp.eigenvalues[1] == doctest::Approx(2 * r.E + r.Gamma));
        CHECK(sp.psi == doctest::Approx(std::asinh(r.Gamma / (2 * r.V))));
        const Eigen::Matrix2d T = r.transfer_matrix();
        for (int a = 0; a < 2; ++a) {
            const Eigen::Vector2d v = sp.eigenvectors[a];
            CHECK((T * v - sp.eigenvalues[a] * v).norm() < 1e-12 * std::max(1.0, v.norm()));
        }
    }
}

TEST_CASE("survival limits") {
    for (const ClassicalRates& r : sweep) CHECK(classical_survival(r, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
    for (double t = 0.0; t < 30.0; t += 0.25)
        CHECK(classical_survival({1, 1, 0}, t) == doctest::Approx(0.5 * (1 + std::exp(-2 * t))).epsilon(1e-12));

    // weak trapping with E = V decays at Gamma/2
    const ClassicalRates slow{1, 1, 1e-3};
    const double slope = -(std::log(classical_survival(slow, 1000.0)) - std::log(classical_survival(slow, 100.0))) / 900.0;
    CHECK(slope == doctest::Approx(5e-4).epsilon(0.01));
}

TEST_CASE("survival equals the matrix exponential of the transfer matrix") {
    for (const ClassicalRates& r : sweep)
        for (double t : {0.1, 1.0, 5.0, 20.0}) {
            const Eigen::Matrix2d m = oracle::expm_taylor<Eigen::Matrix2d>(-t * r.transfer_matrix());
            CHECK(std::abs(classical_survival(r, t) - m(0, 0)) < 1e-10 * std::max(1.0, std::abs(m(0, 0))));
        }
}

TEST_CASE("survival is a non-increasing probability when E >= V") {
    for (const ClassicalRates& r : sweep) {
        if (r.E < r.V) continue;
        double previous = 1.0;
        for (double t = 0.0; t < 60.0; t += 0.05) {
            const double p = classical_survival(r, t);
            REQUIRE(p > 0.0);
            REQUIRE(p <= 1.0);
            REQUIRE(p <= previous + 1e-15);
            previous = p;
        }
    }
}

TEST_CASE("long-time rate is the slow eigenvalue") {
    for (const ClassicalRates& r : sweep) {
        const double slow = classical_eigensystem(r).eigenvalues[1];
        if (slow <= 0.0) continue;
        const double t = 20.0 / slow;
        const double rate = -(std::log(classical_survival(r, t + 1.0)) - std::log(classical_survival(r, t))) / 1.0;
        CHECK(rate == doctest::Approx(slow).epsilon(1e-3));
    }
}

TEST_CASE("fit recovers noiseless rates") {
    const ClassicalRates truth{1, 1, 0.2};
    const ClassicalFit fit = fit_classical_rates(synthetic(truth, 20.0, 60));
    CHECK(std::abs(fit.rates.E - truth.E) < 1e-6);
    CHECK(std::abs(fit.rates.V - truth.V) < 1e-6);
    CHECK(std::abs(fit.rates.Gamma - truth.Gamma) < 1e-6);
    CHECK(fit.residual_norm < 1e-8);
}

TEST_CASE("fit recovers rates from 1% noisy data on average") {
    const ClassicalRates truth{1, 1, 0.2};
    const TimeSeries clean = synthetic(truth, 20.0, 60);
    double e = 0, v = 0, g = 0;
    const int seeds = 20;
    for (int seed = 0; seed < seeds; ++seed) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> noise(0.0, 1.0);
        TimeSeries s = clean;
        s.errors.emplace();
        for (double& x : s.values) {
            s.errors->push_back(0.01 * x);
            x *= 1.0 + 0.01 * noise(rng);
        }
        const ClassicalFit fit = fit_classical_rates(s);
        e += fit.rates.E / seeds;
        v += fit.rates.V / seeds;
        g += fit.rates.Gamma / seeds;
    }
    CHECK(e == doctest::Approx(truth.E).epsilon(0.05));
    CHECK(v == doctest::Approx(truth.V).epsilon(0.05));
    CHECK(g == doctest::Approx(truth.Gamma).epsilon(0.05));
}

TEST_CASE("fit preconditions") {
    CHECK_THROWS_AS(fit_classical_rates(synthetic({1, 1, 0.2}, 10.0, 19)), ConfigError);
    TimeSeries s = synthetic({1, 1, 0.2}, 10.0, 30);
    s.values[5] = -0.1;
    CHECK_THROWS_AS(fit_classical_rates(s), ConfigError);
    CHECK_THROWS_AS(ClassicalRates({1, 0, 0}).validate(), ConfigError);
    CHECK_THROWS_AS(ClassicalRates({-1, 1, 0}).validate(), ConfigError);
}
