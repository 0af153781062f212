#pragma once

#include <array>

#include <Eigen/Dense>

#include "dimertrap/time_series.hpp"

namespace dimertrap {

/// Rates of the incoherent master equation dp/dt = -T p with
/// T = [[E, -V], [-V, E + Gamma]].
struct ClassicalRates {
    double E{1.0};
    double V{1.0};
    double Gamma{0.0};

    void validate() const;
    Eigen::Matrix2d transfer_matrix() const;
};

struct ClassicalSpectrum {
    std::array<double, 2> eigenvalues;          ///< lambda_+, lambda_-
    std::array<Eigen::Vector2d, 2> eigenvectors;  ///< columns of the symmetric eigenbasis
    double psi{0.0};                              ///< asinh(Gamma / 2V)
};

/// lambda_+- = E + Gamma/2 +- sqrt(V^2 + Gamma^2/4).
ClassicalSpectrum classical_eigensystem(const ClassicalRates& rates);

/// P(t) = exp(-t(E + Gamma/2)) cosh(psi + t V cosh psi) / cosh psi.
double classical_survival(const ClassicalRates& rates, double t);

struct ClassicalFit {
    ClassicalRates rates;
    double residual_norm{0.0};
    int iterations{0};
};

/// Damped Gauss-Newton (Levenberg-Marquardt) least squares of classical_survival
/// to `series`, weighted by 1/error when errors are present. Needs >= 20
/// positive points. Throws NumericalError on non-convergence or "model
/// mismatch" when a fitted rate comes out negative.
ClassicalFit fit_classical_rates(const TimeSeries& series);

}  // namespace dimertrap
