#pragma once

// Independent reference implementations used only by the tests.

#include <cmath>
#include <complex>

#include <Eigen/Dense>

namespace oracle {

/// exp(A) by Taylor series with scaling and squaring. Deliberately naive and
/// unrelated to the library's spectral and Pade routes.
template <class M>
M expm_taylor(const M& a) {
    int squarings = 0;
    double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
    while (norm > 0.25) {
        norm /= 2.0;
        ++squarings;
    }
    const M scaled = a / std::pow(2.0, squarings);
    M term = M::Identity(a.rows(), a.cols());
    M sum = term;
    for (int k = 1; k < 30; ++k) {
        term = term * scaled / static_cast<double>(k);
        sum += term;
    }
    for (int i = 0; i < squarings; ++i) sum = sum * sum;
    return sum;
}

inline Eigen::Matrix2cd dimer_matrix(double E, double V, double Gamma) {
    Eigen::Matrix2cd h;
    h << E, -V, -V, std::complex<double>(E, -Gamma);
    return h;
}

inline Eigen::Matrix2cd evolution(double E, double V, double Gamma, double t) {
    return expm_taylor<Eigen::Matrix2cd>(std::complex<double>(0.0, -t) * dimer_matrix(E, V, Gamma));
}

}  // namespace oracle
