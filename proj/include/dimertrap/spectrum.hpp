#pragma once

#include <array>
#include <complex>

#include <Eigen/Dense>

#include "dimertrap/params.hpp"

namespace dimertrap {

using cplx = std::complex<double>;
using Vec2c = Eigen::Vector2cd;
using Mat2c = Eigen::Matrix2cd;

/// Eigen-decomposition of the non-Hermitian dimer Hamiltonian.
///
/// Index 0 holds E_+ = E + sqrt(V^2 - Gamma^2/4) - i Gamma/2, index 1 holds E_-.
/// `left` stores the kets |L_a> whose bras satisfy <L_a|R_b> = delta_ab, so
/// sum_a |R_a><L_a| is the identity and sum_a E_a |R_a><L_a| is H.
/// Right vectors are scaled to R^T R = 1 with Re(R[0]) >= 0.
struct Spectrum2 {
    std::array<cplx, 2> eigenvalues;
    std::array<Vec2c, 2> right;
    std::array<Vec2c, 2> left;

    /// sum_a exp(-i E_a t) |R_a><L_a|
    Mat2c propagator(double t) const;
};

/// H = E*1 - V*sigma_x - i*Gamma|2><2| in the site basis {|1>, |2>}.
Mat2c hamiltonian(const DimerParams& params);

/// Trap-free part H0 = E*1 - V*sigma_x.
Mat2c hamiltonian_trap_free(const DimerParams& params);

/// Throws NumericalError at the exceptional point Gamma = 2V.
Spectrum2 eigensystem(const DimerParams& params);

/// exp(-i H t). Spectral route off the exceptional point, Pade
/// scaling-and-squaring at it.
Mat2c propagator(const DimerParams& params, double t);

/// |<to| exp(-iHt) |from>|^2 from the bi-orthonormal decomposition.
double transition_probability(const DimerParams& params, Node from, Node to, double t);

/// Closed-form survival probability of the dimer without bath, valid for
/// 0 <= Gamma < 2V:
///   exp(-Gamma t) cos^2(phi - t V cos phi) / cos^2 phi,  phi = asin(Gamma / 2V).
/// Throws NumericalError for Gamma >= 2V (overdamped).
double survival_closed_form(const DimerParams& params, double t);

}  // namespace dimertrap
