#include "dimertrap/spectrum.hpp"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "dimertrap/error.hpp"

namespace dimertrap {

namespace {

constexpr cplx I{0.0, 1.0};

Vec2c normalized_right_vector(const DimerParams& p, cplx eigenvalue) {
    // First row of (H - mu) v = 0 gives v = (V, E - mu); V > 0 so v != 0.
    Vec2c v(cplx(p.V, 0.0), p.E - eigenvalue);
    const cplx norm = std::sqrt(v(0) * v(0) + v(1) * v(1));
    if (std::abs(norm) < 1e-14 * p.V)
        throw NumericalError("exceptional point: bi-orthonormal basis undefined");
    v /= norm;
    const double re = v(0).real();
    const bool flip = std::abs(re) <= 1e-15 * std::abs(v(0)) ? v(0).imag() < 0.0 : re < 0.0;
    if (flip) v = -v;
    return v;
}

}  // namespace

Mat2c hamiltonian_trap_free(const DimerParams& p) {
    Mat2c h;
    h << p.E, -p.V, -p.V, p.E;
    return h;
}

Mat2c hamiltonian(const DimerParams& p) {
    Mat2c h = hamiltonian_trap_free(p);
    h(1, 1) -= I * p.Gamma;
    return h;
}

Spectrum2 eigensystem(const DimerParams& p) {
    p.validate();
    if (p.at_exceptional_point())
        throw NumericalError("exceptional point: bi-orthonormal basis undefined");

    const cplx root = std::sqrt(cplx(p.V * p.V - 0.25 * p.Gamma * p.Gamma, 0.0));
    const cplx shift(p.E, -0.5 * p.Gamma);

    Spectrum2 s;
    s.eigenvalues = {shift + root, shift - root};
    for (int a = 0; a < 2; ++a) {
        s.right[a] = normalized_right_vector(p, s.eigenvalues[a]);
        // H is complex symmetric, so <L_a| = R_a^T.
        s.left[a] = s.right[a].conjugate();
    }
    return s;
}

Mat2c Spectrum2::propagator(double t) const {
    Mat2c u = Mat2c::Zero();
    for (int a = 0; a < 2; ++a)
        u += std::exp(-I * eigenvalues[a] * t) * right[a] * left[a].adjoint();
    return u;
}

Mat2c propagator(const DimerParams& p, double t) {
    if (p.at_exceptional_point()) {
        const Mat2c generator = -I * t * hamiltonian(p);
        return generator.exp();
    }
    return eigensystem(p).propagator(t);
}

double transition_probability(const DimerParams& p, Node from, Node to, double t) {
    const Spectrum2 s = eigensystem(p);
    cplx amplitude = 0.0;
    for (int a = 0; a < 2; ++a)
        amplitude += std::exp(-I * s.eigenvalues[a] * t) * s.right[a](index(to)) *
                     std::conj(s.left[a](index(from)));
    return std::norm(amplitude);
}

double survival_closed_form(const DimerParams& p, double t) {
    p.validate();
    if (p.Gamma >= 2.0 * p.V)
        throw NumericalError("overdamped regime: closed-form survival not applicable");
    const double phi = std::asin(p.Gamma / (2.0 * p.V));
    const double c = std::cos(phi);
    const double osc = std::cos(phi - t * p.V * c);
    return std::exp(-p.Gamma * t) * osc * osc / (c * c);
}

}  // namespace dimertrap
