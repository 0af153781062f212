#include "dimertrap/bath.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "dimertrap/error.hpp"

namespace dimertrap {

namespace {

constexpr double relative_tolerance = 1e-8;

// w * coth(w / 2T), continuous at w = 0.
double w_coth(double w, double T) {
    const double x = w / (2.0 * T);
    if (x < 1e-4) return 2.0 * T * (1.0 + x * x / 3.0);
    return w / std::tanh(x);
}

// Integral of f over [0, cutoff_factor * omega_c], split into pieces no wider
// than a quarter oscillation period of frequency `t`.
template <class F>
double integrate_spectrum(F f, const BathParams& bath, double t, const char* what) {
    using boost::math::quadrature::gauss_kronrod;
    const double upper = 40.0 * bath.omega_c;
    double width = bath.omega_c;
    if (std::abs(t) > 0.0) width = std::min(width, 0.5 * std::numbers::pi / std::abs(t));
    const auto pieces = static_cast<int>(std::ceil(upper / width));
    const double h = upper / pieces;

    double total = 0.0;
    double error = 0.0;
    double l1 = 0.0;
    for (int i = 0; i < pieces; ++i) {
        double piece_error = 0.0;
        double piece_l1 = 0.0;
        total += gauss_kronrod<double, 21>::integrate(f, i * h, (i + 1) * h, 12, 1e-11,
                                                      &piece_error, &piece_l1);
        error += piece_error;
        l1 += piece_l1;
    }
    if (error > relative_tolerance * std::max(l1, 1e-300) && error > 1e-14) {
        std::ostringstream msg;
        msg << what << ": quadrature did not converge at t = " << t
            << " (achieved tolerance " << error / std::max(l1, 1e-300) << ")";
        throw NumericalError(msg.str());
    }
    return total;
}

}  // namespace

cplx bath_autocorrelation(const BathParams& bath, double t) {
    bath.validate();
    if (bath.alpha == 0.0) return 0.0;
    const double a = bath.alpha;
    const double wc = bath.omega_c;
    const double T = bath.T;
    // (1/pi) J(w) = 2 alpha w exp(-w/omega_c)
    const double re = integrate_spectrum(
        [&](double w) { return 2.0 * a * std::exp(-w / wc) * w_coth(w, T) * std::cos(w * t); },
        bath, t, "bath autocorrelation");
    const double im = integrate_spectrum(
        [&](double w) { return -2.0 * a * w * std::exp(-w / wc) * std::sin(w * t); }, bath, t,
        "bath autocorrelation");
    return {re, im};
}

cplx bath_kernel_integral(const BathParams& bath, double t) {
    bath.validate();
    if (t < 0.0) throw ConfigError("bath kernel integral needs t >= 0");
    if (bath.alpha == 0.0 || t == 0.0) return 0.0;
    const double a = bath.alpha;
    const double wc = bath.omega_c;
    const double T = bath.T;
    // (1 - cos wt) / w^2 = 2 sin^2(wt/2) / w^2, with w coth(w/2T) carrying the 1/w.
    const double re = integrate_spectrum(
        [&](double w) {
            const double half = 0.5 * w * t;
            const double sinc = half < 1e-8 ? 0.5 * t : std::sin(half) / w;
            return 2.0 * a * std::exp(-w / wc) * w_coth(w, T) * 2.0 * sinc * sinc;
        },
        bath, t, "bath kernel integral");
    const double im = 2.0 * a * (std::atan(wc * t) - wc * t);
    return {re, im};
}

BathCorrelationTable::BathCorrelationTable(int slices, double dt, std::vector<cplx> eta)
    : slices_(slices), dt_(dt), eta_(std::move(eta)) {
    if (eta_.size() != static_cast<std::size_t>(slices + 1) * (slices + 1))
        throw ConfigError("influence table has wrong size");
}

BathCorrelationTable influence_coefficients(const BathParams& bath, double t_total, int slices) {
    bath.validate();
    if (slices < 1) throw ConfigError("slice count must be >= 1");
    if (!(t_total > 0.0)) throw ConfigError("t_total must be > 0");
    const double dt = t_total / slices;
    const int n = slices + 1;

    // Window edges sit on multiples of dt/2; tabulate Q there.
    std::vector<cplx> q(static_cast<std::size_t>(2 * slices + 1));
    for (int m = 0; m <= 2 * slices; ++m) q[m] = bath_kernel_integral(bath, 0.5 * dt * m);

    auto lo = [&](int k) { return std::max(0, 2 * k - 1); };
    auto hi = [&](int k) { return std::min(2 * slices, 2 * k + 1); };

    std::vector<cplx> eta(static_cast<std::size_t>(n) * n, cplx(0.0));
    for (int k = 0; k <= slices; ++k) {
        eta[static_cast<std::size_t>(k) * n + k] = q[hi(k) - lo(k)];
        for (int kp = 0; kp < k; ++kp) {
            eta[static_cast<std::size_t>(k) * n + kp] =
                q[hi(k) - lo(kp)] - q[hi(k) - hi(kp)] - q[lo(k) - lo(kp)] + q[lo(k) - hi(kp)];
        }
    }
    return BathCorrelationTable(slices, dt, std::move(eta));
}

}  // namespace dimertrap
