#include "dimertrap/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dimertrap/error.hpp"

namespace dimertrap {

namespace {

constexpr cplx I{0.0, 1.0};

// Integral of the piecewise-linear interpolant of `s` over [lo, hi], divided by hi - lo.
double window_mean(const TimeSeries& s, double lo, double hi) {
    double area = 0.0;
    for (std::size_t i = 1; i < s.size(); ++i) {
        const double a = std::max(lo, s.times[i - 1]);
        const double b = std::min(hi, s.times[i]);
        if (b <= a) continue;
        const double fa = s.interpolate(a);
        const double fb = s.interpolate(b);
        area += 0.5 * (fa + fb) * (b - a);
    }
    return area / (hi - lo);
}

}  // namespace

DensityMatrix2 DensityMatrix2::localized(Node n) {
    Mat2c m = Mat2c::Zero();
    m(index(n), index(n)) = 1.0;
    return DensityMatrix2(m);
}

bool DensityMatrix2::is_physical() const {
    if (std::abs(m_(0, 1) - std::conj(m_(1, 0))) > 1e-12) return false;
    for (int j = 0; j < 2; ++j) {
        if (std::abs(m_(j, j).imag()) > 1e-12) return false;
        const double p = m_(j, j).real();
        if (p < -1e-12 || p > 1.0 + 1e-12) return false;
    }
    const double tr = trace();
    if (tr > 1.0 + 1e-12) return false;
    const double half_gap = 0.5 * (m_(0, 0).real() - m_(1, 1).real());
    const double radius = std::sqrt(half_gap * half_gap + std::norm(m_(0, 1)));
    return 0.5 * tr - radius >= -1e-10;
}

void IntegratorConfig::validate() const {
    if (!(dt > 0.0)) throw ConfigError("dt must be > 0");
    if (!(t_max > 0.0)) throw ConfigError("t_max must be > 0");
}

IntegratorConfig IntegratorConfig::defaults_for(const DimerParams& p, double lambda,
                                                double t_max) {
    const double scale = std::max({p.V, p.Gamma, lambda, 1.0});
    return IntegratorConfig{std::min(1e-3, 0.01 / scale), t_max};
}

Mat2c lvne_rhs(const Mat2c& rho, const DimerParams& p, double lambda) {
    const Mat2c h0 = hamiltonian_trap_free(p);
    Mat2c d = -I * (h0 * rho - rho * h0);
    // -{Gamma |2><2|, rho}
    d.row(1) -= p.Gamma * rho.row(1);
    d.col(1) -= p.Gamma * rho.col(1);
    // -2 lambda (rho - diag rho)
    d(0, 1) -= 2.0 * lambda * rho(0, 1);
    d(1, 0) -= 2.0 * lambda * rho(1, 0);
    return d;
}

std::vector<DensityMatrix2> propagate_lvne_states(const DensityMatrix2& rho0,
                                                  const DimerParams& p, double lambda,
                                                  std::span<const double> grid,
                                                  const IntegratorConfig& cfg) {
    p.validate();
    cfg.validate();
    if (!(lambda >= 0.0)) throw ConfigError("lambda must be >= 0");
    if (!rho0.is_physical()) throw ConfigError("initial density matrix is not physical");

    std::vector<DensityMatrix2> out;
    out.reserve(grid.size());
    Mat2c rho = rho0.matrix();
    double now = 0.0;
    for (const double target : grid) {
        if (target < now || target > cfg.t_max + 1e-12)
            throw ConfigError("grid time " + std::to_string(target) +
                              " outside [0, t_max] or not increasing");
        const double span = target - now;
        const auto steps = static_cast<long>(std::ceil(span / cfg.dt - 1e-9));
        if (steps > 0) {
            const double h = span / static_cast<double>(steps);
            for (long s = 0; s < steps; ++s) {
                const Mat2c k1 = lvne_rhs(rho, p, lambda);
                const Mat2c k2 = lvne_rhs(rho + 0.5 * h * k1, p, lambda);
                const Mat2c k3 = lvne_rhs(rho + 0.5 * h * k2, p, lambda);
                const Mat2c k4 = lvne_rhs(rho + h * k3, p, lambda);
                rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                const double t_step = now + h * static_cast<double>(s + 1);
                if (!rho.allFinite() || rho.trace().real() > 1.0 + 1e-9)
                    throw NumericalError("LvNE integration unstable at t = " +
                                         std::to_string(t_step));
            }
        }
        now = target;
        out.emplace_back(rho);
    }
    return out;
}

TimeSeries propagate_lvne(const DensityMatrix2& rho0, const DimerParams& p, double lambda,
                          std::span<const double> grid, const IntegratorConfig& cfg) {
    const auto states = propagate_lvne_states(rho0, p, lambda, grid, cfg);
    TimeSeries out;
    out.times.assign(grid.begin(), grid.end());
    out.values.reserve(states.size());
    for (const auto& rho : states) out.values.push_back(rho.population(Node::initial));
    return out;
}

double pi11_trapfree_closed(double V, double lambda, double t) {
    const double disc = 4.0 * V * V - lambda * lambda;
    const double x = std::sqrt(std::abs(disc));
    double c = 0.0;
    double sinc = 0.0;  // sin(xt)/x, or sinh(xt)/x past the crossover
    if (x * t < 1e-6 || x < 1e-6) {
        const double sign = disc >= 0.0 ? 1.0 : -1.0;
        const double x2t2 = sign * x * x * t * t;
        c = 1.0 - 0.5 * x2t2;
        sinc = t * (1.0 - x2t2 / 6.0);
    } else if (disc >= 0.0) {
        c = std::cos(x * t);
        sinc = std::sin(x * t) / x;
    } else {
        // x < lambda here; fold exp(-lambda t) in to avoid cosh overflow
        const double slow = std::exp((x - lambda) * t);
        const double fast = std::exp(-(x + lambda) * t);
        return 0.5 + 0.25 * (lambda * (slow - fast) / x + slow + fast);
    }
    return 0.5 + 0.5 * std::exp(-lambda * t) * (lambda * sinc + c);
}

double survival_approx(const DimerParams& p, double lambda, double t) {
    const double w = 2.0 * p.V * t;
    const double bracket =
        0.5 + 0.5 * std::exp(-lambda * t) * (std::cos(w) + lambda / (2.0 * p.V) * std::sin(w));
    return std::exp(-p.Gamma * t) * bracket;
}

double oscillation_period(const DimerParams& p) {
    if (p.Gamma >= 2.0 * p.V) return std::numbers::pi / p.V;
    const double phi = std::asin(p.Gamma / (2.0 * p.V));
    return std::numbers::pi / (p.V * std::cos(phi));
}

double fit_decay_rate(const TimeSeries& series, std::pair<double, double> window,
                      double period) {
    series.validate();
    const auto [t_a, t_b] = window;
    const TimeSeries raw = series.slice(t_a, t_b);
    if (raw.size() < 10)
        throw NumericalError("fit_decay_rate: fewer than 10 points in window");
    for (const double v : raw.values)
        if (!(v > 0.0)) throw NumericalError("fit_decay_rate: non-positive value in window");

    std::vector<double> ts;
    std::vector<double> logs;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        double v = raw.values[i];
        if (period > 0.0) {
            const double lo = raw.times[i] - 0.5 * period;
            const double hi = raw.times[i] + 0.5 * period;
            if (lo < series.times.front() || hi > series.times.back()) continue;
            v = window_mean(series, lo, hi);
            if (!(v > 0.0)) throw NumericalError("fit_decay_rate: non-positive smoothed value");
        }
        ts.push_back(raw.times[i]);
        logs.push_back(std::log(v));
    }
    if (ts.size() < 10)
        throw NumericalError("fit_decay_rate: fewer than 10 smoothed points in window");

    const auto n = static_cast<double>(ts.size());
    double mt = 0.0;
    double ml = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        mt += ts[i];
        ml += logs[i];
    }
    mt /= n;
    ml /= n;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        sxy += (ts[i] - mt) * (logs[i] - ml);
        sxx += (ts[i] - mt) * (ts[i] - mt);
    }
    return -sxy / sxx;
}

}  // namespace dimertrap
