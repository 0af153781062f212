#pragma once

#include <span>
#include <utility>

#include "dimertrap/params.hpp"
#include "dimertrap/spectrum.hpp"
#include "dimertrap/time_series.hpp"

namespace dimertrap {

/// 2x2 reduced density matrix in the site basis. Trace leaks through the trap.
class DensityMatrix2 {
public:
    DensityMatrix2() : m_(Mat2c::Zero()) {}
    explicit DensityMatrix2(const Mat2c& m) : m_(m) {}

    /// |n><n|
    static DensityMatrix2 localized(Node n);

    const Mat2c& matrix() const { return m_; }
    cplx operator()(int j, int k) const { return m_(j, k); }
    double population(Node n) const { return m_(index(n), index(n)).real(); }
    double trace() const { return m_.trace().real(); }

    /// Hermitian within 1e-12, diagonal in [-1e-12, 1+1e-12], trace <= 1+1e-12,
    /// eigenvalues >= -1e-10.
    bool is_physical() const;

private:
    Mat2c m_;
};

struct IntegratorConfig {
    double dt{1e-3};
    double t_max{60.0};

    void validate() const;

    /// dt = 0.01 / max(V, Gamma, lambda, 1)
    static IntegratorConfig defaults_for(const DimerParams& params, double lambda, double t_max);

    bool operator==(const IntegratorConfig&) const = default;
};

/// d rho/dt = -i[H0, rho] - {Gamma|2><2|, rho} - 2 lambda (rho - diag rho).
Mat2c lvne_rhs(const Mat2c& rho, const DimerParams& params, double lambda);

/// Density matrices on `grid` from fixed-step RK4. Grid points need not be
/// multiples of dt; each interval is split into equal substeps no wider than dt.
/// Throws NumericalError naming the time at which an entry turned NaN or the
/// trace exceeded 1 + 1e-9.
std::vector<DensityMatrix2> propagate_lvne_states(const DensityMatrix2& rho0,
                                                  const DimerParams& params, double lambda,
                                                  std::span<const double> grid,
                                                  const IntegratorConfig& cfg);

/// Survival probability rho_11(t) on `grid`.
TimeSeries propagate_lvne(const DensityMatrix2& rho0, const DimerParams& params,
                          double lambda, std::span<const double> grid,
                          const IntegratorConfig& cfg);

/// pi_11(t) for the trap-free dimer with dephasing rate lambda. The
/// lambda = 2V crossover is continuous (series below |x| < 1e-6), lambda > 2V
/// uses the hyperbolic branch.
double pi11_trapfree_closed(double V, double lambda, double t);

/// exp(-Gamma t) [1/2 + exp(-lambda t)/2 (cos 2Vt + lambda/(2V) sin 2Vt)].
/// Requires Gamma < 2V.
double survival_approx(const DimerParams& params, double lambda, double t);

/// Envelope decay rate: slope of -log of the period-averaged series on
/// [t_a, t_b]. `period` <= 0 disables smoothing.
double fit_decay_rate(const TimeSeries& series, std::pair<double, double> window,
                      double period = 0.0);

/// Oscillation period 2 pi / (2 V cos phi) of the trapped dimer; falls back to
/// pi / V when Gamma >= 2V.
double oscillation_period(const DimerParams& params);

}  // namespace dimertrap
