#include "dimertrap/classical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <unsupported/Eigen/LevenbergMarquardt>

#include "dimertrap/error.hpp"
#include "dimertrap/lindblad.hpp"

namespace dimertrap {

void ClassicalRates::validate() const {
    if (!std::isfinite(E) || !std::isfinite(V) || !std::isfinite(Gamma))
        throw ConfigError("classical rates must be finite");
    if (!(V > 0.0)) throw ConfigError("classical hopping rate must be > 0");
    if (E < 0.0 || Gamma < 0.0) throw ConfigError("classical rates must be >= 0");
}

Eigen::Matrix2d ClassicalRates::transfer_matrix() const {
    Eigen::Matrix2d t;
    t << E, -V, -V, E + Gamma;
    return t;
}

ClassicalSpectrum classical_eigensystem(const ClassicalRates& rates) {
    rates.validate();
    const double r = std::sqrt(rates.V * rates.V + 0.25 * rates.Gamma * rates.Gamma);
    const double centre = rates.E + 0.5 * rates.Gamma;
    ClassicalSpectrum out;
    out.eigenvalues = {centre + r, centre - r};
    out.psi = std::asinh(rates.Gamma / (2.0 * rates.V));
    for (int a = 0; a < 2; ++a) {
        // (E - lambda) x - V y = 0
        Eigen::Vector2d v(rates.V, rates.E - out.eigenvalues[a]);
        out.eigenvectors[a] = v.normalized();
    }
    return out;
}

namespace {

// Model evaluation without validation so the optimizer may wander through
// unphysical territory; depends on V only through |V|.
double survival_unchecked(double E, double V, double Gamma, double t) {
    const double v = std::abs(V);
    const double psi = std::asinh(Gamma / (2.0 * v));
    const double ch = std::cosh(psi);
    const double x = psi + t * v * ch;
    const double c = t * (E + 0.5 * Gamma);
    // exp(-c) cosh(x), kept finite for large t
    return 0.5 * (std::exp(x - c) + std::exp(-x - c)) / ch;
}

struct Problem {
    std::vector<double> t;
    std::vector<double> y;
    std::vector<double> w;  // 1/sigma

    Eigen::VectorXd residuals(const Eigen::VectorXd& p) const {
        Eigen::VectorXd r(static_cast<Eigen::Index>(t.size()));
        for (std::size_t i = 0; i < t.size(); ++i)
            r(static_cast<Eigen::Index>(i)) =
                w[i] * (survival_unchecked(p(0), p(1), p(2), t[i]) - y[i]);
        return r;
    }

    Eigen::MatrixXd jacobian(const Eigen::VectorXd& p) const {
        Eigen::MatrixXd j(static_cast<Eigen::Index>(t.size()), 3);
        for (int c = 0; c < 3; ++c) {
            const double h = 1e-7 * std::max(1.0, std::abs(p(c)));
            Eigen::VectorXd up = p;
            Eigen::VectorXd down = p;
            up(c) += h;
            down(c) -= h;
            j.col(c) = (residuals(up) - residuals(down)) / (2.0 * h);
        }
        return j;
    }
};

struct Solution {
    Eigen::Vector3d p;
    double cost;
    int iterations;
    bool converged;
};

struct Residuals : Eigen::DenseFunctor<double> {
    const Problem& prob;
    explicit Residuals(const Problem& p) : DenseFunctor<double>(3, static_cast<int>(p.t.size())), prob(p) {}
    int operator()(const InputType& x, ValueType& r) const {
        r = prob.residuals(x);
        return 0;
    }
    int df(const InputType& x, JacobianType& j) const {
        j = prob.jacobian(x);
        return 0;
    }
};

Solution levenberg_marquardt(const Problem& prob, const Eigen::Vector3d& start) {
    Residuals f(prob);
    Eigen::LevenbergMarquardt<Residuals> lm(f);
    lm.setMaxfev(2000);
    lm.setXtol(1e-14);
    lm.setFtol(1e-16);
    Eigen::VectorXd p = start;
    const auto status = lm.minimize(p);
    const double cost = prob.residuals(p).squaredNorm();
    // 1-4 are the convergence exits; 6-8 mean no further progress is possible
    // at machine precision, which is convergence for a zero-residual fit.
    using namespace Eigen::LevenbergMarquardtSpace;
    const bool converged = std::isfinite(cost) && status != ImproperInputParameters &&
                           status != TooManyFunctionEvaluation;
    return {p, cost, static_cast<int>(lm.iterations()), converged};
}

}  // namespace

double classical_survival(const ClassicalRates& rates, double t) {
    rates.validate();
    if (t < 0.0) throw ConfigError("classical survival needs t >= 0");
    return survival_unchecked(rates.E, rates.V, rates.Gamma, t);
}

ClassicalFit fit_classical_rates(const TimeSeries& series) {
    series.validate();
    if (series.size() < 20) throw ConfigError("classical fit needs >= 20 points");
    Problem prob;
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (!(series.values[i] > 0.0))
            throw ConfigError("classical fit needs positive survival values");
        prob.t.push_back(series.times[i]);
        prob.y.push_back(series.values[i]);
        double w = 1.0;
        if (series.errors && (*series.errors)[i] > 0.0) w = 1.0 / (*series.errors)[i];
        prob.w.push_back(w);
    }

    // Long-time envelope rate seeds Gamma~ = 2 * rate (valid for E~ = V~).
    double rate = 0.0;
    const double t0 = series.times.front();
    const double t1 = series.times.back();
    try {
        rate = fit_decay_rate(series, {t0 + 0.5 * (t1 - t0), t1});
    } catch (const NumericalError&) {
        rate = fit_decay_rate(series, {t0, t1});
    }
    rate = std::max(rate, 1e-6);

    Solution best{Eigen::Vector3d::Zero(), std::numeric_limits<double>::infinity(), 0, false};
    const double span = std::max(t1 - t0, 1e-12);
    for (const double hop : {0.1, 0.3, 1.0, 3.0, 10.0, 30.0}) {
        const double v = hop / span * 10.0;
        const Solution s = levenberg_marquardt(prob, Eigen::Vector3d(v, v, 2.0 * rate));
        if (s.cost < best.cost || (s.converged && !best.converged && s.cost <= best.cost * 1.0001))
            best = s;
    }
    if (!best.converged) {
        std::ostringstream msg;
        msg << "classical fit did not converge (residual " << std::sqrt(best.cost) << ")";
        throw NumericalError(msg.str());
    }
    ClassicalFit fit;
    fit.rates = {best.p(0), std::abs(best.p(1)), best.p(2)};
    fit.residual_norm = std::sqrt(best.cost);
    fit.iterations = best.iterations;
    if (fit.rates.E < 0.0 || fit.rates.Gamma < 0.0)
        throw NumericalError("model mismatch: fitted classical rates are negative");
    return fit;
}

}  // namespace dimertrap
