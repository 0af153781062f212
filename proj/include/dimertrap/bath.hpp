#pragma once

#include <vector>

#include "dimertrap/params.hpp"
#include "dimertrap/spectrum.hpp"

namespace dimertrap {

/// Bath autocorrelation
///   L(t) = (1/pi) int_0^inf dw J(w) [coth(w/2T) cos(wt) - i sin(wt)]
/// by adaptive Gauss-Kronrod quadrature (relative tolerance 1e-8).
/// Throws NumericalError when the quadrature does not converge.
cplx bath_autocorrelation(const BathParams& bath, double t);

/// Second antiderivative Q(t) = int_0^t ds int_0^s du L(u), t >= 0:
///   Q(t) = (1/pi) int dw J(w)/w^2 [coth(w/2T)(1 - cos wt) + i(sin wt - wt)].
/// The imaginary part has the closed form 2 alpha (atan(omega_c t) - omega_c t).
cplx bath_kernel_integral(const BathParams& bath, double t);

/// Window-integrated influence coefficients eta_{kk'} for 0 <= k' <= k <= P.
///
/// Grid point k stands for the window [(k-1/2) dt, (k+1/2) dt] clipped to
/// [0, P dt], so both endpoints carry half windows. Off-diagonal entries are
/// double integrals of L(t-t') over window pairs; diagonal entries integrate
/// the ordered half t > t'.
class BathCorrelationTable {
public:
    BathCorrelationTable(int slices, double dt, std::vector<cplx> eta);

    int slices() const { return slices_; }
    double dt() const { return dt_; }

    cplx eta(int k, int k_prime) const {
        return eta_[static_cast<std::size_t>(k) * (slices_ + 1) + k_prime];
    }

private:
    int slices_;
    double dt_;
    std::vector<cplx> eta_;  // dense (P+1)^2, lower triangle used
};

BathCorrelationTable influence_coefficients(const BathParams& bath, double t_total, int slices);

}  // namespace dimertrap
