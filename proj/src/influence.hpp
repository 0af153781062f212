#pragma once

// Internal helpers shared by the exact path sum and the Monte Carlo sampler.

#include <array>
#include <span>

#include "dimertrap/bath.hpp"
#include "dimertrap/params.hpp"
#include "dimertrap/spectrum.hpp"

namespace dimertrap::detail {

/// Bath-coupling eigenvalue s = sigma/2 as stored in the sampler arrays.
inline int slot(double s) { return s < 0.0 ? 0 : 1; }

/// Phi over all slices, O(P^2).
inline cplx full_phase(const BathCorrelationTable& table, std::span<const double> s,
                       std::span<const double> sp) {
    cplx phi = 0.0;
    for (int k = 0; k <= table.slices(); ++k) {
        const double xk = s[k] - sp[k];
        if (xk == 0.0) continue;
        cplx row = 0.0;
        for (int kp = 0; kp <= k; ++kp) {
            const cplx e = table.eta(k, kp);
            row += e * s[kp] - std::conj(e) * sp[kp];
        }
        phi += xk * row;
    }
    return phi;
}

/// Every term of Phi in which slice j appears, O(P). Flipping spins at j
/// changes Phi by the difference of this quantity before and after.
inline cplx phase_terms_at(const BathCorrelationTable& table, std::span<const double> s,
                           std::span<const double> sp, int j) {
    cplx sum = 0.0;
    const double xj = s[j] - sp[j];
    if (xj != 0.0) {
        cplx row = 0.0;
        for (int kp = 0; kp <= j; ++kp) {
            const cplx e = table.eta(j, kp);
            row += e * s[kp] - std::conj(e) * sp[kp];
        }
        sum += xj * row;
    }
    for (int k = j + 1; k <= table.slices(); ++k) {
        const double xk = s[k] - sp[k];
        if (xk == 0.0) continue;
        const cplx e = table.eta(k, j);
        sum += xk * (e * s[j] - std::conj(e) * sp[j]);
    }
    return sum;
}

/// Forward short-time propagator U(to, from) indexed by slot.
using PropagatorTable = std::array<std::array<cplx, 2>, 2>;

PropagatorTable forward_table(const DimerParams& params, double dt);

}  // namespace dimertrap::detail
