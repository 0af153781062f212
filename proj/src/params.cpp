#include "dimertrap/params.hpp"

#include <cmath>
#include <string>

#include "dimertrap/error.hpp"

namespace dimertrap {

void DimerParams::validate() const {
    if (!std::isfinite(E)) throw ConfigError("E must be finite");
    if (!(V > 0.0) || !std::isfinite(V)) throw ConfigError("V must be > 0");
    if (!(Gamma >= 0.0) || !std::isfinite(Gamma)) throw ConfigError("Gamma must be >= 0");
}

bool DimerParams::at_exceptional_point() const {
    return std::abs(Gamma - 2.0 * V) <= 1e-12 * V;
}

void BathParams::validate() const {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ConfigError("alpha must be >= 0");
    if (!(omega_c > 0.0) || !std::isfinite(omega_c)) throw ConfigError("omega_c must be > 0");
    if (!(T > 0.0) || !std::isfinite(T)) throw ConfigError("T must be > 0");
}

double BathParams::spectral_density(double omega) const {
    if (omega <= 0.0) return 0.0;
    return 2.0 * std::numbers::pi * alpha * omega * std::exp(-omega / omega_c);
}

}  // namespace dimertrap
