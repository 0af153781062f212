#pragma once

#include <numbers>

namespace dimertrap {

/// Site index of the dimer. The excitation starts on `initial`; `trap` absorbs it.
enum class Node { initial = 0, trap = 1 };

constexpr int index(Node n) { return static_cast<int>(n); }

/// Dimer Hamiltonian H = E*1 - V*sigma_x - i*Gamma|trap><trap| (hbar = 1).
struct DimerParams {
    double E{1.0};
    double V{1.0};
    double Gamma{0.0};

    /// Throws ConfigError unless V > 0, Gamma >= 0 and E finite.
    void validate() const;

    /// Gamma == 2V within relative 1e-12: the non-Hermitian spectrum is defective.
    bool at_exceptional_point() const;

    bool operator==(const DimerParams&) const = default;
};

/// Ohmic Caldeira-Leggett bath with exponential cutoff (k_B = 1).
struct BathParams {
    double alpha{0.0};
    double omega_c{5.0};
    double T{1.0};

    void validate() const;

    /// Markovian dephasing rate pi*alpha*T.
    double lambda() const { return std::numbers::pi * alpha * T; }

    bool operator==(const BathParams&) const = default;

    /// J(w) = 2 pi alpha w exp(-w/omega_c) for w >= 0, zero otherwise.
    double spectral_density(double omega) const;
};

}  // namespace dimertrap
