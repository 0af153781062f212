#include "dimertrap/path_integral.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "dimertrap/error.hpp"
#include "influence.hpp"

namespace dimertrap {

namespace {

constexpr cplx I{0.0, 1.0};

std::vector<double> coupling_values(const std::vector<int>& spins) {
    std::vector<double> s(spins.size());
    for (std::size_t k = 0; k < spins.size(); ++k) s[k] = 0.5 * spins[k];
    return s;
}

}  // namespace

cplx free_propagator_element(const DimerParams& p, Node n, Node n_prime, double dt,
                             Direction direction) {
    p.validate();
    if (!(dt > 0.0)) throw ConfigError("propagator time step must be > 0");
    if (p.at_exceptional_point()) {
        const Mat2c h = hamiltonian(p);
        if (direction == Direction::forward)
            return Mat2c(-I * dt * h).exp()(index(n), index(n_prime));
        return Mat2c(I * dt * h.adjoint()).exp()(index(n_prime), index(n));
    }
    const Spectrum2 s = eigensystem(p);
    cplx sum = 0.0;
    if (direction == Direction::forward) {
        for (int a = 0; a < 2; ++a)
            sum += s.right[a](index(n)) * std::conj(s.left[a](index(n_prime))) *
                   std::exp(-I * s.eigenvalues[a] * dt);
    } else {
        // H^dagger = sum_a conj(E_a) |L_a><R_a|.
        for (int a = 0; a < 2; ++a)
            sum += s.left[a](index(n_prime)) * std::conj(s.right[a](index(n))) *
                   std::exp(I * std::conj(s.eigenvalues[a]) * dt);
    }
    return sum;
}

namespace detail {

PropagatorTable forward_table(const DimerParams& p, double dt) {
    PropagatorTable u{};
    for (int to = 0; to < 2; ++to)
        for (int from = 0; from < 2; ++from)
            u[to][from] = free_propagator_element(p, static_cast<Node>(to),
                                                  static_cast<Node>(from), dt,
                                                  Direction::forward);
    return u;
}

}  // namespace detail

void KeldyshPath::validate() const {
    if (forward.size() != backward.size() || forward.size() < 2)
        throw ConfigError("Keldysh path: strings must have equal length >= 2");
    for (std::size_t k = 0; k < forward.size(); ++k)
        if (std::abs(forward[k]) != 1 || std::abs(backward[k]) != 1)
            throw ConfigError("Keldysh path: spins must be +-1");
    const int start = spin_of(Node::initial);
    if (forward.front() != start || backward.front() != start)
        throw ConfigError("Keldysh path: both strings must start on the initial node");
    if (forward.back() != backward.back())
        throw ConfigError("Keldysh path: strings must end on the same node");
}

cplx influence_phase(const KeldyshPath& path, const BathCorrelationTable& table) {
    path.validate();
    if (path.slices() != table.slices())
        throw ConfigError("Keldysh path and influence table disagree on slice count");
    const auto s = coupling_values(path.forward);
    const auto sp = coupling_values(path.backward);
    return detail::full_phase(table, s, sp);
}

cplx path_weight(const KeldyshPath& path, const BathCorrelationTable& table,
                 const DimerParams& p) {
    const cplx phi = influence_phase(path, table);
    const double dt = table.dt();
    cplx w = std::exp(-phi);
    for (int k = 0; k < path.slices(); ++k) {
        w *= free_propagator_element(p, node_of(path.forward[k + 1]), node_of(path.forward[k]),
                                     dt, Direction::forward);
        w *= free_propagator_element(p, node_of(path.backward[k + 1]),
                                     node_of(path.backward[k]), dt, Direction::backward);
    }
    return w;
}

SitePopulations exact_path_sum(const DimerParams& p, const BathParams& bath, double t,
                               int slices) {
    if (slices > max_enumeration_slices) {
        std::ostringstream msg;
        msg << "exact path sum refused: P = " << slices << " needs 2^" << 2 * (slices - 1) + 1
            << " terms (limit P <= " << max_enumeration_slices << ")";
        throw ConfigError(msg.str());
    }
    return exact_path_sum(p, influence_coefficients(bath, t, slices));
}

SitePopulations exact_path_sum(const DimerParams& p, const BathCorrelationTable& table) {
    p.validate();
    const int P = table.slices();
    if (P > max_enumeration_slices) throw ConfigError("exact path sum refused: P too large");
    const auto u = detail::forward_table(p, table.dt());
    const int interior = P - 1;
    const std::uint32_t count = 1u << interior;

    std::vector<double> s(P + 1);
    std::vector<double> sp(P + 1);
    s[0] = sp[0] = 0.5 * spin_of(Node::initial);

    // Interior spin k (1..P-1) is bit k-1 of the mask.
    auto load = [](std::vector<double>& v, std::uint32_t mask, int n) {
        for (int k = 1; k <= n; ++k) v[k] = ((mask >> (k - 1)) & 1u) ? 0.5 : -0.5;
    };
    auto amplitude = [&](const std::vector<double>& v) {
        cplx a = 1.0;
        for (int k = 0; k < P; ++k) a *= u[detail::slot(v[k + 1])][detail::slot(v[k])];
        return a;
    };

    SitePopulations out;
    for (const Node end : {Node::initial, Node::trap}) {
        s[P] = sp[P] = 0.5 * spin_of(end);
        // Kahan summation over per-forward-string subtotals.
        double total = 0.0;
        double carry = 0.0;
        for (std::uint32_t fm = 0; fm < count; ++fm) {
            load(s, fm, interior);
            const cplx af = amplitude(s);
            if (af == cplx(0.0)) continue;
            // Backward strings in Gray-code order: one spin flips per step.
            load(sp, 0, interior);
            cplx phi = detail::full_phase(table, s, sp);
            cplx subtotal = 0.0;
            for (std::uint32_t g = 0; g < count; ++g) {
                if (g > 0) {
                    const int j = std::countr_zero(g) + 1;
                    sp[j] = -sp[j];
                    if ((g & 63u) == 0) {
                        phi = detail::full_phase(table, s, sp);
                    } else {
                        sp[j] = -sp[j];
                        const cplx before = detail::phase_terms_at(table, s, sp, j);
                        sp[j] = -sp[j];
                        phi += detail::phase_terms_at(table, s, sp, j) - before;
                    }
                }
                subtotal += std::conj(amplitude(sp)) * std::exp(-phi);
            }
            const double y = (af * subtotal).real() - carry;
            const double next = total + y;
            carry = (next - total) - y;
            total = next;
        }
        (end == Node::initial ? out.initial : out.trap) = total;
    }
    return out;
}

}  // namespace dimertrap
