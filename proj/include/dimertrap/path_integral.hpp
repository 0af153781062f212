#pragma once

#include <cstdint>
#include <vector>

#include "dimertrap/bath.hpp"
#include "dimertrap/params.hpp"
#include "dimertrap/spectrum.hpp"

namespace dimertrap {

enum class Direction { forward, backward };

/// Forward: <n| exp(-iH dt) |n'>. Backward: <n'| exp(+iH^dagger dt) |n>,
/// the complex conjugate of the forward element.
cplx free_propagator_element(const DimerParams& params, Node n, Node n_prime, double dt,
                             Direction direction);

/// sigma_z label of a node: -1 for the initial node, +1 for the trap.
constexpr int spin_of(Node n) { return n == Node::initial ? -1 : 1; }
constexpr Node node_of(int spin) { return spin < 0 ? Node::initial : Node::trap; }

/// Discretized forward/backward spin strings sigma_0..sigma_P, sigma'_0..sigma'_P.
/// Both start on the initial node and end on the same node.
struct KeldyshPath {
    std::vector<int> forward;
    std::vector<int> backward;

    int slices() const { return static_cast<int>(forward.size()) - 1; }
    Node endpoint() const { return node_of(forward.back()); }

    /// Throws ConfigError unless strings have equal length >= 2, entries are
    /// +-1 and the boundary conditions hold.
    void validate() const;
};

/// Influence phase Phi = sum_{k>=k'} (s_k - s'_k)(eta_kk' s_k' - conj(eta_kk') s'_k')
/// with bath-coupling eigenvalues s = sigma/2.
cplx influence_phase(const KeldyshPath& path, const BathCorrelationTable& table);

/// prod_k U(s_{k+1}, s_k) conj(U(s'_{k+1}, s'_k)) exp(-Phi), U = exp(-iH dt).
cplx path_weight(const KeldyshPath& path, const BathCorrelationTable& table,
                 const DimerParams& params);

struct SitePopulations {
    double initial{0.0};  ///< pi_{1,1}(t)
    double trap{0.0};     ///< pi_{2,1}(t)
};

/// Largest slice count accepted by exact_path_sum.
inline constexpr int max_enumeration_slices = 12;

/// Deterministic sum over all 2^(2(P-1)+1) paths. Throws ConfigError above
/// max_enumeration_slices.
SitePopulations exact_path_sum(const DimerParams& params, const BathParams& bath, double t,
                               int slices);

/// Same sum with a prebuilt coefficient table.
SitePopulations exact_path_sum(const DimerParams& params, const BathCorrelationTable& table);

}  // namespace dimertrap
