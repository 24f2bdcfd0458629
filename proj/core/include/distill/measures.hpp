#pragma once

#include <string_view>

#include "distill/fock.hpp"
#include "distill/params.hpp"

namespace distill {

/// Weighted overlap sum_b w_b |<target|psi_b>|^2. Target and branches must
/// share a registry.
double fidelity_to_target(const MixedEnsemble& ensemble, const PureState& target);

/// Wootters concurrence C = max(0, l1 - l2 - l3 - l4) where the l_i are the
/// descending square roots of the eigenvalues of rho (Y(x)Y) rho* (Y(x)Y).
double concurrence(const TwoQubitDensity& rho);

/// Von Neumann entropy of the reduced single-qubit state of a normalized
/// two-qubit pure state, in bits.
double entropy_of_entanglement(const PureState& state, std::string_view mode_a,
                               std::string_view mode_b);

struct EfficiencyInputs {
  double entanglement_out = 0.0;   // E of the output state
  double success_probability = 0.0;
  double entanglement_in = 0.0;    // E of one input copy
  MeasureKind kind = MeasureKind::Concurrence;
};

/// Entanglement transformation efficiency E_out * P / (2 * E_in); two input
/// copies are consumed per attempt. Throws when E_in is zero.
double efficiency_eta(const EfficiencyInputs& inputs);

}  // namespace distill
