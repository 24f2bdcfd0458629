#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "distill/fock.hpp"

namespace distill {

/// Passive linear-optical element: a unitary map from creation operators of
/// the input modes to creation operators of the output modes,
///   a^dag(in_j) -> sum_i matrix(i, j) a^dag(out_i).
/// Input and output mode lists are either identical (polarization elements)
/// or disjoint (beam-splitter style rerouting). Unlisted modes are untouched.
class LinearElement {
 public:
  LinearElement(std::string name, RegistryPtr reg, std::vector<std::size_t> in_modes,
                std::vector<std::size_t> out_modes, Eigen::MatrixXcd matrix,
                double unitary_tol = 1e-12);

  /// 2x2 action on the H/V submodes of a single spatial channel.
  static LinearElement polarization(std::string name, const RegistryPtr& reg,
                                    std::string_view spatial,
                                    const Eigen::Matrix2cd& matrix);

  const std::string& name() const { return name_; }
  const RegistryPtr& registry() const { return reg_; }
  const std::vector<std::size_t>& in_modes() const { return in_modes_; }
  const std::vector<std::size_t>& out_modes() const { return out_modes_; }
  const Eigen::MatrixXcd& matrix() const { return matrix_; }

 private:
  std::string name_;
  RegistryPtr reg_;
  std::vector<std::size_t> in_modes_;
  std::vector<std::size_t> out_modes_;
  Eigen::MatrixXcd matrix_;
};

/// Polarizing beam splitter with fixed routing convention:
///   H @ in1 -> out_cross,  V @ in1 -> out_keep,
///   H @ in2 -> out_keep,   V @ in2 -> out_cross,
/// all coefficients +1. The four spatial labels must be distinct.
LinearElement pbs(const RegistryPtr& reg, std::string_view in1, std::string_view in2,
                  std::string_view out_keep, std::string_view out_cross);

/// Polarization bit flip (H <-> V) on one spatial channel.
LinearElement hwp_flip(const RegistryPtr& reg, std::string_view spatial);

/// Hadamard on the polarization pair: H -> (H+V)/sqrt2, V -> (H-V)/sqrt2.
LinearElement hadamard_wp(const RegistryPtr& reg, std::string_view spatial);

/// Multiplies both polarization creation operators of one spatial channel by
/// exp(i*delta); a ket picks up the phase once per photon in that channel.
LinearElement phase_shift(const RegistryPtr& reg, std::string_view spatial,
                          double delta);

/// Polarization phase flip (V -> -V) on one spatial channel.
LinearElement pauli_z(const RegistryPtr& reg, std::string_view spatial);

/// Exact bosonic action on a multi-photon state; multi-occupancy kets carry
/// the sqrt(n!) conversion between operator powers and number states. Norm
/// preserving for any unitary element.
PureState apply_element(const PureState& state, const LinearElement& element);

}  // namespace distill
