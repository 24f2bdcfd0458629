#include "distill/measures.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace distill {

double fidelity_to_target(const MixedEnsemble& ensemble, const PureState& target) {
  double total = 0.0;
  for (const auto& branch : ensemble.branches()) {
    if (!compatible(branch.state.registry(), target.registry())) {
      throw std::invalid_argument("fidelity_to_target: registry mismatch");
    }
    total += branch.weight * std::norm(inner(target, branch.state));
  }
  return total;
}

double concurrence(const TwoQubitDensity& rho) {
  // Y(x)Y in the (HH, HV, VH, VV) basis.
  Eigen::Matrix4cd yy = Eigen::Matrix4cd::Zero();
  yy(0, 3) = -1.0;
  yy(1, 2) = 1.0;
  yy(2, 1) = 1.0;
  yy(3, 0) = -1.0;

  const Eigen::Matrix4cd& r = rho.matrix();
  Eigen::Matrix4cd product = r * yy * r.conjugate() * yy;

  Eigen::ComplexEigenSolver<Eigen::Matrix4cd> solver(product);
  std::array<double, 4> lambdas{};
  for (int i = 0; i < 4; ++i) {
    double ev = solver.eigenvalues()(i).real();
    if (ev < -1e-10) {
      throw std::domain_error("concurrence: spin-flipped product has eigenvalue " +
                              std::to_string(ev));
    }
    // The square root amplifies eigensolver noise around zero (1e-17 dust
    // becomes ~3e-9), so sub-1e-14 values are treated as exact zeros.
    lambdas[i] = ev < 1e-14 ? 0.0 : std::sqrt(ev);
  }
  std::sort(lambdas.begin(), lambdas.end(), std::greater<>());
  return std::max(0.0, lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]);
}

double entropy_of_entanglement(const PureState& state, std::string_view mode_a,
                               std::string_view mode_b) {
  if (!state.is_normalized(1e-9)) {
    throw std::invalid_argument("entropy_of_entanglement: state is not normalized");
  }
  Eigen::Vector4cd psi = two_qubit_amplitudes(state, mode_a, mode_b,
                                              "entropy_of_entanglement");
  Eigen::Matrix2cd reduced = Eigen::Matrix2cd::Zero();
  for (int p = 0; p < 2; ++p) {
    for (int q = 0; q < 2; ++q) {
      for (int r = 0; r < 2; ++r) {
        reduced(p, q) += psi(2 * p + r) * std::conj(psi(2 * q + r));
      }
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> solver(reduced);
  double entropy = 0.0;
  for (int i = 0; i < 2; ++i) {
    double mu = solver.eigenvalues()(i);
    if (mu > 1e-15) entropy -= mu * std::log2(mu);
  }
  return entropy;
}

double efficiency_eta(const EfficiencyInputs& inputs) {
  auto in_unit_range = [](double value) {
    return value >= -1e-12 && value <= 1.0 + 1e-12;
  };
  if (!in_unit_range(inputs.entanglement_out) ||
      !in_unit_range(inputs.success_probability) ||
      !in_unit_range(inputs.entanglement_in)) {
    throw std::invalid_argument("efficiency inputs must lie in [0, 1]");
  }
  if (inputs.entanglement_in <= 0.0) {
    throw std::domain_error("efficiency undefined: input entanglement is zero");
  }
  return inputs.entanglement_out * inputs.success_probability /
         (2.0 * inputs.entanglement_in);
}

}  // namespace distill
