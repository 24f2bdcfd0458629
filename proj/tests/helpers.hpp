#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "distill/fock.hpp"

namespace testutil {

using distill::Complex;
using distill::FockKet;
using distill::MixedEnsemble;
using distill::ModeRegistry;
using distill::Polarization;
using distill::PureState;
using distill::RegistryPtr;

inline constexpr double kInvSqrt2 = 0.7071067811865475244;

inline PureState bell_phi(const RegistryPtr& reg, const std::string& a,
                          const std::string& b, double alpha, double beta,
                          double sign = 1.0) {
  using P = Polarization;
  return make_pure(reg, {{alpha, ket_of(*reg, {{a, P::H}, {b, P::H}})},
                         {sign * beta, ket_of(*reg, {{a, P::V}, {b, P::V}})}});
}

inline PureState bell_psi(const RegistryPtr& reg, const std::string& a,
                          const std::string& b, double alpha, double beta) {
  using P = Polarization;
  return make_pure(reg, {{alpha, ket_of(*reg, {{a, P::H}, {b, P::V}})},
                         {beta, ket_of(*reg, {{a, P::V}, {b, P::H}})}});
}

/// Bit-flip-error input mixture on two spatial modes.
inline MixedEnsemble input_mixture(const RegistryPtr& reg, const std::string& a,
                                   const std::string& b, double fidelity,
                                   double alpha2) {
  const double al = std::sqrt(alpha2);
  const double be = std::sqrt(1.0 - alpha2);
  MixedEnsemble ens;
  ens.add_branch(fidelity, bell_phi(reg, a, b, al, be), "Phi+");
  if (fidelity < 1.0) {
    ens.add_branch(1.0 - fidelity, bell_psi(reg, a, b, al, be), "Psi+");
  }
  return ens;
}

/// Random normalized sparse state with up to `max_photons` photons spread over
/// the registry.
inline PureState random_state(const RegistryPtr& reg, std::mt19937_64& rng,
                              int max_photons = 4, int n_terms = 5) {
  std::uniform_int_distribution<int> mode_dist(0, static_cast<int>(reg->size()) - 1);
  std::uniform_int_distribution<int> photon_dist(1, max_photons);
  std::normal_distribution<double> amp_dist(0.0, 1.0);
  std::vector<distill::Term> terms;
  for (int t = 0; t < n_terms; ++t) {
    std::vector<int> occ(reg->size(), 0);
    const int photons = photon_dist(rng);
    for (int p = 0; p < photons; ++p) occ[mode_dist(rng)] += 1;
    terms.push_back({Complex(amp_dist(rng), amp_dist(rng)), FockKet(occ)});
  }
  return make_pure(reg, std::move(terms)).normalized();
}

}  // namespace testutil
