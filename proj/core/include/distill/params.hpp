#pragma once

#include <string>
#include <string_view>

namespace distill {

enum class Protocol { BitFlip, PhaseFlipStage1, PhaseFlipFull, Multipartite, Spdc };

/// How same-mode double-pair states from a down-conversion source are
/// weighted: Paper carries the raw 2*alpha*beta four-mode amplitudes with no
/// bosonic renormalization; Physical uses properly normalized number states.
enum class Weighting { Paper, Physical };

enum class MeasureKind { Concurrence, Entropy };

std::string to_string(Protocol protocol);
std::string to_string(Weighting weighting);
std::string to_string(MeasureKind kind);
Protocol protocol_from_string(std::string_view name);
Weighting weighting_from_string(std::string_view name);
MeasureKind measure_from_string(std::string_view name);

/// Inputs shared by every distillation driver. alpha2 is |alpha|^2 with
/// |beta|^2 = 1 - alpha2; both coefficients are taken real non-negative.
struct ProtocolParams {
  double fidelity = 0.75;
  double alpha2 = 0.5;
  int parties = 2;        // multipartite only
  double spdc_p = 0.1;    // pair-generation probability per source pass
  double delta = 0.0;     // relative phase of the second source pass, radians
  Weighting weighting = Weighting::Paper;
  int photon_cap = 12;    // multipartite capacity limit (2N photons)

  double alpha() const;
  double beta() const;
  double alpha_beta() const;  // alpha*beta >= 0
  bool below_threshold() const { return fidelity <= 0.5; }

  /// Throws std::domain_error naming the offending parameter.
  void validate(Protocol protocol) const;
};

}  // namespace distill
