#include "distill/params.hpp"

#include <cmath>
#include <stdexcept>

namespace distill {

std::string to_string(Protocol protocol) {
  switch (protocol) {
    case Protocol::BitFlip: return "bitflip";
    case Protocol::PhaseFlipStage1: return "phaseflip";
    case Protocol::PhaseFlipFull: return "phaseflip-full";
    case Protocol::Multipartite: return "multipartite";
    case Protocol::Spdc: return "spdc";
  }
  return "unknown";
}

std::string to_string(Weighting weighting) {
  return weighting == Weighting::Paper ? "paper" : "physical";
}

std::string to_string(MeasureKind kind) {
  return kind == MeasureKind::Concurrence ? "concurrence" : "entropy";
}

Protocol protocol_from_string(std::string_view name) {
  if (name == "bitflip") return Protocol::BitFlip;
  if (name == "phaseflip") return Protocol::PhaseFlipStage1;
  if (name == "phaseflip-full") return Protocol::PhaseFlipFull;
  if (name == "multipartite") return Protocol::Multipartite;
  if (name == "spdc") return Protocol::Spdc;
  throw std::domain_error("unknown protocol: " + std::string(name));
}

Weighting weighting_from_string(std::string_view name) {
  if (name == "paper") return Weighting::Paper;
  if (name == "physical") return Weighting::Physical;
  throw std::domain_error("unknown weighting: " + std::string(name));
}

MeasureKind measure_from_string(std::string_view name) {
  if (name == "concurrence") return MeasureKind::Concurrence;
  if (name == "entropy") return MeasureKind::Entropy;
  throw std::domain_error("unknown measure: " + std::string(name));
}

double ProtocolParams::alpha() const { return std::sqrt(alpha2); }

double ProtocolParams::beta() const { return std::sqrt(1.0 - alpha2); }

double ProtocolParams::alpha_beta() const { return std::sqrt(alpha2 * (1.0 - alpha2)); }

void ProtocolParams::validate(Protocol protocol) const {
  if (!(fidelity > 0.0) || fidelity > 1.0) {
    throw std::domain_error("fidelity must be in (0, 1]");
  }
  if (!(alpha2 > 0.0) || !(alpha2 < 1.0)) {
    throw std::domain_error("alpha2 must be in (0, 1)");
  }
  if (protocol == Protocol::Multipartite) {
    if (parties < 2) throw std::domain_error("parties must be >= 2");
    if (2 * parties > photon_cap) {
      throw std::domain_error("parties exceeds the photon-count cap (2N <= " +
                              std::to_string(photon_cap) + ")");
    }
  }
  if (protocol == Protocol::Spdc) {
    if (!(spdc_p > 0.0) || !(spdc_p < 1.0)) {
      throw std::domain_error("spdc-p must be in (0, 1)");
    }
    if (!std::isfinite(delta)) throw std::domain_error("delta must be finite");
  }
}

}  // namespace distill
