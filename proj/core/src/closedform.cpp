#include "distill/closedform.hpp"

#include <cmath>
#include <stdexcept>

namespace distill {

namespace {

void check_domain(const ProtocolParams& p) {
  if (!(p.fidelity > 0.0) || p.fidelity > 1.0) {
    throw std::domain_error("fidelity must be in (0, 1]");
  }
  if (!(p.alpha2 > 0.0) || !(p.alpha2 < 1.0)) {
    throw std::domain_error("alpha2 must be in (0, 1)");
  }
}

double bitflip_fidelity(double f) {
  const double g = 1.0 - f;
  return f * f / (f * f + g * g);
}

}  // namespace

Evaluation evaluate(FormulaId id, const ProtocolParams& params) {
  check_domain(params);
  const double f = params.fidelity;
  const double g = 1.0 - f;
  const double ab2 = params.alpha2 * (1.0 - params.alpha2);

  switch (id) {
    case FormulaId::BitflipFidelity:
      return {bitflip_fidelity(f), std::nullopt};
    case FormulaId::BitflipProb:
      return {2.0 * ab2 * (f * f + g * g), std::nullopt};
    case FormulaId::PhaseflipStage1Weights:
      return {f * f + g * g, 2.0 * f * g};
    case FormulaId::PhaseflipFullFidelity:
      return {bitflip_fidelity(f * f + g * g), std::nullopt};
    case FormulaId::SpdcFidelity:
      return {(f * f + 2.0) / (f * f + g * g + 2.0), std::nullopt};
    case FormulaId::InputConcurrence:
      return {2.0 * std::sqrt(ab2) * std::abs(2.0 * f - 1.0), std::nullopt};
    case FormulaId::EtaConcurrence:
      return {std::sqrt(ab2) / 2.0, std::nullopt};
  }
  throw std::domain_error("unknown formula id");
}

}  // namespace distill
