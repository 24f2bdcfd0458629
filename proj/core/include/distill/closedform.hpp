#pragma once

#include <optional>

#include "distill/params.hpp"

namespace distill {

/// Analytic expressions for the distillation figures of merit, kept free of
/// any dependency on the state-propagation machinery so that simulator vs
/// formula comparisons are genuine two-implementation checks.
enum class FormulaId {
  BitflipFidelity,         // F^2 / (F^2 + (1-F)^2)
  BitflipProb,             // 2|ab|^2 [F^2 + (1-F)^2]
  PhaseflipStage1Weights,  // (F^2 + (1-F)^2, 2F(1-F))
  PhaseflipFullFidelity,   // bit-flip fidelity at F1 = F^2 + (1-F)^2
  SpdcFidelity,            // (F^2 + 2) / (F^2 + (1-F)^2 + 2)
  InputConcurrence,        // 2|ab| |2F - 1|
  EtaConcurrence,          // |ab| / 2
};

struct Evaluation {
  double value = 0.0;
  std::optional<double> second;  // set only for weight pairs
};

/// Exact double-precision evaluation. Throws std::domain_error when the
/// parameters are outside the formula's domain.
Evaluation evaluate(FormulaId id, const ProtocolParams& params);

}  // namespace distill
