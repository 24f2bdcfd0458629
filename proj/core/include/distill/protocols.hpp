#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "distill/fock.hpp"
#include "distill/params.hpp"
#include "distill/selection.hpp"

namespace distill {

struct StageReport {
  std::string name;
  double success_probability = 0.0;
  double fidelity_out = 0.0;
};

/// Post-selection bookkeeping for one joint input branch: its prior weight
/// and the squared norm of the part surviving the one-photon-per-output-mode
/// selection.
struct SelectionReport {
  std::string label;
  double prior_weight = 0.0;
  double postselect_probability = 0.0;
};

struct DistillationOutcome {
  double success_probability = 0.0;
  MixedEnsemble output;  // normalized over surviving branches
  double fidelity_out = 0.0;
  /// Measurement branches at global probability scale, grouped per joint
  /// input branch in `selection` order.
  std::vector<BranchRecord> branches;
  std::vector<StageReport> stage_reports;
  std::vector<SelectionReport> selection;
  bool below_threshold = false;
  std::map<std::string, double> extras;
};

/// One-step purification + concentration of the bit-flip-error mixture via
/// half-wave flips on the second copy, polarizing beam splitters, four-mode
/// selection, |+/-> measurement, and conditional phase flip.
DistillationOutcome distill_bitflip(const ProtocolParams& params);

/// Concentration round for the phase-flip-error mixture; every joint branch
/// survives selection, so the success probability is 2|ab|^2 independent of F.
DistillationOutcome distill_phaseflip_stage1(const ProtocolParams& params);

/// Stage 1 followed by Hadamard conversion to a bit-flip-type mixture and a
/// second purification round on two fresh copies of the converted state.
DistillationOutcome distill_phaseflip_full(const ProtocolParams& params);

/// N-party GHZ-type generalization: one beam splitter per party, selection on
/// all 2N outputs, |+/-> measurement of the N second-copy photons.
DistillationOutcome distill_multipartite(const ProtocolParams& params);

/// Two-pass down-conversion source model expanded to two-pair events.
/// Same-pulse double pairs share one error label; the same-mode terms enter
/// as a coherent superposition with relative phase delta.
DistillationOutcome distill_spdc(const ProtocolParams& params);

DistillationOutcome run_protocol(Protocol protocol, const ProtocolParams& params);

struct MonteCarloEstimate {
  double success_probability = 0.0;
  double success_stderr = 0.0;
  double fidelity = 0.0;
  double fidelity_stderr = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  std::uint64_t seed = 0;
};

/// Seeded stochastic cross-check of the analytic ensemble propagation:
/// samples error labels, selection, and measurement outcomes. Deterministic
/// for a fixed seed.
MonteCarloEstimate mc_validate(Protocol protocol, const ProtocolParams& params,
                               std::uint64_t trials, std::uint64_t seed);

struct EfficiencyBreakdown {
  double entanglement_in = 0.0;
  double entanglement_out = 0.0;
  double success_probability = 0.0;
  double eta = 0.0;
};

/// Entanglement transformation efficiency of the bit-flip round, with the
/// entanglement measured by concurrence or (pure states only) entropy.
EfficiencyBreakdown bitflip_efficiency(const ProtocolParams& params, MeasureKind kind);

}  // namespace distill
