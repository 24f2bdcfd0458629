#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "distill/fock.hpp"

namespace distill {

struct PostselectResult {
  double probability = 0.0;
  /// Renormalized conditional state; absent when probability < 1e-14.
  std::optional<PureState> conditional;
};

/// Keeps only kets with exactly one photon (H+V combined) in each listed
/// spatial mode and none anywhere else. Probability 0 is a valid result.
PostselectResult postselect_one_photon_each(const PureState& state,
                                            std::span<const std::string> spatial_modes);

/// One projective outcome of a |+/-> measurement: outcome string over the
/// measured modes ('+'/'-'), its probability, and the normalized residual
/// state on the remaining modes.
struct BranchRecord {
  std::string outcome;
  double probability = 0.0;
  PureState residual;
  bool correction_applied = false;
};

/// Measures the photon in each listed spatial mode in the
/// |+/-> = (|H> +/- |V>)/sqrt2 basis. Every ket must hold exactly one photon
/// in each listed mode. Branches with probability < 1e-14 are dropped; the
/// remaining probabilities sum to the input squared norm.
std::vector<BranchRecord> measure_pm(const PureState& state,
                                     std::span<const std::string> spatial_modes);

/// Conditional phase-flip rule: flip V -> -V on `flip_spatial` for branches
/// whose count of '-' outcomes has the triggering parity.
struct ParityRule {
  std::string flip_spatial;
  bool flip_on_odd_minus = true;
};

/// Applies the parity rule branch by branch, marking corrected branches.
std::vector<BranchRecord> apply_parity_rule(const std::vector<BranchRecord>& branches,
                                            const ParityRule& rule);

/// Applies the parity rule to each branch and merges the corrected branches
/// into a weighted ensemble (weights = branch probabilities, so total weight
/// equals the pre-measurement weight exactly).
MixedEnsemble parity_correct(const std::vector<BranchRecord>& branches,
                             const ParityRule& rule);

}  // namespace distill
