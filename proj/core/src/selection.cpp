#include "distill/selection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "distill/optics.hpp"

namespace distill {

namespace {

constexpr double kZeroProbability = 1e-14;

struct SpatialPair {
  std::size_t h;
  std::size_t v;
};

std::vector<SpatialPair> resolve(const ModeRegistry& reg,
                                 std::span<const std::string> spatial_modes) {
  std::vector<SpatialPair> out;
  out.reserve(spatial_modes.size());
  for (const auto& s : spatial_modes) {
    out.push_back({reg.index_of(s, Polarization::H), reg.index_of(s, Polarization::V)});
  }
  return out;
}

}  // namespace

PostselectResult postselect_one_photon_each(const PureState& state,
                                            std::span<const std::string> spatial_modes) {
  const auto& reg = *state.registry();
  const auto pairs = resolve(reg, spatial_modes);

  std::vector<bool> listed(reg.size(), false);
  for (const auto& p : pairs) {
    listed[p.h] = true;
    listed[p.v] = true;
  }

  std::map<FockKet, Complex> kept;
  for (const auto& [ket, amp] : state.amplitudes()) {
    bool ok = true;
    for (const auto& p : pairs) {
      if (ket.occupation(p.h) + ket.occupation(p.v) != 1) {
        ok = false;
        break;
      }
    }
    if (ok) {
      for (std::size_t mode = 0; mode < reg.size() && ok; ++mode) {
        if (!listed[mode] && ket.occupation(mode) != 0) ok = false;
      }
    }
    if (ok) kept.emplace(ket, amp);
  }

  PureState surviving(state.registry(), std::move(kept), state.prune_tolerance());
  PostselectResult result;
  result.probability = surviving.squared_norm();
  if (result.probability >= kZeroProbability) {
    result.conditional = surviving.normalized();
  }
  return result;
}

std::vector<BranchRecord> measure_pm(const PureState& state,
                                     std::span<const std::string> spatial_modes) {
  const auto& reg = *state.registry();
  const auto pairs = resolve(reg, spatial_modes);
  const std::size_t k = pairs.size();
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

  // <+|H> = <-|H> = <+|V> = 1/sqrt2, <-|V> = -1/sqrt2.
  std::vector<std::map<FockKet, Complex>> outcome_amps(std::size_t{1} << k);
  for (const auto& [ket, amp] : state.amplitudes()) {
    std::vector<int> pol_bits(k);  // 0 -> H, 1 -> V
    FockKet residual = ket;
    for (std::size_t i = 0; i < k; ++i) {
      const int nh = ket.occupation(pairs[i].h);
      const int nv = ket.occupation(pairs[i].v);
      if (nh + nv != 1) {
        throw std::invalid_argument("measure_pm: mode " + spatial_modes[i] +
                                    " does not hold exactly one photon in ket " +
                                    to_string(reg, ket));
      }
      pol_bits[i] = nv;
      residual = residual.with_occupation(pairs[i].h, 0).with_occupation(pairs[i].v, 0);
    }
    for (std::size_t outcome = 0; outcome < outcome_amps.size(); ++outcome) {
      Complex coeff = amp;
      for (std::size_t i = 0; i < k; ++i) {
        const bool minus = (outcome >> i) & 1u;
        double factor = inv_sqrt2;
        if (minus && pol_bits[i] == 1) factor = -inv_sqrt2;
        coeff *= factor;
      }
      outcome_amps[outcome][residual] += coeff;
    }
  }

  std::vector<BranchRecord> branches;
  for (std::size_t outcome = 0; outcome < outcome_amps.size(); ++outcome) {
    PureState residual(state.registry(), std::move(outcome_amps[outcome]),
                       state.prune_tolerance());
    const double probability = residual.squared_norm();
    if (probability < kZeroProbability) continue;
    std::string label;
    for (std::size_t i = 0; i < k; ++i) label += ((outcome >> i) & 1u) ? '-' : '+';
    branches.push_back({std::move(label), probability, residual.normalized(), false});
  }
  return branches;
}

std::vector<BranchRecord> apply_parity_rule(const std::vector<BranchRecord>& branches,
                                            const ParityRule& rule) {
  std::vector<BranchRecord> out;
  out.reserve(branches.size());
  for (const auto& branch : branches) {
    const auto minus_count =
        std::count(branch.outcome.begin(), branch.outcome.end(), '-');
    const bool odd = (minus_count % 2) != 0;
    if (odd == rule.flip_on_odd_minus) {
      auto flip = pauli_z(branch.residual.registry(), rule.flip_spatial);
      out.push_back({branch.outcome, branch.probability,
                     apply_element(branch.residual, flip), true});
    } else {
      out.push_back(branch);
    }
  }
  return out;
}

MixedEnsemble parity_correct(const std::vector<BranchRecord>& branches,
                             const ParityRule& rule) {
  MixedEnsemble out;
  for (const auto& branch : apply_parity_rule(branches, rule)) {
    out.add_branch(branch.probability, branch.residual, branch.outcome);
  }
  return out.merged();
}

}  // namespace distill
