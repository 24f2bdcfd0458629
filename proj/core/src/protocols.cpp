#include "distill/protocols.hpp"

#include <cmath>
#include <optional>
#include <random>
#include <stdexcept>
#include <utility>

#include "distill/measures.hpp"
#include "distill/optics.hpp"

namespace distill {

namespace {

constexpr double kInvSqrt2 = 0.7071067811865475244;

enum class PairKind { PhiPlus, PhiMinus, PsiPlus };

std::string pair_name(PairKind kind) {
  switch (kind) {
    case PairKind::PhiPlus: return "Phi+";
    case PairKind::PhiMinus: return "Phi-";
    case PairKind::PsiPlus: return "Psi+";
  }
  return "?";
}

PureState pair_state(const RegistryPtr& reg, const std::string& a, const std::string& b,
                     double alpha, double beta, PairKind kind) {
  using P = Polarization;
  switch (kind) {
    case PairKind::PhiPlus:
      return make_pure(reg, {{alpha, ket_of(*reg, {{a, P::H}, {b, P::H}})},
                             {beta, ket_of(*reg, {{a, P::V}, {b, P::V}})}});
    case PairKind::PhiMinus:
      return make_pure(reg, {{alpha, ket_of(*reg, {{a, P::H}, {b, P::H}})},
                             {-beta, ket_of(*reg, {{a, P::V}, {b, P::V}})}});
    case PairKind::PsiPlus:
      return make_pure(reg, {{alpha, ket_of(*reg, {{a, P::H}, {b, P::V}})},
                             {beta, ket_of(*reg, {{a, P::V}, {b, P::H}})}});
  }
  throw std::logic_error("unreachable pair kind");
}

/// alpha|H...H> + beta|V...V>, with the first party's polarizations exchanged
/// when `first_flipped`.
PureState ghz_state(const RegistryPtr& reg, const std::vector<std::string>& spatials,
                    double alpha, double beta, bool first_flipped) {
  using P = Polarization;
  std::vector<std::pair<std::string, P>> all_h;
  std::vector<std::pair<std::string, P>> all_v;
  for (std::size_t i = 0; i < spatials.size(); ++i) {
    const bool flip = first_flipped && i == 0;
    all_h.emplace_back(spatials[i], flip ? P::V : P::H);
    all_v.emplace_back(spatials[i], flip ? P::H : P::V);
  }
  return make_pure(reg, {{alpha, ket_of(*reg, all_h)}, {beta, ket_of(*reg, all_v)}});
}

struct PartyWiring {
  std::string src1;
  std::string src2;
  std::string keep;
  std::string cross;
};

std::vector<PartyWiring> make_wirings(int parties) {
  static const std::vector<std::string> prefixes = {"a", "b", "c", "d", "e", "f"};
  if (parties < 2 || parties > static_cast<int>(prefixes.size())) {
    throw std::domain_error("unsupported party count: " + std::to_string(parties));
  }
  std::vector<PartyWiring> wirings;
  for (int i = 0; i < parties; ++i) {
    const std::string& p = prefixes[i];
    wirings.push_back({p + "1", p + "2", p + "3", p + "4"});
  }
  return wirings;
}

RegistryPtr make_registry(const std::vector<PartyWiring>& wirings) {
  std::vector<std::string> spatials;
  for (const auto& w : wirings) {
    spatials.push_back(w.src1);
    spatials.push_back(w.src2);
    spatials.push_back(w.keep);
    spatials.push_back(w.cross);
  }
  return ModeRegistry::for_spatials(spatials);
}

struct JointBranch {
  double weight = 0.0;
  PureState state;
  std::string label;
};

/// Everything the drivers and the Monte Carlo sampler need to know about the
/// run of one protocol instance.
struct ProtocolSetup {
  std::vector<PartyWiring> wirings;
  RegistryPtr reg;
  std::vector<JointBranch> joint;
  std::optional<PureState> target;
  std::vector<StageReport> prior_stages;  // stages already run (two-step flows)
};

struct BranchResult {
  SelectionReport selection;
  double input_norm2 = 0.0;
  std::vector<BranchRecord> records;  // corrected; conditional probabilities
};

struct EngineResult {
  double success_probability = 0.0;
  MixedEnsemble output;  // normalized; empty when nothing survives
  std::vector<BranchResult> branch_results;
  double weighted_success = 0.0;
  double weighted_input = 0.0;
};

/// Shared two-copy circuit: flip the second copy, one beam splitter per
/// party, select one photon in every output mode, measure the cross modes in
/// |+/->, and phase-correct on the first party's kept mode.
EngineResult run_selection_circuit(const ProtocolSetup& setup) {
  const auto& reg = setup.reg;
  std::vector<LinearElement> circuit;
  for (const auto& w : setup.wirings) circuit.push_back(hwp_flip(reg, w.src2));
  for (const auto& w : setup.wirings) {
    circuit.push_back(pbs(reg, w.src1, w.src2, w.keep, w.cross));
  }

  std::vector<std::string> select_modes;
  std::vector<std::string> measure_modes;
  for (const auto& w : setup.wirings) select_modes.push_back(w.keep);
  for (const auto& w : setup.wirings) select_modes.push_back(w.cross);
  for (const auto& w : setup.wirings) measure_modes.push_back(w.cross);
  const ParityRule rule{setup.wirings.front().keep, true};

  EngineResult result;
  MixedEnsemble combined;
  for (const auto& jb : setup.joint) {
    BranchResult br;
    br.input_norm2 = jb.state.squared_norm();
    result.weighted_input += jb.weight * br.input_norm2;

    PureState state = jb.state;
    for (const auto& element : circuit) state = apply_element(state, element);

    auto selected = postselect_one_photon_each(state, select_modes);
    br.selection = {jb.label, jb.weight, selected.probability};
    if (selected.conditional) {
      const double scale = jb.weight * selected.probability;
      result.weighted_success += scale;
      br.records = apply_parity_rule(measure_pm(*selected.conditional, measure_modes),
                                     rule);
      if (scale > 0.0) {
        for (const auto& record : br.records) {
          combined.add_branch(scale * record.probability, record.residual,
                              record.outcome);
        }
      }
    }
    result.branch_results.push_back(std::move(br));
  }

  if (result.weighted_input > 0.0) {
    result.success_probability = result.weighted_success / result.weighted_input;
  }
  if (result.weighted_success > 0.0) {
    result.output = combined.merged().normalized();
  }
  return result;
}

DistillationOutcome to_outcome(const ProtocolSetup& setup, EngineResult&& engine,
                               const ProtocolParams& params,
                               const std::string& stage_name) {
  DistillationOutcome outcome;
  outcome.success_probability = engine.success_probability;
  outcome.output = std::move(engine.output);
  outcome.fidelity_out = outcome.output.empty()
                             ? 0.0
                             : fidelity_to_target(outcome.output, *setup.target);
  for (auto& br : engine.branch_results) {
    const double scale = br.selection.prior_weight * br.selection.postselect_probability;
    for (auto& record : br.records) {
      record.probability *= scale;
      outcome.branches.push_back(std::move(record));
    }
    outcome.selection.push_back(std::move(br.selection));
  }
  outcome.below_threshold = params.below_threshold();
  outcome.stage_reports = setup.prior_stages;
  outcome.stage_reports.push_back(
      {stage_name, outcome.success_probability, outcome.fidelity_out});
  return outcome;
}

ProtocolSetup setup_two_error(const ProtocolParams& params, PairKind good,
                              PairKind bad) {
  ProtocolSetup setup;
  setup.wirings = make_wirings(2);
  setup.reg = make_registry(setup.wirings);
  const auto& reg = setup.reg;

  const double f = params.fidelity;
  const double a = params.alpha();
  const double b = params.beta();
  auto copy1 = [&](PairKind k) { return pair_state(reg, "a1", "b1", a, b, k); };
  auto copy2 = [&](PairKind k) { return pair_state(reg, "a2", "b2", a, b, k); };
  auto label = [&](PairKind k1, PairKind k2) {
    return pair_name(k1) + " x " + pair_name(k2);
  };
  setup.joint = {
      {f * f, tensor(copy1(good), copy2(good)), label(good, good)},
      {f * (1.0 - f), tensor(copy1(good), copy2(bad)), label(good, bad)},
      {f * (1.0 - f), tensor(copy1(bad), copy2(good)), label(bad, good)},
      {(1.0 - f) * (1.0 - f), tensor(copy1(bad), copy2(bad)), label(bad, bad)},
  };
  setup.target = pair_state(reg, "a3", "b3", kInvSqrt2, kInvSqrt2, PairKind::PhiPlus);
  return setup;
}

ProtocolSetup setup_multipartite(const ProtocolParams& params) {
  ProtocolSetup setup;
  setup.wirings = make_wirings(params.parties);
  setup.reg = make_registry(setup.wirings);
  const auto& reg = setup.reg;

  std::vector<std::string> src1, src2, keep;
  for (const auto& w : setup.wirings) {
    src1.push_back(w.src1);
    src2.push_back(w.src2);
    keep.push_back(w.keep);
  }

  const double f = params.fidelity;
  const double a = params.alpha();
  const double b = params.beta();
  auto copy1 = [&](bool flipped) { return ghz_state(reg, src1, a, b, flipped); };
  auto copy2 = [&](bool flipped) { return ghz_state(reg, src2, a, b, flipped); };
  auto label = [](bool f1, bool f2) {
    return std::string(f1 ? "Psi+" : "Phi+") + " x " + (f2 ? "Psi+" : "Phi+");
  };
  setup.joint = {
      {f * f, tensor(copy1(false), copy2(false)), label(false, false)},
      {f * (1.0 - f), tensor(copy1(false), copy2(true)), label(false, true)},
      {f * (1.0 - f), tensor(copy1(true), copy2(false)), label(true, false)},
      {(1.0 - f) * (1.0 - f), tensor(copy1(true), copy2(true)), label(true, true)},
  };
  setup.target = ghz_state(reg, keep, kInvSqrt2, kInvSqrt2, false);
  return setup;
}

ProtocolSetup setup_phaseflip_full(const DistillationOutcome& stage1) {
  // Hadamard conversion turns the phase-flip mixture into a bit-flip-type one.
  const auto& s1_reg = stage1.output.branches().front().state.registry();
  const auto had_a = hadamard_wp(s1_reg, "a3");
  const auto had_b = hadamard_wp(s1_reg, "b3");
  MixedEnsemble converted;
  for (const auto& branch : stage1.output.branches()) {
    converted.add_branch(branch.weight,
                         apply_element(apply_element(branch.state, had_a), had_b),
                         branch.label);
  }

  // Second round on two independent fresh copies of the converted state.
  ProtocolSetup setup;
  setup.wirings = make_wirings(2);
  setup.reg = make_registry(setup.wirings);
  const std::map<std::string, std::string> to_copy1{{"a3", "a1"}, {"b3", "b1"}};
  const std::map<std::string, std::string> to_copy2{{"a3", "a2"}, {"b3", "b2"}};
  std::size_t i = 0;
  for (const auto& bi : converted.branches()) {
    std::size_t j = 0;
    for (const auto& bj : converted.branches()) {
      setup.joint.push_back({bi.weight * bj.weight,
                             tensor(relabel(bi.state, setup.reg, to_copy1),
                                    relabel(bj.state, setup.reg, to_copy2)),
                             "s1#" + std::to_string(i) + " x s1#" + std::to_string(j)});
      ++j;
    }
    ++i;
  }
  setup.target =
      pair_state(setup.reg, "a3", "b3", kInvSqrt2, kInvSqrt2, PairKind::PhiPlus);
  setup.prior_stages.push_back(
      {"concentration", stage1.success_probability, stage1.fidelity_out});
  return setup;
}

/// Double-pair emission into one spatial pair. In Paper weighting the product
/// of two pair kets is expanded term by term with no bosonic renormalization
/// (the four-mode component carries amplitude exactly 2*alpha*beta); in
/// Physical weighting the squared creation operators produce their sqrt(2)
/// factors on double occupancies and the state is renormalized.
PureState double_pair_state(const RegistryPtr& reg, const std::string& a,
                            const std::string& b, const ProtocolParams& params,
                            PairKind kind, Weighting weighting) {
  using P = Polarization;
  const double al = params.alpha();
  const double be = params.beta();
  const bool psi = kind == PairKind::PsiPlus;
  // Polarization carried in mode b by the alpha^2 / beta^2 components.
  const P b_for_alpha = psi ? P::V : P::H;
  const P b_for_beta = psi ? P::H : P::V;

  const FockKet k_alpha =
      ket_of(*reg, {{a, P::H}, {a, P::H}, {b, b_for_alpha}, {b, b_for_alpha}});
  const FockKet k_beta =
      ket_of(*reg, {{a, P::V}, {a, P::V}, {b, b_for_beta}, {b, b_for_beta}});
  const FockKet k_mixed = ket_of(*reg, {{a, P::H}, {a, P::V}, {b, P::H}, {b, P::V}});

  if (weighting == Weighting::Paper) {
    return make_pure(
        reg, {{al * al, k_alpha}, {2.0 * al * be, k_mixed}, {be * be, k_beta}});
  }
  const double norm = 2.0 * std::sqrt(1.0 - al * al * be * be);
  return make_pure(reg, {{2.0 * al * al / norm, k_alpha},
                         {2.0 * al * be / norm, k_mixed},
                         {2.0 * be * be / norm, k_beta}});
}

ProtocolSetup setup_spdc(const ProtocolParams& params) {
  ProtocolSetup setup;
  setup.wirings = make_wirings(2);
  setup.reg = make_registry(setup.wirings);
  const auto& reg = setup.reg;
  const double f = params.fidelity;
  const Complex phase = std::polar(1.0, params.delta);

  // Error labels are drawn per source pass: pairs from different passes get
  // independent labels, a same-pass double pair shares one label.
  const std::vector<std::pair<double, PairKind>> labels = {
      {f, PairKind::PhiPlus}, {1.0 - f, PairKind::PsiPlus}};

  for (const auto& [w1, k1] : labels) {
    for (const auto& [w2, k2] : labels) {
      PureState cross =
          tensor(pair_state(reg, "a1", "b1", params.alpha(), params.beta(), k1),
                 pair_state(reg, "a2", "b2", params.alpha(), params.beta(), k2));
      PureState same1 = double_pair_state(reg, "a1", "b1", params, k1, params.weighting);
      PureState same2 = double_pair_state(reg, "a2", "b2", params, k2, params.weighting);

      PureState state = [&] {
        if (params.weighting == Weighting::Paper) {
          // Same-mode emissions enter as one coherent pair of terms with the
          // second pass carrying the relative phase.
          return cross.plus(
              same1.plus(same2.scaled(phase)).scaled(Complex(kInvSqrt2, 0.0)));
        }
        // Equal-amplitude superposition of the three two-pair event classes;
        // the second-pass phase enters once per photon in its spatial modes.
        const double inv_sqrt3 = 1.0 / std::sqrt(3.0);
        PureState sum = cross.plus(same1).plus(same2).scaled(Complex(inv_sqrt3, 0.0));
        return apply_element(sum, phase_shift(reg, "a2", params.delta));
      }();
      setup.joint.push_back(
          {w1 * w2, std::move(state), pair_name(k1) + " x " + pair_name(k2)});
    }
  }
  setup.target =
      pair_state(reg, "a3", "b3", kInvSqrt2, kInvSqrt2, PairKind::PhiPlus);
  return setup;
}

ProtocolSetup make_setup(Protocol protocol, const ProtocolParams& params) {
  params.validate(protocol);
  switch (protocol) {
    case Protocol::BitFlip:
      return setup_two_error(params, PairKind::PhiPlus, PairKind::PsiPlus);
    case Protocol::PhaseFlipStage1:
      return setup_two_error(params, PairKind::PhiPlus, PairKind::PhiMinus);
    case Protocol::PhaseFlipFull:
      return setup_phaseflip_full(distill_phaseflip_stage1(params));
    case Protocol::Multipartite:
      return setup_multipartite(params);
    case Protocol::Spdc:
      return setup_spdc(params);
  }
  throw std::domain_error("unknown protocol");
}

std::string stage_name(Protocol protocol) {
  switch (protocol) {
    case Protocol::BitFlip: return "distillation";
    case Protocol::PhaseFlipStage1: return "concentration";
    case Protocol::PhaseFlipFull: return "purification";
    case Protocol::Multipartite: return "distillation";
    case Protocol::Spdc: return "distillation";
  }
  return "stage";
}

}  // namespace

DistillationOutcome run_protocol(Protocol protocol, const ProtocolParams& params) {
  ProtocolSetup setup = make_setup(protocol, params);
  EngineResult engine = run_selection_circuit(setup);
  DistillationOutcome outcome =
      to_outcome(setup, std::move(engine), params, stage_name(protocol));

  if (protocol == Protocol::Spdc) {
    // Emission-order bookkeeping: vacuum and single-pair events are retained
    // in the expansion but never pass four-mode selection.
    double two_pair_norm = 0.0;
    double four_mode = 0.0;
    for (const auto& sel : outcome.selection) {
      four_mode += sel.prior_weight * sel.postselect_probability;
    }
    for (const auto& jb : setup.joint) {
      two_pair_norm += jb.weight * jb.state.squared_norm();
    }
    const double p2 = params.spdc_p * params.spdc_p;
    const double vacuum_weight = 1.0;
    const double single_weight = 2.0 * p2;
    const double two_pair_prior = p2 * p2 * two_pair_norm;
    const double total = vacuum_weight + single_weight + two_pair_prior;
    const double per_pulse = p2 * p2 * four_mode / total;
    outcome.extras["vacuum_weight"] = vacuum_weight / total;
    outcome.extras["single_pair_weight"] = single_weight / total;
    outcome.extras["two_pair_weight"] = two_pair_prior / total;
    outcome.extras["per_pulse_success"] = per_pulse;
    outcome.extras["discarded_weight"] = 1.0 - per_pulse;
  }
  return outcome;
}

DistillationOutcome distill_bitflip(const ProtocolParams& params) {
  return run_protocol(Protocol::BitFlip, params);
}

DistillationOutcome distill_phaseflip_stage1(const ProtocolParams& params) {
  return run_protocol(Protocol::PhaseFlipStage1, params);
}

DistillationOutcome distill_phaseflip_full(const ProtocolParams& params) {
  return run_protocol(Protocol::PhaseFlipFull, params);
}

DistillationOutcome distill_multipartite(const ProtocolParams& params) {
  return run_protocol(Protocol::Multipartite, params);
}

DistillationOutcome distill_spdc(const ProtocolParams& params) {
  return run_protocol(Protocol::Spdc, params);
}

MonteCarloEstimate mc_validate(Protocol protocol, const ProtocolParams& params,
                               std::uint64_t trials, std::uint64_t seed) {
  if (trials < 1) throw std::domain_error("trials must be >= 1");
  ProtocolSetup setup = make_setup(protocol, params);
  EngineResult engine = run_selection_circuit(setup);

  // Sampling table. Branch priors are weighted by the input norms so that
  // sampling matches the driver's accounting for unnormalized source
  // expansions; the selection step is then a true conditional probability.
  struct SampleBranch {
    double prior = 0.0;
    double select_prob = 0.0;
    std::vector<std::pair<double, double>> outcomes;  // (probability, fidelity)
  };
  std::vector<SampleBranch> table;
  double total_prior = 0.0;
  for (const auto& br : engine.branch_results) {
    SampleBranch sample;
    sample.prior = br.selection.prior_weight * br.input_norm2;
    total_prior += sample.prior;
    if (br.input_norm2 > 0.0) {
      sample.select_prob = br.selection.postselect_probability / br.input_norm2;
    }
    for (const auto& record : br.records) {
      sample.outcomes.emplace_back(record.probability,
                                   std::norm(inner(*setup.target, record.residual)));
    }
    table.push_back(std::move(sample));
  }
  for (auto& sample : table) sample.prior /= total_prior;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  std::uint64_t successes = 0;
  double fidelity_sum = 0.0;
  double fidelity_sq_sum = 0.0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    double u = uniform(rng);
    const SampleBranch* branch = &table.back();
    for (const auto& sample : table) {
      if (u < sample.prior) {
        branch = &sample;
        break;
      }
      u -= sample.prior;
    }
    if (uniform(rng) >= branch->select_prob) continue;
    ++successes;
    double v = uniform(rng);
    double fid = branch->outcomes.empty() ? 0.0 : branch->outcomes.back().second;
    for (const auto& [prob, outcome_fid] : branch->outcomes) {
      if (v < prob) {
        fid = outcome_fid;
        break;
      }
      v -= prob;
    }
    fidelity_sum += fid;
    fidelity_sq_sum += fid * fid;
  }

  MonteCarloEstimate est;
  est.trials = trials;
  est.seed = seed;
  est.successes = successes;
  est.success_probability = static_cast<double>(successes) / trials;
  est.success_stderr =
      std::sqrt(est.success_probability * (1.0 - est.success_probability) / trials);
  if (successes > 0) {
    est.fidelity = fidelity_sum / successes;
    const double var =
        std::max(0.0, fidelity_sq_sum / successes - est.fidelity * est.fidelity);
    est.fidelity_stderr = std::sqrt(var / successes);
  }
  return est;
}

EfficiencyBreakdown bitflip_efficiency(const ProtocolParams& params, MeasureKind kind) {
  auto outcome = distill_bitflip(params);

  const auto reg = ModeRegistry::for_spatials({"a", "b"});
  const PureState phi =
      pair_state(reg, "a", "b", params.alpha(), params.beta(), PairKind::PhiPlus);
  MixedEnsemble input;
  input.add_branch(params.fidelity, phi, "Phi+");
  if (params.fidelity < 1.0) {
    input.add_branch(
        1.0 - params.fidelity,
        pair_state(reg, "a", "b", params.alpha(), params.beta(), PairKind::PsiPlus),
        "Psi+");
  }

  EfficiencyBreakdown breakdown;
  breakdown.success_probability = outcome.success_probability;
  if (kind == MeasureKind::Concurrence) {
    breakdown.entanglement_in = concurrence(reduce_two_qubit(input, "a", "b"));
    breakdown.entanglement_out =
        concurrence(reduce_two_qubit(outcome.output, "a3", "b3"));
  } else {
    if (input.size() != 1) {
      throw std::domain_error(
          "entropy measure requires a pure input state (fidelity = 1)");
    }
    if (outcome.output.size() != 1) {
      throw std::domain_error("entropy measure requires a pure output state");
    }
    breakdown.entanglement_in = entropy_of_entanglement(phi, "a", "b");
    breakdown.entanglement_out =
        entropy_of_entanglement(outcome.output.branches().front().state, "a3", "b3");
  }
  breakdown.eta =
      efficiency_eta({breakdown.entanglement_out, breakdown.success_probability,
                      breakdown.entanglement_in, kind});
  return breakdown;
}

}  // namespace distill
