#include "distill/reporting.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <future>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "distill/closedform.hpp"
#include "distill/measures.hpp"
#include "distill/optics.hpp"
#include "distill/version.hpp"

namespace distill {

std::string format_sig12(double value) {
  char buffer[48];
  std::snprintf(buffer, sizeof(buffer), "%.12g", value);
  return buffer;
}

double round_sig12(double value) {
  return std::strtod(format_sig12(value).c_str(), nullptr);
}

std::string to_csv(const Dataset& dataset) {
  std::ostringstream os;
  for (const auto& [key, value] : dataset.metadata) {
    os << "# " << key << " = " << value << "\n";
  }
  for (std::size_t i = 0; i < dataset.columns.size(); ++i) {
    if (i) os << ",";
    os << dataset.columns[i];
  }
  os << "\n";
  for (const auto& row : dataset.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << ",";
      os << format_sig12(row[i]);
    }
    os << "\n";
  }
  return os.str();
}

std::string to_json(const Dataset& dataset) {
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  for (const auto& [key, value] : dataset.metadata) meta[key] = value;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : dataset.rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size(); ++i) {
      obj[dataset.columns[i]] = round_sig12(row[i]);
    }
    rows.push_back(std::move(obj));
  }
  nlohmann::ordered_json root = nlohmann::ordered_json::object();
  root["metadata"] = std::move(meta);
  root["rows"] = std::move(rows);
  return root.dump(2) + "\n";
}

namespace {

std::vector<std::pair<std::string, std::string>> base_metadata(
    Protocol protocol, const ProtocolParams& params, MeasureKind measure) {
  std::vector<std::pair<std::string, std::string>> meta;
  meta.emplace_back("version", std::string(kVersion));
  meta.emplace_back("protocol", to_string(protocol));
  meta.emplace_back("fidelity", format_sig12(params.fidelity));
  meta.emplace_back("alpha2", format_sig12(params.alpha2));
  if (protocol == Protocol::Multipartite) {
    meta.emplace_back("parties", std::to_string(params.parties));
  }
  if (protocol == Protocol::Spdc) {
    meta.emplace_back("spdc-p", format_sig12(params.spdc_p));
    meta.emplace_back("delta", format_sig12(params.delta));
    meta.emplace_back("weighting", to_string(params.weighting));
  }
  meta.emplace_back("measure", to_string(measure));
  return meta;
}

std::string mode_ordering_note() {
  // Registries are built party by party: src1, src2, keep, cross, with H
  // before V inside each spatial channel.
  return "per party: <p>1,<p>2,<p>3,<p>4; H before V";
}

/// Compact rendering of a sparse state: up to three leading terms.
std::string brief_state(const PureState& state) {
  std::ostringstream os;
  std::size_t shown = 0;
  for (const auto& [ket, amp] : state.amplitudes()) {
    if (shown == 3) {
      os << " + ...";
      break;
    }
    if (std::abs(amp.imag()) > 1e-12) {
      if (shown) os << " + ";
      os << "(" << format_sig12(amp.real()) << (amp.imag() < 0 ? "-" : "+")
         << format_sig12(std::abs(amp.imag())) << "i)";
    } else {
      if (shown) os << (amp.real() < 0 ? " - " : " + ");
      else if (amp.real() < 0) os << "-";
      os << format_sig12(std::abs(amp.real()));
    }
    os << to_string(*state.registry(), ket);
    ++shown;
  }
  if (shown == 0) os << "0";
  return os.str();
}

/// Concurrence of the bit-flip-error input mixture, via the Wootters
/// eigenvalue computation on the reduced two-qubit density matrix.
double input_concurrence_simulated(const ProtocolParams& params) {
  using P = Polarization;
  const auto reg = ModeRegistry::for_spatials({"a", "b"});
  const double al = params.alpha();
  const double be = params.beta();
  const PureState phi =
      make_pure(reg, {{al, ket_of(*reg, {{"a", P::H}, {"b", P::H}})},
                      {be, ket_of(*reg, {{"a", P::V}, {"b", P::V}})}});
  const PureState psi =
      make_pure(reg, {{al, ket_of(*reg, {{"a", P::H}, {"b", P::V}})},
                      {be, ket_of(*reg, {{"a", P::V}, {"b", P::H}})}});
  MixedEnsemble input;
  input.add_branch(params.fidelity, phi, "Phi+");
  if (params.fidelity < 1.0) input.add_branch(1.0 - params.fidelity, psi, "Psi+");
  return concurrence(reduce_two_qubit(input, "a", "b"));
}

}  // namespace

ClosedForms closed_forms_for(Protocol protocol, const ProtocolParams& params) {
  ClosedForms forms;
  switch (protocol) {
    case Protocol::BitFlip: {
      forms.fidelity = evaluate(FormulaId::BitflipFidelity, params).value;
      forms.probability = evaluate(FormulaId::BitflipProb, params).value;
      break;
    }
    case Protocol::PhaseFlipStage1: {
      forms.fidelity = evaluate(FormulaId::PhaseflipStage1Weights, params).value;
      ProtocolParams at_f1 = params;
      at_f1.fidelity = 1.0;  // 2|ab|^2, independent of F
      forms.probability = evaluate(FormulaId::BitflipProb, at_f1).value;
      break;
    }
    case Protocol::PhaseFlipFull: {
      forms.fidelity = evaluate(FormulaId::PhaseflipFullFidelity, params).value;
      const double f = params.fidelity;
      ProtocolParams second = params;
      second.fidelity = f * f + (1.0 - f) * (1.0 - f);
      second.alpha2 = 0.5;  // second round acts on maximally entangled branches
      forms.probability = evaluate(FormulaId::BitflipProb, second).value;
      break;
    }
    case Protocol::Multipartite: {
      forms.fidelity = evaluate(FormulaId::BitflipFidelity, params).value;
      break;  // no closed-form success probability is asserted
    }
    case Protocol::Spdc: {
      if (params.weighting == Weighting::Paper) {
        forms.fidelity = evaluate(FormulaId::SpdcFidelity, params).value;
      }
      break;
    }
  }
  return forms;
}

Dataset run_sweep(const SweepConfig& config) {
  if (config.step <= 0.0) throw std::domain_error("sweep step must be > 0");
  if (config.stop < config.start) throw std::domain_error("sweep stop < start");
  if (config.parameter != "fidelity" && config.parameter != "alpha2" &&
      config.parameter != "delta" && config.parameter != "spdc-p") {
    throw std::domain_error("unknown sweep parameter: " + config.parameter);
  }

  std::vector<double> grid;
  const auto count =
      static_cast<std::size_t>((config.stop - config.start) / config.step + 1e-9);
  for (std::size_t i = 0; i <= count; ++i) {
    grid.push_back(std::min(config.start + static_cast<double>(i) * config.step,
                            config.stop));
  }

  auto params_at = [&](double value) {
    ProtocolParams p = config.params;
    if (config.parameter == "fidelity") p.fidelity = value;
    else if (config.parameter == "alpha2") p.alpha2 = value;
    else if (config.parameter == "delta") p.delta = value;
    else p.spdc_p = value;
    return p;
  };

  const ClosedForms probe = closed_forms_for(config.protocol, params_at(grid.front()));
  Dataset dataset;
  dataset.metadata = base_metadata(config.protocol, config.params, config.measure);
  dataset.metadata.emplace_back("sweep", config.parameter);
  dataset.metadata.emplace_back("start", format_sig12(config.start));
  dataset.metadata.emplace_back("stop", format_sig12(config.stop));
  dataset.metadata.emplace_back("step", format_sig12(config.step));
  dataset.metadata.emplace_back("modes", mode_ordering_note());

  dataset.columns = {config.parameter, "sim_fidelity"};
  if (probe.fidelity) {
    dataset.columns.push_back("closed_fidelity");
    dataset.columns.push_back("abs_diff_fidelity");
  }
  dataset.columns.push_back("sim_probability");
  if (probe.probability) {
    dataset.columns.push_back("closed_probability");
    dataset.columns.push_back("abs_diff_probability");
  }

  std::vector<std::future<std::vector<double>>> futures;
  futures.reserve(grid.size());
  for (double value : grid) {
    futures.push_back(std::async(std::launch::async, [&, value] {
      const ProtocolParams p = params_at(value);
      const DistillationOutcome outcome = run_protocol(config.protocol, p);
      const ClosedForms forms = closed_forms_for(config.protocol, p);
      std::vector<double> row{value, outcome.fidelity_out};
      if (probe.fidelity) {
        row.push_back(*forms.fidelity);
        row.push_back(std::abs(outcome.fidelity_out - *forms.fidelity));
      }
      row.push_back(outcome.success_probability);
      if (probe.probability) {
        row.push_back(*forms.probability);
        row.push_back(std::abs(outcome.success_probability - *forms.probability));
      }
      return row;
    }));
  }
  for (auto& future : futures) dataset.rows.push_back(future.get());
  return dataset;
}

std::string to_string(Figure figure) {
  switch (figure) {
    case Figure::Fig4: return "fig4";
    case Figure::Fig5: return "fig5";
    case Figure::Fig6: return "fig6";
    case Figure::Fig7: return "fig7";
  }
  return "fig?";
}

Figure figure_from_string(std::string_view name) {
  if (name == "fig4") return Figure::Fig4;
  if (name == "fig5") return Figure::Fig5;
  if (name == "fig6") return Figure::Fig6;
  if (name == "fig7") return Figure::Fig7;
  throw std::domain_error("unknown figure: " + std::string(name));
}

Dataset figure_dataset(Figure figure, MeasureKind measure) {
  Dataset dataset;
  dataset.metadata.emplace_back("version", std::string(kVersion));
  dataset.metadata.emplace_back("figure", to_string(figure));

  switch (figure) {
    case Figure::Fig4: {
      dataset.metadata.emplace_back(
          "description", "output fidelity vs F: ideal source (curve_a) and "
                         "two-pass source model (curve_b)");
      dataset.metadata.emplace_back("measure", to_string(measure));
      dataset.columns = {"fidelity", "curve_a", "curve_b"};
      for (int i = 0; i <= 50; ++i) {
        ProtocolParams p;
        p.fidelity = std::min(0.5 + 0.01 * i, 1.0);
        p.alpha2 = 0.25;
        dataset.rows.push_back({p.fidelity,
                                evaluate(FormulaId::BitflipFidelity, p).value,
                                evaluate(FormulaId::SpdcFidelity, p).value});
      }
      break;
    }
    case Figure::Fig5: {
      dataset.metadata.emplace_back("description",
                                    "input-mixture concurrence vs F at alpha2 = 1/16");
      dataset.metadata.emplace_back("alpha2", format_sig12(1.0 / 16.0));
      dataset.metadata.emplace_back("measure", "concurrence");
      dataset.columns = {"fidelity", "concurrence"};
      for (int i = 0; i <= 50; ++i) {
        ProtocolParams p;
        p.fidelity = std::min(0.5 + 0.01 * i, 1.0);
        p.alpha2 = 1.0 / 16.0;
        dataset.rows.push_back({p.fidelity, input_concurrence_simulated(p)});
      }
      break;
    }
    case Figure::Fig6: {
      dataset.metadata.emplace_back("description",
                                    "transformation efficiency vs alpha2 at F = 1");
      dataset.metadata.emplace_back("fidelity", "1");
      dataset.metadata.emplace_back("measure", to_string(measure));
      dataset.columns = {"alpha2", "eta"};
      for (int i = 1; i <= 49; ++i) {
        ProtocolParams p;
        p.fidelity = 1.0;
        p.alpha2 = 0.02 * i;
        dataset.rows.push_back({p.alpha2, bitflip_efficiency(p, measure).eta});
      }
      break;
    }
    case Figure::Fig7: {
      if (measure != MeasureKind::Concurrence) {
        throw std::domain_error(
            "fig7 requires the concurrence measure (mixed input, F = 0.6)");
      }
      dataset.metadata.emplace_back("description",
                                    "transformation efficiency vs alpha2 at F = 0.6; "
                                    "eta_spread is max-min of eta over F in "
                                    "{0.55..0.95 step 0.05}");
      dataset.metadata.emplace_back("fidelity", "0.6");
      dataset.metadata.emplace_back("measure", to_string(measure));
      dataset.columns = {"alpha2", "eta", "eta_spread"};
      for (int i = 1; i <= 49; ++i) {
        ProtocolParams p;
        p.fidelity = 0.6;
        p.alpha2 = 0.02 * i;
        const double eta = bitflip_efficiency(p, measure).eta;
        double lo = eta, hi = eta;
        for (int j = 0; j <= 8; ++j) {
          ProtocolParams q = p;
          q.fidelity = 0.55 + 0.05 * j;
          const double e = bitflip_efficiency(q, measure).eta;
          lo = std::min(lo, e);
          hi = std::max(hi, e);
        }
        dataset.rows.push_back({p.alpha2, eta, hi - lo});
      }
      break;
    }
  }
  return dataset;
}

Dataset distill_dataset(Protocol protocol, const ProtocolParams& params,
                        const DistillationOutcome& outcome) {
  const ClosedForms forms = closed_forms_for(protocol, params);
  Dataset dataset;
  dataset.metadata = base_metadata(protocol, params, MeasureKind::Concurrence);
  dataset.metadata.back().second = "none";  // no entanglement measure in this run
  dataset.metadata.emplace_back("modes", mode_ordering_note());
  dataset.metadata.emplace_back("below_threshold",
                                outcome.below_threshold ? "true" : "false");

  dataset.columns = {"sim_fidelity", "sim_probability"};
  std::vector<double> row{outcome.fidelity_out, outcome.success_probability};
  if (forms.fidelity) {
    dataset.columns.push_back("closed_fidelity");
    dataset.columns.push_back("abs_diff_fidelity");
    row.push_back(*forms.fidelity);
    row.push_back(std::abs(outcome.fidelity_out - *forms.fidelity));
  }
  if (forms.probability) {
    dataset.columns.push_back("closed_probability");
    dataset.columns.push_back("abs_diff_probability");
    row.push_back(*forms.probability);
    row.push_back(std::abs(outcome.success_probability - *forms.probability));
  }
  dataset.rows.push_back(std::move(row));
  return dataset;
}

std::string distill_report(Protocol protocol, const ProtocolParams& params,
                           const DistillationOutcome& outcome) {
  std::ostringstream os;
  os << "protocol: " << to_string(protocol) << "\n";
  os << "params: fidelity=" << format_sig12(params.fidelity)
     << " alpha2=" << format_sig12(params.alpha2);
  if (protocol == Protocol::Multipartite) os << " parties=" << params.parties;
  if (protocol == Protocol::Spdc) {
    os << " spdc-p=" << format_sig12(params.spdc_p)
       << " delta=" << format_sig12(params.delta)
       << " weighting=" << to_string(params.weighting);
  }
  os << "\n";
  if (outcome.below_threshold) os << "note: input fidelity at or below 1/2\n";

  os << "success_probability: " << format_sig12(outcome.success_probability) << "\n";
  os << "fidelity_out:        " << format_sig12(outcome.fidelity_out) << "\n";

  const ClosedForms forms = closed_forms_for(protocol, params);
  if (forms.fidelity) {
    os << "closed_fidelity:     " << format_sig12(*forms.fidelity)
       << "  |diff| = " << format_sig12(std::abs(outcome.fidelity_out - *forms.fidelity))
       << "\n";
  }
  if (forms.probability) {
    os << "closed_probability:  " << format_sig12(*forms.probability) << "  |diff| = "
       << format_sig12(std::abs(outcome.success_probability - *forms.probability))
       << "\n";
  }

  for (const auto& stage : outcome.stage_reports) {
    os << "stage " << stage.name << ": P=" << format_sig12(stage.success_probability)
       << " F=" << format_sig12(stage.fidelity_out) << "\n";
  }

  os << "selection (joint branch, prior, survive):\n";
  for (const auto& sel : outcome.selection) {
    os << "  " << sel.label << "  " << format_sig12(sel.prior_weight) << "  "
       << format_sig12(sel.postselect_probability) << "\n";
  }

  os << "branches (outcome, probability, corrected):\n";
  for (const auto& branch : outcome.branches) {
    os << "  " << branch.outcome << "  " << format_sig12(branch.probability) << "  "
       << (branch.correction_applied ? "yes" : "no") << "\n";
  }

  os << "output mixture:\n";
  for (const auto& branch : outcome.output.branches()) {
    os << "  weight " << format_sig12(branch.weight) << "  "
       << brief_state(branch.state) << "\n";
  }
  for (const auto& [key, value] : outcome.extras) {
    os << key << ": " << format_sig12(value) << "\n";
  }
  return os.str();
}

ValidationReport run_validation(std::uint64_t trials, std::uint64_t seed) {
  struct Point {
    Protocol protocol;
    double fidelity;
    double alpha2;
  };
  std::vector<Point> points;
  for (Protocol protocol :
       {Protocol::BitFlip, Protocol::PhaseFlipStage1, Protocol::PhaseFlipFull,
        Protocol::Multipartite, Protocol::Spdc}) {
    points.push_back({protocol, 0.75, 0.25});
    points.push_back({protocol, 0.60, 0.10});
    points.push_back({protocol, 0.90, 0.40});
  }

  ValidationReport report;
  report.all_passed = true;
  std::ostringstream os;
  os << "mc-validate trials=" << trials << " seed=" << seed << "\n";

  std::uint64_t check_seed = seed;
  for (const auto& point : points) {
    ProtocolParams params;
    params.fidelity = point.fidelity;
    params.alpha2 = point.alpha2;
    if (point.protocol == Protocol::Multipartite) params.parties = 3;

    ValidationCheck check;
    check.protocol = point.protocol;
    check.params = params;
    check.analytic_success =
        run_protocol(point.protocol, params).success_probability;
    check.estimate = mc_validate(point.protocol, params, trials, check_seed++);
    const double sigma = std::max(check.estimate.success_stderr, 1e-12);
    check.deviation_sigmas =
        std::abs(check.estimate.success_probability - check.analytic_success) / sigma;
    check.passed = check.deviation_sigmas <= 4.0;
    report.all_passed = report.all_passed && check.passed;

    os << to_string(point.protocol) << " F=" << format_sig12(point.fidelity)
       << " a2=" << format_sig12(point.alpha2)
       << " est=" << format_sig12(check.estimate.success_probability)
       << " exact=" << format_sig12(check.analytic_success)
       << " sigmas=" << format_sig12(check.deviation_sigmas) << " "
       << (check.passed ? "PASS" : "FAIL") << "\n";
    report.checks.push_back(std::move(check));
  }
  os << "result: " << (report.all_passed ? "PASS" : "FAIL") << "\n";
  report.text = os.str();
  return report;
}

}  // namespace distill
