// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Tolerances are pinned in code next to each check.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "distill/closedform.hpp"
#include "distill/measures.hpp"
#include "distill/protocols.hpp"
#include "distill/reporting.hpp"
#include "helpers.hpp"

using namespace distill;
using testutil::kInvSqrt2;

namespace {

struct Check {
  bool passed = true;
  std::ostringstream detail;

  void require(bool condition, const std::string& message) {
    if (!condition) {
      passed = false;
      if (detail.tellp() > 0) detail << "; ";
      detail << message;
    }
  }
};

ProtocolParams params_at(double f, double a2) {
  ProtocolParams p;
  p.fidelity = f;
  p.alpha2 = a2;
  return p;
}

double closed_fidelity(double f) { return f * f / (f * f + (1 - f) * (1 - f)); }
double closed_probability(double f, double a2) {
  return 2 * a2 * (1 - a2) * (f * f + (1 - f) * (1 - f));
}

std::vector<double> f_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(std::min(0.5 + 0.05 * i, 1.0));
  return grid;
}

std::vector<double> a2_grid() {
  std::vector<double> grid;
  for (int i = 1; i <= 10; ++i) grid.push_back(std::min(0.05 * i, 0.5));
  return grid;
}

// 1. Bit-flip equivalence grid at 1e-9, with the F = 0.75 spot value.
Check criterion_bitflip_grid() {
  Check check;
  double max_df = 0.0, max_dp = 0.0;
  for (double f : f_grid()) {
    for (double a2 : a2_grid()) {
      auto out = distill_bitflip(params_at(f, a2));
      max_df = std::max(max_df, std::abs(out.fidelity_out - closed_fidelity(f)));
      max_dp = std::max(max_dp,
                        std::abs(out.success_probability - closed_probability(f, a2)));
    }
  }
  check.require(max_df < 1e-9, "fidelity grid deviation " + format_sig12(max_df));
  check.require(max_dp < 1e-9, "probability grid deviation " + format_sig12(max_dp));
  auto spot = distill_bitflip(params_at(0.75, 0.25));
  check.require(std::abs(spot.fidelity_out - 0.9) < 1e-9, "spot value F'(0.75) != 0.9");
  check.detail << "max |dF| = " << format_sig12(max_df)
               << ", max |dP| = " << format_sig12(max_dp);
  return check;
}

// 2. Cross-combination branches contribute exactly zero four-mode weight.
Check criterion_cross_terms() {
  Check check;
  double worst = 0.0;
  for (double f : f_grid()) {
    for (double a2 : a2_grid()) {
      auto out = distill_bitflip(params_at(f, a2));
      for (const auto& sel : out.selection) {
        if (sel.label == "Phi+ x Psi+" || sel.label == "Psi+ x Phi+") {
          worst = std::max(worst, sel.postselect_probability);
        }
      }
    }
  }
  check.require(worst < 1e-24, "cross-combination weight " + format_sig12(worst));
  check.detail << "max cross-branch weight = " << format_sig12(worst);
  return check;
}

// 3. Phase-flip stage 1 weights and probability; full two-stage fidelity.
Check criterion_phaseflip() {
  Check check;
  double max_dw = 0.0, max_dp = 0.0;
  for (double f : f_grid()) {
    auto out = distill_phaseflip_stage1(params_at(f, 0.25));
    const double w_plus = f * f + (1 - f) * (1 - f);
    const double w_minus = 2 * f * (1 - f);
    // fidelity_out is the weight on the +-phase pair; the branch weights as a
    // multiset must be {w_plus, w_minus}.
    max_dw = std::max(max_dw, std::abs(out.fidelity_out - w_plus));
    std::vector<double> weights;
    for (const auto& b : out.output.branches()) weights.push_back(b.weight);
    std::sort(weights.begin(), weights.end());
    std::vector<double> expected = {w_plus, w_minus};
    if (w_minus < 1e-12) expected = {w_plus};
    std::sort(expected.begin(), expected.end());
    if (weights.size() != expected.size()) {
      check.require(false, "unexpected branch count at F=" + format_sig12(f));
    } else {
      for (std::size_t i = 0; i < weights.size(); ++i) {
        max_dw = std::max(max_dw, std::abs(weights[i] - expected[i]));
      }
    }
    max_dp = std::max(max_dp, std::abs(out.success_probability - 2 * 0.25 * 0.75));
  }
  check.require(max_dw < 1e-9, "stage-1 weight deviation " + format_sig12(max_dw));
  check.require(max_dp < 1e-9,
                "stage-1 probability F-dependence " + format_sig12(max_dp));

  auto full = distill_phaseflip_full(params_at(0.75, 0.25));
  const double expected = 0.7352941176470588;
  check.require(std::abs(full.fidelity_out - expected) < 1e-9,
                "two-stage fidelity " + format_sig12(full.fidelity_out));
  check.detail << "max stage-1 deviation = " << format_sig12(std::max(max_dw, max_dp))
               << ", two-stage F' = " << format_sig12(full.fidelity_out);
  return check;
}

// 4. Multipartite fidelity, N = 2 reduction, and exact weight accounting.
Check criterion_multipartite() {
  Check check;
  double max_df = 0.0;
  for (int n : {2, 3, 4}) {
    for (double f : {0.6, 0.75, 0.9}) {
      auto params = params_at(f, 0.25);
      params.parties = n;
      auto out = distill_multipartite(params);
      max_df = std::max(max_df, std::abs(out.fidelity_out - closed_fidelity(f)));

      // Parity-conditioned branch accounting conserves the selected weight.
      double measured = 0.0;
      for (const auto& branch : out.branches) measured += branch.probability;
      double selected = 0.0;
      for (const auto& sel : out.selection) {
        selected += sel.prior_weight * sel.postselect_probability;
      }
      check.require(std::abs(measured - selected) < 1e-12,
                    "branch accounting leak at N=" + std::to_string(n));
    }
  }
  check.require(max_df < 1e-9, "multipartite fidelity deviation " + format_sig12(max_df));

  auto params = params_at(0.7, 0.3);
  auto bi = distill_bitflip(params);
  params.parties = 2;
  auto multi = distill_multipartite(params);
  bool fields_match =
      std::abs(bi.success_probability - multi.success_probability) < 1e-12 &&
      std::abs(bi.fidelity_out - multi.fidelity_out) < 1e-12 &&
      bi.output.size() == multi.output.size();
  if (fields_match) {
    for (std::size_t i = 0; i < bi.output.size(); ++i) {
      fields_match = fields_match &&
                     std::abs(bi.output.branches()[i].weight -
                              multi.output.branches()[i].weight) < 1e-12;
    }
    for (std::size_t i = 0; i < bi.selection.size(); ++i) {
      fields_match = fields_match &&
                     std::abs(bi.selection[i].postselect_probability -
                              multi.selection[i].postselect_probability) < 1e-12;
    }
  }
  check.require(fields_match, "N=2 does not reduce to the bipartite driver");
  check.detail << "max |dF| = " << format_sig12(max_df);
  return check;
}

// 5. Two-pass source model: paper-mode closed form, dominance, physical mode.
Check criterion_spdc() {
  Check check;
  double max_df = 0.0;
  for (double f : f_grid()) {
    auto out = distill_spdc(params_at(f, 0.25));
    const double expected = (f * f + 2.0) / (f * f + (1 - f) * (1 - f) + 2.0);
    max_df = std::max(max_df, std::abs(out.fidelity_out - expected));
  }
  check.require(max_df < 1e-9, "paper-mode deviation " + format_sig12(max_df));

  auto fig4 = figure_dataset(Figure::Fig4, MeasureKind::Concurrence);
  bool dominated = true;
  for (const auto& row : fig4.rows) {
    if (row[0] > 0.5 && row[0] < 1.0 && !(row[2] > row[1])) dominated = false;
  }
  check.require(dominated, "curve_b does not dominate curve_a on (0.5, 1)");

  bool physical_ok = true;
  for (double f : f_grid()) {
    auto params = params_at(f, 0.25);
    params.weighting = Weighting::Physical;
    auto out = distill_spdc(params);
    if (!(out.fidelity_out >= closed_fidelity(f) - 1e-12)) physical_ok = false;
  }
  check.require(physical_ok, "physical-mode fidelity falls below curve_a");
  check.detail << "max paper-mode |dF| = " << format_sig12(max_df);
  return check;
}

// 6. Concurrence engine against the closed form and an independent route.
Check criterion_concurrence() {
  Check check;
  auto reg = ModeRegistry::for_spatials({"a", "b"});
  double max_dc = 0.0;
  for (double f : f_grid()) {
    for (double a2 : a2_grid()) {
      auto ens = testutil::input_mixture(reg, "a", "b", f, a2);
      const double c = concurrence(reduce_two_qubit(ens, "a", "b"));
      const double expected = 2 * std::sqrt(a2 * (1 - a2)) * std::abs(2 * f - 1);
      max_dc = std::max(max_dc, std::abs(c - expected));
    }
  }
  check.require(max_dc < 1e-9, "closed-form deviation " + format_sig12(max_dc));

  // Independent route: Hermitian square roots and self-adjoint eigenvalues.
  auto psd_sqrt = [](const Eigen::Matrix4cd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> solver(m);
    Eigen::Vector4d ev = solver.eigenvalues().cwiseMax(0.0);
    return Eigen::Matrix4cd(solver.eigenvectors() * ev.cwiseSqrt().asDiagonal() *
                            solver.eigenvectors().adjoint());
  };
  Eigen::Matrix4cd yy = Eigen::Matrix4cd::Zero();
  yy(0, 3) = -1.0;
  yy(1, 2) = 1.0;
  yy(2, 1) = 1.0;
  yy(3, 0) = -1.0;

  std::mt19937_64 rng(99);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> weight_dist(0.05, 1.0);
  using P = Polarization;
  double max_dr = 0.0;
  for (int i = 0; i < 100; ++i) {
    MixedEnsemble ens;
    double total = 0.0;
    const int branches = 1 + static_cast<int>(weight_dist(rng) * 3.99);
    std::vector<double> weights;
    for (int b = 0; b < branches; ++b) {
      weights.push_back(weight_dist(rng));
      total += weights.back();
    }
    for (int b = 0; b < branches; ++b) {
      std::vector<Term> terms;
      for (P pa : {P::H, P::V}) {
        for (P pb : {P::H, P::V}) {
          terms.push_back({Complex(gauss(rng), gauss(rng)),
                           ket_of(*reg, {{"a", pa}, {"b", pb}})});
        }
      }
      ens.add_branch(weights[b] / total, make_pure(reg, terms).normalized());
    }
    auto rho = reduce_two_qubit(ens, "a", "b");
    const Eigen::Matrix4cd sq = psd_sqrt(rho.matrix());
    const Eigen::Matrix4cd r = psd_sqrt(sq * yy * rho.matrix().conjugate() * yy * sq);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> solver(r);
    const double oracle =
        std::max(0.0, 2.0 * solver.eigenvalues().maxCoeff() - r.trace().real());
    max_dr = std::max(max_dr, std::abs(concurrence(rho) - oracle));
  }
  check.require(max_dr < 1e-7, "independent-route deviation " + format_sig12(max_dr));
  check.detail << "max closed-form |dC| = " << format_sig12(max_dc)
               << ", max cross-route |dC| = " << format_sig12(max_dr);
  return check;
}

// 7. Concurrence-based efficiency is F-independent and equals |ab|/2.
Check criterion_efficiency() {
  Check check;
  double max_spread = 0.0, max_dev = 0.0;
  for (double a2 : {0.05, 0.15, 0.25, 0.35, 0.45}) {
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i <= 8; ++i) {
      const double f = 0.55 + 0.05 * i;
      const double eta =
          bitflip_efficiency(params_at(f, a2), MeasureKind::Concurrence).eta;
      lo = std::min(lo, eta);
      hi = std::max(hi, eta);
    }
    max_spread = std::max(max_spread, hi - lo);
    max_dev = std::max(max_dev, std::abs(hi - std::sqrt(a2 * (1 - a2)) / 2.0));
  }
  check.require(max_spread < 1e-9, "eta spread " + format_sig12(max_spread));
  check.require(max_dev < 1e-9, "eta value deviation " + format_sig12(max_dev));
  check.detail << "max spread = " << format_sig12(max_spread)
               << ", max |eta - ab/2| = " << format_sig12(max_dev);
  return check;
}

// 8. Monte Carlo agreement within 4 sigma at seed 42 and byte-stable reruns.
Check criterion_monte_carlo() {
  Check check;
  auto report = run_validation(100000, 42);
  check.require(report.all_passed, "a 4-sigma check failed");
  double worst = 0.0;
  for (const auto& c : report.checks) worst = std::max(worst, c.deviation_sigmas);

  auto again = run_validation(100000, 42);
  check.require(report.text == again.text, "rerun with the same seed differs");
  check.detail << "max deviation = " << format_sig12(worst) << " sigma";
  return check;
}

// 9. Figure datasets exist with the pinned endpoints.
Check criterion_figures() {
  Check check;
  for (auto figure : {Figure::Fig4, Figure::Fig5, Figure::Fig6, Figure::Fig7}) {
    auto d = figure_dataset(figure, MeasureKind::Concurrence);
    check.require(!d.rows.empty(), to_string(figure) + " is empty");
  }
  auto fig5 = figure_dataset(Figure::Fig5, MeasureKind::Concurrence);
  const double at_half = fig5.rows.front()[1];
  const double at_one = fig5.rows.back()[1];
  check.require(std::abs(at_half) < 1e-9, "C(0.5) = " + format_sig12(at_half));
  check.require(std::abs(at_one - 2.0 * std::sqrt(15.0) / 16.0) < 1e-9,
                "C(1) = " + format_sig12(at_one));
  check.detail << "C(0.5) = " << format_sig12(at_half)
               << ", C(1) = " << format_sig12(at_one);
  return check;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Check()> run;
  };
  const std::vector<Criterion> criteria = {
      {"bit-flip equivalence grid", criterion_bitflip_grid},
      {"cross-term elimination", criterion_cross_terms},
      {"phase-flip stages", criterion_phaseflip},
      {"multipartite reduction and accounting", criterion_multipartite},
      {"two-pass source model", criterion_spdc},
      {"concurrence engine", criterion_concurrence},
      {"efficiency invariance", criterion_efficiency},
      {"monte carlo consistency", criterion_monte_carlo},
      {"figure datasets", criterion_figures},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check check = criteria[i].run();
    std::printf("[%s] criterion %zu: %s (%s)\n", check.passed ? "PASS" : "FAIL", i + 1,
                criteria[i].name, check.detail.str().c_str());
    if (!check.passed) ++failures;
  }
  if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
  return failures;
}
