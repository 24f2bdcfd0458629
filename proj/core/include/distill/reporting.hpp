#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "distill/params.hpp"
#include "distill/protocols.hpp"

namespace distill {

/// Tabular run output: metadata header, named columns, numeric rows. The
/// same dataset serializes to CSV and JSON with identical numeric values
/// (all numbers are rounded to 12 significant digits before emission).
struct Dataset {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

/// Rounds through the 12-significant-digit decimal representation.
double round_sig12(double value);
std::string format_sig12(double value);

/// CSV with '#'-prefixed "key = value" metadata lines and a header row.
std::string to_csv(const Dataset& dataset);
/// Single top-level object {"metadata": {...}, "rows": [{column: value}]}.
std::string to_json(const Dataset& dataset);

/// Closed-form reference values available for a protocol at given parameters.
struct ClosedForms {
  std::optional<double> fidelity;
  std::optional<double> probability;
};
ClosedForms closed_forms_for(Protocol protocol, const ProtocolParams& params);

struct SweepConfig {
  Protocol protocol = Protocol::BitFlip;
  ProtocolParams params;
  std::string parameter = "fidelity";  // fidelity | alpha2 | delta | spdc-p
  double start = 0.5;
  double stop = 1.0;
  double step = 0.01;
  MeasureKind measure = MeasureKind::Concurrence;
};

/// One row per grid point: swept value, simulated fidelity and probability,
/// the matching closed forms where defined, and absolute differences.
/// Grid points are evaluated concurrently; rows are written in grid order.
Dataset run_sweep(const SweepConfig& config);

enum class Figure { Fig4, Fig5, Fig6, Fig7 };
std::string to_string(Figure figure);
Figure figure_from_string(std::string_view name);

/// Datasets behind the four result figures:
///   fig4: output fidelity vs F for the ideal source (curve_a) and the
///         two-pass source model (curve_b);
///   fig5: input-mixture concurrence vs F at alpha^2 = 1/16;
///   fig6: transformation efficiency vs alpha^2 at F = 1;
///   fig7: transformation efficiency vs alpha^2 at F = 0.6, with the spread
///         of eta across an F grid as a constancy check.
Dataset figure_dataset(Figure figure, MeasureKind measure);

/// Single-run report: simulated quantities, branch table, closed-form
/// comparison. Text form is human-readable; the dataset feeds CSV/JSON.
std::string distill_report(Protocol protocol, const ProtocolParams& params,
                           const DistillationOutcome& outcome);
Dataset distill_dataset(Protocol protocol, const ProtocolParams& params,
                        const DistillationOutcome& outcome);

struct ValidationCheck {
  Protocol protocol;
  ProtocolParams params;
  MonteCarloEstimate estimate;
  double analytic_success = 0.0;
  double deviation_sigmas = 0.0;
  bool passed = false;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  std::string text;  // deterministic bytes for a fixed (trials, seed)
  bool all_passed = false;
};

/// Runs the Monte Carlo validator for every protocol at three parameter
/// points each and compares against the exact propagation within 4 sigma.
ValidationReport run_validation(std::uint64_t trials, std::uint64_t seed);

}  // namespace distill
