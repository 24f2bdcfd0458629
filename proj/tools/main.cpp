// Command-line front end: run a distillation protocol, sweep a parameter,
// emit the result-figure datasets, or cross-check the exact propagation with
// the seeded Monte Carlo validator.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "distill/params.hpp"
#include "distill/protocols.hpp"
#include "distill/reporting.hpp"
#include "distill/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitInternal = 3;

struct CommonFlags {
  std::string protocol = "bitflip";
  distill::ProtocolParams params;
  std::string weighting = "paper";
  std::string measure = "concurrence";
  std::string format = "text";
  std::string config_path;
};

void add_param_options(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--fidelity,-F", flags.params.fidelity,
                  "initial fidelity F in (0, 1]");
  cmd->add_option("--alpha2,-a", flags.params.alpha2,
                  "squared amplitude alpha^2 in (0, 1)");
  cmd->add_option("--parties,-N", flags.params.parties,
                  "party count (multipartite only)");
  cmd->add_option("--delta", flags.params.delta,
                  "second-pass relative phase in radians (spdc only)");
  cmd->add_option("--spdc-p", flags.params.spdc_p,
                  "pair-generation probability (spdc only)");
  cmd->add_option("--weighting", flags.weighting,
                  "double-pair weighting: paper | physical")
      ->check(CLI::IsMember({"paper", "physical"}));
  cmd->add_option("--config", flags.config_path,
                  "flat key = value configuration file; flags override it");
}

/// Flat "key = value" lines; '#' starts a comment.
std::map<std::string, std::string> read_flat_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::domain_error("cannot read config file: " + path);
  std::map<std::string, std::string> config;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto first = s.find_first_not_of(" \t\r");
      const auto last = s.find_last_not_of(" \t\r");
      return first == std::string::npos ? std::string{}
                                        : s.substr(first, last - first + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!key.empty()) config[key] = value;
  }
  return config;
}

double config_number(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const double parsed = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0') {
    throw std::domain_error("config value for " + key + " is not a number: " + value);
  }
  return parsed;
}

/// Applies config entries to options the command line did not set.
class ConfigApplier {
 public:
  ConfigApplier(CLI::App* cmd, const std::map<std::string, std::string>& config)
      : cmd_(cmd), config_(config) {}

  void number(const std::string& key, double& target) const {
    if (const auto* value = lookup(key)) target = config_number(key, *value);
  }
  void integer(const std::string& key, int& target) const {
    if (const auto* value = lookup(key)) {
      target = static_cast<int>(config_number(key, *value));
    }
  }
  void text(const std::string& key, std::string& target) const {
    if (const auto* value = lookup(key)) target = *value;
  }

 private:
  const std::string* lookup(const std::string& key) const {
    auto it = config_.find(key);
    if (it == config_.end()) return nullptr;
    if (cmd_->count("--" + key) > 0) return nullptr;  // flags win
    return &it->second;
  }

  CLI::App* cmd_;
  const std::map<std::string, std::string>& config_;
};

void apply_common_config(CLI::App* cmd, CommonFlags& flags) {
  if (flags.config_path.empty()) return;
  const auto config = read_flat_config(flags.config_path);
  const ConfigApplier apply(cmd, config);
  apply.number("fidelity", flags.params.fidelity);
  apply.number("alpha2", flags.params.alpha2);
  apply.integer("parties", flags.params.parties);
  apply.number("delta", flags.params.delta);
  apply.number("spdc-p", flags.params.spdc_p);
  apply.text("weighting", flags.weighting);
  apply.text("protocol", flags.protocol);
  apply.text("format", flags.format);
  apply.text("measure", flags.measure);
}

void finalize_params(CommonFlags& flags) {
  flags.params.weighting = distill::weighting_from_string(flags.weighting);
}

void write_or_print(const std::string& content, const std::string& path) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::domain_error("cannot write " + path);
  out << content;
  if (!out.good()) throw std::domain_error("short write to " + path);
}

std::string render(const distill::Dataset& dataset, const std::string& format) {
  return format == "json" ? distill::to_json(dataset) : distill::to_csv(dataset);
}

int run(int argc, char** argv) {
  CLI::App app{"exact simulator of linear-optical entanglement distillation"};
  app.set_version_flag("--version", std::string(distill::kVersion));
  app.require_subcommand(1);

  // distill
  CommonFlags distill_flags;
  auto* cmd_distill = app.add_subcommand("distill", "run one protocol instance");
  cmd_distill
      ->add_option("protocol", distill_flags.protocol,
                   "bitflip | phaseflip | phaseflip-full | multipartite | spdc")
      ->required()
      ->check(CLI::IsMember(
          {"bitflip", "phaseflip", "phaseflip-full", "multipartite", "spdc"}));
  add_param_options(cmd_distill, distill_flags);
  cmd_distill->add_option("--format", distill_flags.format, "text | csv | json")
      ->check(CLI::IsMember({"text", "csv", "json"}));

  // sweep
  CommonFlags sweep_flags;
  distill::SweepConfig sweep;
  std::string sweep_out;
  auto* cmd_sweep = app.add_subcommand("sweep", "evaluate a protocol on a grid");
  cmd_sweep
      ->add_option("--protocol,-p", sweep_flags.protocol,
                   "bitflip | phaseflip | phaseflip-full | multipartite | spdc")
      ->check(CLI::IsMember(
          {"bitflip", "phaseflip", "phaseflip-full", "multipartite", "spdc"}));
  cmd_sweep->add_option("--param", sweep.parameter,
                        "swept parameter: fidelity | alpha2 | delta | spdc-p");
  cmd_sweep->add_option("--start", sweep.start, "grid start");
  cmd_sweep->add_option("--stop", sweep.stop, "grid stop");
  cmd_sweep->add_option("--step", sweep.step, "grid step (> 0)");
  cmd_sweep->add_option("--out,-o", sweep_out, "output path (stdout when omitted)");
  add_param_options(cmd_sweep, sweep_flags);
  sweep_flags.format = "csv";
  cmd_sweep->add_option("--format", sweep_flags.format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd_sweep->add_option("--measure", sweep_flags.measure, "concurrence | entropy")
      ->check(CLI::IsMember({"concurrence", "entropy"}));

  // figures
  std::vector<std::string> which = {"all"};
  std::string out_dir = ".";
  std::string fig_measure = "concurrence";
  std::string fig_format = "csv";
  auto* cmd_figures =
      app.add_subcommand("figures", "emit the datasets behind the result figures");
  cmd_figures->add_option("which", which, "fig4 | fig5 | fig6 | fig7 | all")
      ->check(CLI::IsMember({"fig4", "fig5", "fig6", "fig7", "all"}));
  cmd_figures->add_option("--out-dir,-o", out_dir, "output directory");
  cmd_figures->add_option("--measure", fig_measure, "concurrence | entropy")
      ->check(CLI::IsMember({"concurrence", "entropy"}));
  cmd_figures->add_option("--format", fig_format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}));

  // validate
  std::uint64_t trials = 100000;
  std::uint64_t seed = 42;
  auto* cmd_validate = app.add_subcommand(
      "validate", "Monte Carlo cross-check of the exact propagation");
  cmd_validate->add_option("--trials", trials, "trial count (>= 1000)");
  cmd_validate->add_option("--seed", seed, "master seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  }

  if (cmd_distill->parsed()) {
    apply_common_config(cmd_distill, distill_flags);
    finalize_params(distill_flags);
    const auto protocol = distill::protocol_from_string(distill_flags.protocol);
    const auto outcome = distill::run_protocol(protocol, distill_flags.params);
    if (distill_flags.format == "text") {
      std::cout << distill::distill_report(protocol, distill_flags.params, outcome);
    } else {
      std::cout << render(
          distill::distill_dataset(protocol, distill_flags.params, outcome),
          distill_flags.format);
    }
    return kExitOk;
  }

  if (cmd_sweep->parsed()) {
    apply_common_config(cmd_sweep, sweep_flags);
    if (!sweep_flags.config_path.empty()) {
      const auto config = read_flat_config(sweep_flags.config_path);
      const ConfigApplier apply(cmd_sweep, config);
      apply.text("param", sweep.parameter);
      apply.number("start", sweep.start);
      apply.number("stop", sweep.stop);
      apply.number("step", sweep.step);
      apply.text("out", sweep_out);
    }
    finalize_params(sweep_flags);
    sweep.protocol = distill::protocol_from_string(sweep_flags.protocol);
    sweep.params = sweep_flags.params;
    sweep.measure = distill::measure_from_string(sweep_flags.measure);
    write_or_print(render(distill::run_sweep(sweep), sweep_flags.format), sweep_out);
    return kExitOk;
  }

  if (cmd_figures->parsed()) {
    const auto measure = distill::measure_from_string(fig_measure);
    std::vector<distill::Figure> figures;
    for (const auto& name : which) {
      if (name == "all") {
        figures = {distill::Figure::Fig4, distill::Figure::Fig5,
                   distill::Figure::Fig6, distill::Figure::Fig7};
        break;
      }
      figures.push_back(distill::figure_from_string(name));
    }
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    for (const auto figure : figures) {
      const auto dataset = distill::figure_dataset(figure, measure);
      const std::string ext = fig_format == "json" ? ".json" : ".csv";
      const auto path =
          std::filesystem::path(out_dir) / (distill::to_string(figure) + ext);
      write_or_print(render(dataset, fig_format), path.string());
      std::cout << "wrote " << path.string() << "\n";
    }
    return kExitOk;
  }

  if (cmd_validate->parsed()) {
    if (trials < 1000) {
      std::cerr << "--trials must be >= 1000\n";
      return kExitUsage;
    }
    const auto report = distill::run_validation(trials, seed);
    std::cout << report.text;
    return report.all_passed ? kExitOk : kExitInternal;
  }

  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
