#pragma once

#include <complex>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace distill {

using Complex = std::complex<double>;

enum class Polarization : std::uint8_t { H, V };

char to_char(Polarization pol);

/// One optical mode: a spatial channel together with a polarization.
struct ModeLabel {
  std::string spatial;
  Polarization pol = Polarization::H;

  auto operator<=>(const ModeLabel&) const = default;
};

std::string to_string(const ModeLabel& mode);

/// Fixed, ordered set of optical modes. Insertion order defines the canonical
/// occupation-vector ordering used by every state built against the registry.
class ModeRegistry {
 public:
  explicit ModeRegistry(std::vector<ModeLabel> modes);

  /// Registers H and V submodes for each spatial name, in the given order.
  static std::shared_ptr<const ModeRegistry> for_spatials(
      const std::vector<std::string>& spatials);

  std::size_t size() const { return modes_.size(); }
  const ModeLabel& label(std::size_t index) const { return modes_.at(index); }
  std::span<const ModeLabel> labels() const { return modes_; }

  std::size_t index_of(std::string_view spatial, Polarization pol) const;
  std::optional<std::size_t> find(std::string_view spatial, Polarization pol) const;
  bool has_spatial(std::string_view spatial) const;
  /// Indices of all submodes of one spatial channel (H before V).
  std::vector<std::size_t> spatial_indices(std::string_view spatial) const;
  /// Distinct spatial names in registry order.
  std::vector<std::string> spatials() const;

 private:
  std::vector<ModeLabel> modes_;
  std::map<std::pair<std::string, Polarization>, std::size_t> index_;
};

using RegistryPtr = std::shared_ptr<const ModeRegistry>;

/// Same registry object or identical mode lists in identical order.
bool compatible(const RegistryPtr& a, const RegistryPtr& b);

/// Photon occupation numbers, one entry per registered mode.
class FockKet {
 public:
  FockKet() = default;
  explicit FockKet(std::vector<int> occupations);
  static FockKet vacuum(std::size_t n_modes);

  int occupation(std::size_t mode) const { return occ_.at(mode); }
  int total_photons() const;
  std::size_t n_modes() const { return occ_.size(); }
  const std::vector<int>& occupations() const { return occ_; }

  FockKet with_occupation(std::size_t mode, int value) const;

  auto operator<=>(const FockKet&) const = default;

 private:
  std::vector<int> occ_;
};

/// Builds a ket from a photon list; repeated entries raise the occupancy.
FockKet ket_of(const ModeRegistry& reg,
               std::span<const std::pair<std::string, Polarization>> photons);
FockKet ket_of(const ModeRegistry& reg,
               std::initializer_list<std::pair<std::string, Polarization>> photons);

std::string to_string(const ModeRegistry& reg, const FockKet& ket);

struct Term {
  Complex amplitude;
  FockKet ket;
};

/// Sparse superposition of Fock kets over one registry. Immutable after
/// construction; amplitudes with modulus below the prune tolerance are
/// dropped at construction time.
class PureState {
 public:
  static constexpr double kDefaultPruneTolerance = 1e-12;

  PureState(RegistryPtr reg, std::vector<Term> terms,
            double prune_tolerance = kDefaultPruneTolerance);
  PureState(RegistryPtr reg, std::map<FockKet, Complex> amplitudes,
            double prune_tolerance = kDefaultPruneTolerance);

  static PureState vacuum(RegistryPtr reg,
                          double prune_tolerance = kDefaultPruneTolerance);

  const RegistryPtr& registry() const { return reg_; }
  double prune_tolerance() const { return prune_tol_; }

  std::size_t term_count() const { return amps_.size(); }
  bool empty() const { return amps_.empty(); }
  const std::map<FockKet, Complex>& amplitudes() const { return amps_; }
  Complex amplitude(const FockKet& ket) const;

  double squared_norm() const;
  double norm() const;
  bool is_normalized(double tol = 1e-12) const;

  PureState normalized() const;
  PureState scaled(Complex factor) const;
  /// Coherent sum; both states must share a registry.
  PureState plus(const PureState& other) const;

 private:
  RegistryPtr reg_;
  double prune_tol_ = kDefaultPruneTolerance;
  std::map<FockKet, Complex> amps_;
};

/// Merges duplicate kets, prunes tiny amplitudes, does not normalize.
PureState make_pure(const RegistryPtr& reg, std::vector<Term> terms,
                    double prune_tolerance = PureState::kDefaultPruneTolerance);

/// Product state. Registries must be identical (then every ket pair must
/// occupy disjoint modes) or mode-disjoint (then the result lives on the
/// concatenated registry).
PureState tensor(const PureState& s1, const PureState& s2);

/// Inner product, conjugate-linear in the first argument.
Complex inner(const PureState& s1, const PureState& s2);

struct EnsembleBranch {
  double weight = 0.0;
  PureState state;
  std::string label;
};

/// Classically weighted list of pure states.
class MixedEnsemble {
 public:
  MixedEnsemble() = default;

  void add_branch(double weight, PureState state, std::string label = "");

  std::span<const EnsembleBranch> branches() const { return branches_; }
  std::size_t size() const { return branches_.size(); }
  bool empty() const { return branches_.empty(); }
  double total_weight() const;
  bool is_normalized(double tol = 1e-12) const;

  /// Rescales weights to sum to one. Throws on ~zero total weight.
  MixedEnsemble normalized() const;
  /// Combines branches whose states agree up to a global phase.
  MixedEnsemble merged(double overlap_tol = 1e-10) const;

 private:
  std::vector<EnsembleBranch> branches_;
};

/// 4x4 density matrix of a photon pair in the (HH, HV, VH, VV) basis for a
/// designated ordered pair of spatial modes. Validated on construction:
/// Hermitian and unit trace within 1e-12, eigenvalues >= -1e-10.
class TwoQubitDensity {
 public:
  explicit TwoQubitDensity(Eigen::Matrix4cd matrix, double hermitian_tol = 1e-12,
                           double trace_tol = 1e-12, double psd_tol = 1e-10);

  const Eigen::Matrix4cd& matrix() const { return matrix_; }

 private:
  Eigen::Matrix4cd matrix_;
};

/// (HH, HV, VH, VV) amplitudes of a state carrying exactly one photon in each
/// of the two given spatial modes and none elsewhere. Throws with the given
/// context on any ket violating that pattern.
Eigen::Vector4cd two_qubit_amplitudes(const PureState& state,
                                      std::string_view mode_a,
                                      std::string_view mode_b,
                                      std::string_view context = "");

/// Ensemble-averaged two-qubit density matrix for a pair of spatial modes.
TwoQubitDensity reduce_two_qubit(const MixedEnsemble& ens, std::string_view mode_a,
                                 std::string_view mode_b);

/// Rebuilds a state on a target registry by renaming spatial channels.
/// Every spatial mode with nonzero occupation must appear in the map.
PureState relabel(const PureState& state, const RegistryPtr& target,
                  const std::map<std::string, std::string>& spatial_map);

}  // namespace distill
