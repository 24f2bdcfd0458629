#include "distill/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace distill {

char to_char(Polarization pol) { return pol == Polarization::H ? 'H' : 'V'; }

std::string to_string(const ModeLabel& mode) {
  return mode.spatial + ":" + to_char(mode.pol);
}

ModeRegistry::ModeRegistry(std::vector<ModeLabel> modes) : modes_(std::move(modes)) {
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    auto key = std::make_pair(modes_[i].spatial, modes_[i].pol);
    if (!index_.emplace(std::move(key), i).second) {
      throw std::invalid_argument("duplicate mode label: " + to_string(modes_[i]));
    }
  }
}

std::shared_ptr<const ModeRegistry> ModeRegistry::for_spatials(
    const std::vector<std::string>& spatials) {
  std::vector<ModeLabel> modes;
  modes.reserve(2 * spatials.size());
  for (const auto& s : spatials) {
    modes.push_back({s, Polarization::H});
    modes.push_back({s, Polarization::V});
  }
  return std::make_shared<const ModeRegistry>(std::move(modes));
}

std::size_t ModeRegistry::index_of(std::string_view spatial, Polarization pol) const {
  auto found = find(spatial, pol);
  if (!found) {
    throw std::invalid_argument("unknown mode label: " + std::string(spatial) + ":" +
                                to_char(pol));
  }
  return *found;
}

std::optional<std::size_t> ModeRegistry::find(std::string_view spatial,
                                              Polarization pol) const {
  auto it = index_.find(std::make_pair(std::string(spatial), pol));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool ModeRegistry::has_spatial(std::string_view spatial) const {
  return find(spatial, Polarization::H).has_value() ||
         find(spatial, Polarization::V).has_value();
}

std::vector<std::size_t> ModeRegistry::spatial_indices(std::string_view spatial) const {
  std::vector<std::size_t> out;
  for (auto pol : {Polarization::H, Polarization::V}) {
    if (auto idx = find(spatial, pol)) out.push_back(*idx);
  }
  if (out.empty()) {
    throw std::invalid_argument("unknown spatial mode: " + std::string(spatial));
  }
  return out;
}

std::vector<std::string> ModeRegistry::spatials() const {
  std::vector<std::string> out;
  for (const auto& m : modes_) {
    if (std::find(out.begin(), out.end(), m.spatial) == out.end()) {
      out.push_back(m.spatial);
    }
  }
  return out;
}

bool compatible(const RegistryPtr& a, const RegistryPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->size() != b->size()) return false;
  for (std::size_t i = 0; i < a->size(); ++i) {
    if (a->label(i) != b->label(i)) return false;
  }
  return true;
}

FockKet::FockKet(std::vector<int> occupations) : occ_(std::move(occupations)) {
  for (int n : occ_) {
    if (n < 0) throw std::invalid_argument("negative occupation number");
  }
}

FockKet FockKet::vacuum(std::size_t n_modes) {
  return FockKet(std::vector<int>(n_modes, 0));
}

int FockKet::total_photons() const {
  return std::accumulate(occ_.begin(), occ_.end(), 0);
}

FockKet FockKet::with_occupation(std::size_t mode, int value) const {
  std::vector<int> occ = occ_;
  occ.at(mode) = value;
  return FockKet(std::move(occ));
}

FockKet ket_of(const ModeRegistry& reg,
               std::span<const std::pair<std::string, Polarization>> photons) {
  std::vector<int> occ(reg.size(), 0);
  for (const auto& [spatial, pol] : photons) {
    occ.at(reg.index_of(spatial, pol)) += 1;
  }
  return FockKet(std::move(occ));
}

FockKet ket_of(const ModeRegistry& reg,
               std::initializer_list<std::pair<std::string, Polarization>> photons) {
  std::vector<std::pair<std::string, Polarization>> v(photons);
  return ket_of(reg, std::span<const std::pair<std::string, Polarization>>(v));
}

std::string to_string(const ModeRegistry& reg, const FockKet& ket) {
  std::ostringstream os;
  os << "|";
  bool first = true;
  for (std::size_t i = 0; i < ket.n_modes(); ++i) {
    int n = ket.occupation(i);
    if (n == 0) continue;
    if (!first) os << " ";
    first = false;
    if (n > 1) os << n << "x";
    os << to_string(reg.label(i));
  }
  if (first) os << "vac";
  os << ">";
  return os.str();
}

namespace {

std::map<FockKet, Complex> merged_and_pruned(const ModeRegistry& reg,
                                             std::vector<Term> terms, double tol) {
  std::map<FockKet, Complex> amps;
  for (auto& term : terms) {
    if (term.ket.n_modes() != reg.size()) {
      throw std::invalid_argument("ket does not match registry size");
    }
    amps[term.ket] += term.amplitude;
  }
  std::erase_if(amps, [tol](const auto& kv) { return std::abs(kv.second) < tol; });
  return amps;
}

}  // namespace

PureState::PureState(RegistryPtr reg, std::vector<Term> terms, double prune_tolerance)
    : PureState(reg, merged_and_pruned(*reg, std::move(terms), prune_tolerance),
                prune_tolerance) {}

PureState::PureState(RegistryPtr reg, std::map<FockKet, Complex> amplitudes,
                     double prune_tolerance)
    : reg_(std::move(reg)), prune_tol_(prune_tolerance), amps_(std::move(amplitudes)) {
  if (!reg_) throw std::invalid_argument("null mode registry");
  std::erase_if(amps_, [this](const auto& kv) {
    if (kv.first.n_modes() != reg_->size()) {
      throw std::invalid_argument("ket does not match registry size");
    }
    return std::abs(kv.second) < prune_tol_;
  });
}

PureState PureState::vacuum(RegistryPtr reg, double prune_tolerance) {
  std::map<FockKet, Complex> amps;
  amps.emplace(FockKet::vacuum(reg->size()), Complex(1.0, 0.0));
  return PureState(std::move(reg), std::move(amps), prune_tolerance);
}

Complex PureState::amplitude(const FockKet& ket) const {
  auto it = amps_.find(ket);
  return it == amps_.end() ? Complex(0.0, 0.0) : it->second;
}

double PureState::squared_norm() const {
  double total = 0.0;
  for (const auto& [ket, amp] : amps_) total += std::norm(amp);
  return total;
}

double PureState::norm() const { return std::sqrt(squared_norm()); }

bool PureState::is_normalized(double tol) const {
  return std::abs(squared_norm() - 1.0) <= tol;
}

PureState PureState::normalized() const {
  double n2 = squared_norm();
  if (n2 < 1e-28) throw std::domain_error("cannot normalize a ~zero state");
  return scaled(Complex(1.0 / std::sqrt(n2), 0.0));
}

PureState PureState::scaled(Complex factor) const {
  std::map<FockKet, Complex> amps = amps_;
  for (auto& [ket, amp] : amps) amp *= factor;
  return PureState(reg_, std::move(amps), prune_tol_);
}

PureState PureState::plus(const PureState& other) const {
  if (!compatible(reg_, other.reg_)) {
    throw std::invalid_argument("cannot add states over different registries");
  }
  std::map<FockKet, Complex> amps = amps_;
  for (const auto& [ket, amp] : other.amps_) amps[ket] += amp;
  return PureState(reg_, std::move(amps), std::min(prune_tol_, other.prune_tol_));
}

PureState make_pure(const RegistryPtr& reg, std::vector<Term> terms,
                    double prune_tolerance) {
  return PureState(reg, std::move(terms), prune_tolerance);
}

PureState tensor(const PureState& s1, const PureState& s2) {
  const auto& r1 = s1.registry();
  const auto& r2 = s2.registry();

  if (compatible(r1, r2)) {
    std::map<FockKet, Complex> amps;
    for (const auto& [k1, a1] : s1.amplitudes()) {
      for (const auto& [k2, a2] : s2.amplitudes()) {
        std::vector<int> occ(r1->size());
        for (std::size_t m = 0; m < r1->size(); ++m) {
          int n1 = k1.occupation(m);
          int n2 = k2.occupation(m);
          if (n1 > 0 && n2 > 0) {
            throw std::invalid_argument("tensor: photon collision in mode " +
                                        to_string(r1->label(m)));
          }
          occ[m] = n1 + n2;
        }
        amps[FockKet(std::move(occ))] += a1 * a2;
      }
    }
    return PureState(r1, std::move(amps),
                     std::min(s1.prune_tolerance(), s2.prune_tolerance()));
  }

  // Distinct registries must be mode-disjoint; result lives on the concatenation.
  std::vector<ModeLabel> modes(r1->labels().begin(), r1->labels().end());
  for (const auto& m : r2->labels()) {
    if (r1->find(m.spatial, m.pol)) {
      throw std::invalid_argument("tensor: registries share mode " + to_string(m));
    }
    modes.push_back(m);
  }
  auto joint = std::make_shared<const ModeRegistry>(std::move(modes));
  std::map<FockKet, Complex> amps;
  for (const auto& [k1, a1] : s1.amplitudes()) {
    for (const auto& [k2, a2] : s2.amplitudes()) {
      std::vector<int> occ = k1.occupations();
      occ.insert(occ.end(), k2.occupations().begin(), k2.occupations().end());
      amps[FockKet(std::move(occ))] += a1 * a2;
    }
  }
  return PureState(joint, std::move(amps),
                   std::min(s1.prune_tolerance(), s2.prune_tolerance()));
}

Complex inner(const PureState& s1, const PureState& s2) {
  if (!compatible(s1.registry(), s2.registry())) {
    throw std::invalid_argument("inner: states over different registries");
  }
  Complex total(0.0, 0.0);
  const auto& a = s1.amplitudes();
  const auto& b = s2.amplitudes();
  // Walk the smaller map.
  if (a.size() <= b.size()) {
    for (const auto& [ket, amp] : a) {
      auto it = b.find(ket);
      if (it != b.end()) total += std::conj(amp) * it->second;
    }
  } else {
    for (const auto& [ket, amp] : b) {
      auto it = a.find(ket);
      if (it != a.end()) total += std::conj(it->second) * amp;
    }
  }
  return total;
}

void MixedEnsemble::add_branch(double weight, PureState state, std::string label) {
  if (weight < 0.0) throw std::invalid_argument("negative ensemble weight");
  branches_.push_back({weight, std::move(state), std::move(label)});
}

double MixedEnsemble::total_weight() const {
  double total = 0.0;
  for (const auto& b : branches_) total += b.weight;
  return total;
}

bool MixedEnsemble::is_normalized(double tol) const {
  if (std::abs(total_weight() - 1.0) > tol) return false;
  for (const auto& b : branches_) {
    if (!b.state.is_normalized(1e-9)) return false;
  }
  return true;
}

MixedEnsemble MixedEnsemble::normalized() const {
  double total = total_weight();
  if (total < 1e-28) throw std::domain_error("cannot normalize a zero-weight ensemble");
  MixedEnsemble out;
  for (const auto& b : branches_) out.add_branch(b.weight / total, b.state, b.label);
  return out;
}

MixedEnsemble MixedEnsemble::merged(double overlap_tol) const {
  MixedEnsemble out;
  std::vector<EnsembleBranch> merged;
  for (const auto& b : branches_) {
    bool found = false;
    for (auto& m : merged) {
      if (m.state.registry() != b.state.registry()) continue;
      // Same physical state iff |<m|b>|^2 ~ |m|^2 |b|^2 (global phase ignored).
      double ov = std::norm(inner(m.state, b.state));
      double ref = m.state.squared_norm() * b.state.squared_norm();
      if (ref > 0.0 && std::abs(ov - ref) <= overlap_tol * ref) {
        m.weight += b.weight;
        found = true;
        break;
      }
    }
    if (!found) merged.push_back(b);
  }
  for (auto& m : merged) out.add_branch(m.weight, std::move(m.state), std::move(m.label));
  return out;
}

TwoQubitDensity::TwoQubitDensity(Eigen::Matrix4cd matrix, double hermitian_tol,
                                 double trace_tol, double psd_tol)
    : matrix_(std::move(matrix)) {
  if ((matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() > hermitian_tol) {
    throw std::invalid_argument("density matrix is not Hermitian");
  }
  if (std::abs(matrix_.trace().real() - 1.0) > trace_tol ||
      std::abs(matrix_.trace().imag()) > trace_tol) {
    throw std::invalid_argument("density matrix trace is not 1");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> solver(matrix_);
  if (solver.eigenvalues().minCoeff() < -psd_tol) {
    throw std::invalid_argument("density matrix is not positive semidefinite");
  }
}

Eigen::Vector4cd two_qubit_amplitudes(const PureState& state, std::string_view mode_a,
                                      std::string_view mode_b,
                                      std::string_view context) {
  const auto& reg = *state.registry();
  const std::size_t ah = reg.index_of(mode_a, Polarization::H);
  const std::size_t av = reg.index_of(mode_a, Polarization::V);
  const std::size_t bh = reg.index_of(mode_b, Polarization::H);
  const std::size_t bv = reg.index_of(mode_b, Polarization::V);

  Eigen::Vector4cd psi = Eigen::Vector4cd::Zero();
  for (const auto& [ket, amp] : state.amplitudes()) {
    const int na = ket.occupation(ah) + ket.occupation(av);
    const int nb = ket.occupation(bh) + ket.occupation(bv);
    if (na != 1 || nb != 1 || ket.total_photons() != 2) {
      std::string where = context.empty() ? "state" : std::string(context);
      throw std::invalid_argument(where + ": ket " + to_string(reg, ket) +
                                  " is not one photon in each of " +
                                  std::string(mode_a) + "," + std::string(mode_b));
    }
    const int a_bit = ket.occupation(av);  // 0 -> H, 1 -> V
    const int b_bit = ket.occupation(bv);
    psi(2 * a_bit + b_bit) += amp;
  }
  return psi;
}

TwoQubitDensity reduce_two_qubit(const MixedEnsemble& ens, std::string_view mode_a,
                                 std::string_view mode_b) {
  Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();
  std::size_t index = 0;
  for (const auto& b : ens.branches()) {
    std::string context = "branch " + (b.label.empty() ? std::to_string(index) : b.label);
    Eigen::Vector4cd psi = two_qubit_amplitudes(b.state, mode_a, mode_b, context);
    rho += b.weight * (psi * psi.adjoint());
    ++index;
  }
  return TwoQubitDensity(rho);
}

PureState relabel(const PureState& state, const RegistryPtr& target,
                  const std::map<std::string, std::string>& spatial_map) {
  const auto& src = *state.registry();
  std::vector<std::optional<std::size_t>> mode_map(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    const auto& label = src.label(i);
    auto it = spatial_map.find(label.spatial);
    if (it != spatial_map.end()) {
      mode_map[i] = target->index_of(it->second, label.pol);
    }
  }

  std::map<FockKet, Complex> amps;
  for (const auto& [ket, amp] : state.amplitudes()) {
    std::vector<int> occ(target->size(), 0);
    for (std::size_t i = 0; i < src.size(); ++i) {
      int n = ket.occupation(i);
      if (n == 0) continue;
      if (!mode_map[i]) {
        throw std::invalid_argument("relabel: occupied mode " +
                                    to_string(src.label(i)) + " has no mapping");
      }
      occ[*mode_map[i]] += n;
    }
    amps[FockKet(std::move(occ))] += amp;
  }
  return PureState(target, std::move(amps), state.prune_tolerance());
}

}  // namespace distill
