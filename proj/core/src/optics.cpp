#include "distill/optics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <set>
#include <stdexcept>

namespace distill {

namespace {

double factorial(int n) {
  double out = 1.0;
  for (int i = 2; i <= n; ++i) out *= i;
  return out;
}

void require_distinct(const std::vector<std::size_t>& modes, const std::string& what) {
  std::set<std::size_t> seen(modes.begin(), modes.end());
  if (seen.size() != modes.size()) {
    throw std::invalid_argument(what + " mode list contains duplicates");
  }
}

}  // namespace

LinearElement::LinearElement(std::string name, RegistryPtr reg,
                             std::vector<std::size_t> in_modes,
                             std::vector<std::size_t> out_modes,
                             Eigen::MatrixXcd matrix, double unitary_tol)
    : name_(std::move(name)),
      reg_(std::move(reg)),
      in_modes_(std::move(in_modes)),
      out_modes_(std::move(out_modes)),
      matrix_(std::move(matrix)) {
  if (!reg_) throw std::invalid_argument("null mode registry");
  if (matrix_.rows() != matrix_.cols()) {
    throw std::invalid_argument(name_ + ": matrix must be square");
  }
  if (static_cast<std::size_t>(matrix_.cols()) != in_modes_.size() ||
      static_cast<std::size_t>(matrix_.rows()) != out_modes_.size()) {
    throw std::invalid_argument(name_ + ": matrix size does not match mode lists");
  }
  require_distinct(in_modes_, name_ + " input");
  require_distinct(out_modes_, name_ + " output");
  for (std::size_t m : in_modes_) {
    if (m >= reg_->size()) throw std::invalid_argument(name_ + ": mode out of range");
  }
  for (std::size_t m : out_modes_) {
    if (m >= reg_->size()) throw std::invalid_argument(name_ + ": mode out of range");
  }
  if (in_modes_ != out_modes_) {
    std::set<std::size_t> in(in_modes_.begin(), in_modes_.end());
    for (std::size_t m : out_modes_) {
      if (in.contains(m)) {
        throw std::invalid_argument(
            name_ + ": input and output mode lists must be identical or disjoint");
      }
    }
  }
  Eigen::MatrixXcd gram = matrix_.adjoint() * matrix_;
  Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(matrix_.rows(), matrix_.cols());
  if ((gram - eye).cwiseAbs().maxCoeff() > unitary_tol) {
    throw std::invalid_argument(name_ + ": matrix is not unitary");
  }
}

LinearElement LinearElement::polarization(std::string name, const RegistryPtr& reg,
                                          std::string_view spatial,
                                          const Eigen::Matrix2cd& matrix) {
  std::vector<std::size_t> modes = {reg->index_of(spatial, Polarization::H),
                                    reg->index_of(spatial, Polarization::V)};
  return LinearElement(std::move(name), reg, modes, modes, matrix);
}

LinearElement pbs(const RegistryPtr& reg, std::string_view in1, std::string_view in2,
                  std::string_view out_keep, std::string_view out_cross) {
  std::set<std::string> names{std::string(in1), std::string(in2),
                              std::string(out_keep), std::string(out_cross)};
  if (names.size() != 4) {
    throw std::invalid_argument("pbs: the four spatial labels must be distinct");
  }
  std::vector<std::size_t> in = {reg->index_of(in1, Polarization::H),
                                 reg->index_of(in1, Polarization::V),
                                 reg->index_of(in2, Polarization::H),
                                 reg->index_of(in2, Polarization::V)};
  std::vector<std::size_t> out = {reg->index_of(out_keep, Polarization::H),
                                  reg->index_of(out_keep, Polarization::V),
                                  reg->index_of(out_cross, Polarization::H),
                                  reg->index_of(out_cross, Polarization::V)};
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
  m(2, 0) = 1.0;  // H @ in1 -> H @ out_cross
  m(1, 1) = 1.0;  // V @ in1 -> V @ out_keep
  m(0, 2) = 1.0;  // H @ in2 -> H @ out_keep
  m(3, 3) = 1.0;  // V @ in2 -> V @ out_cross
  std::string name = "pbs(" + std::string(in1) + "," + std::string(in2) + "->" +
                     std::string(out_keep) + "," + std::string(out_cross) + ")";
  return LinearElement(std::move(name), reg, std::move(in), std::move(out), m);
}

LinearElement hwp_flip(const RegistryPtr& reg, std::string_view spatial) {
  Eigen::Matrix2cd x;
  x << 0, 1, 1, 0;
  return LinearElement::polarization("hwp(" + std::string(spatial) + ")", reg, spatial,
                                     x);
}

LinearElement hadamard_wp(const RegistryPtr& reg, std::string_view spatial) {
  const double s = 1.0 / std::sqrt(2.0);
  Eigen::Matrix2cd h;
  h << s, s, s, -s;
  return LinearElement::polarization("hadamard(" + std::string(spatial) + ")", reg,
                                     spatial, h);
}

LinearElement phase_shift(const RegistryPtr& reg, std::string_view spatial,
                          double delta) {
  const Complex phase = std::polar(1.0, delta);
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  m(0, 0) = phase;
  m(1, 1) = phase;
  return LinearElement::polarization("phase(" + std::string(spatial) + ")", reg,
                                     spatial, m);
}

LinearElement pauli_z(const RegistryPtr& reg, std::string_view spatial) {
  Eigen::Matrix2cd z;
  z << 1, 0, 0, -1;
  return LinearElement::polarization("pauliz(" + std::string(spatial) + ")", reg,
                                     spatial, z);
}

namespace {

struct Expansion {
  std::vector<int> occupations;
  Complex coefficient;
};

// Distributes n photons entering via input column j over the output modes:
// (sum_i M(i,j) b_i)^n expanded multinomially, divided by sqrt(n!).
void expand_input_mode(const Eigen::MatrixXcd& m, int col, int n,
                       const std::vector<std::size_t>& out_modes,
                       std::vector<Expansion>& terms) {
  const int n_out = static_cast<int>(out_modes.size());
  std::vector<Expansion> next;
  std::vector<int> counts(n_out, 0);

  // Recursive composition of n into n_out parts.
  auto recurse = [&](auto&& self, int slot, int remaining, Complex coeff) -> void {
    if (slot == n_out - 1) {
      counts[slot] = remaining;
      Complex c = coeff * std::pow(m(slot, col), remaining) /
                  factorial(remaining);
      if (c == Complex(0.0, 0.0)) {
        counts[slot] = 0;
        return;
      }
      for (const auto& t : terms) {
        Expansion e = t;
        for (int i = 0; i < n_out; ++i) e.occupations[out_modes[i]] += counts[i];
        e.coefficient *= c * std::sqrt(factorial(n));
        next.push_back(std::move(e));
      }
      counts[slot] = 0;
      return;
    }
    for (int k = 0; k <= remaining; ++k) {
      Complex c = std::pow(m(slot, col), k) / factorial(k);
      if (c == Complex(0.0, 0.0) && k > 0) continue;
      counts[slot] = k;
      self(self, slot + 1, remaining - k, coeff * c);
      counts[slot] = 0;
    }
  };
  recurse(recurse, 0, n, Complex(1.0, 0.0));
  terms = std::move(next);
}

}  // namespace

PureState apply_element(const PureState& state, const LinearElement& element) {
  if (!compatible(state.registry(), element.registry())) {
    throw std::invalid_argument(element.name() + ": state uses a different registry");
  }
  const auto& reg = *state.registry();
  const auto& in_modes = element.in_modes();
  const auto& out_modes = element.out_modes();
  const auto& m = element.matrix();

  std::vector<bool> is_input(reg.size(), false);
  for (std::size_t mode : in_modes) is_input[mode] = true;
  const bool rerouting = in_modes != out_modes;

  std::map<FockKet, Complex> result;
  for (const auto& [ket, amp] : state.amplitudes()) {
    if (rerouting) {
      // Creation-operator substitution is an isometry only onto initially
      // empty output modes.
      for (std::size_t mode : out_modes) {
        if (ket.occupation(mode) != 0) {
          throw std::invalid_argument(element.name() + ": output mode " +
                                      to_string(reg.label(mode)) +
                                      " is already occupied");
        }
      }
    }
    // Untouched modes pass through; input modes are re-expanded over outputs.
    std::vector<int> base(reg.size(), 0);
    for (std::size_t mode = 0; mode < reg.size(); ++mode) {
      if (!is_input[mode]) base[mode] = ket.occupation(mode);
    }

    std::vector<Expansion> terms{{base, amp}};
    for (std::size_t j = 0; j < in_modes.size(); ++j) {
      int n = ket.occupation(in_modes[j]);
      if (n == 0) continue;
      expand_input_mode(m, static_cast<int>(j), n, out_modes, terms);
    }

    for (const auto& term : terms) {
      // Number-state conversion: incoming 1/sqrt(n_j!) factors are folded into
      // the expansion; outgoing kets need sqrt(p!) per mode relative to the
      // occupation they started from outside the element.
      Complex coeff = term.coefficient;
      for (std::size_t mode : out_modes) {
        int before = is_input[mode] ? 0 : ket.occupation(mode);
        int after = term.occupations[mode];
        if (after != before) {
          coeff *= std::sqrt(factorial(after) / factorial(before));
        }
      }
      result[FockKet(term.occupations)] += coeff;
    }
  }
  return PureState(state.registry(), std::move(result), state.prune_tolerance());
}

}  // namespace distill
