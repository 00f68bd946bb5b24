// Copyright 2026 The qitesim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QITESIM_STATEVEC_HPP_
#define QITESIM_STATEVEC_HPP_

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qitesim/errors.hpp"
#include "qitesim/pauli.hpp"

namespace qitesim {

using cplx = std::complex<double>;

/// Translates a per-qubit mask (bit q = qubit q) into basis-index space,
/// where qubit 0 occupies the most significant of n bits.
inline std::uint64_t to_index_space(std::uint64_t per_qubit_mask, int n_qubits) {
  std::uint64_t m = 0;
  while (per_qubit_mask) {
    const int q = std::countr_zero(per_qubit_mask);
    per_qubit_mask &= per_qubit_mask - 1;
    m |= std::uint64_t{1} << (n_qubits - 1 - q);
  }
  return m;
}

/// Dense complex state vector over n qubits.
///
/// Basis index convention: qubit 0 occupies the *most significant* bit,
/// so the n-bit binary numeral of an index reads qubit 0 first, matching
/// the text convention used for Pauli strings and cut bitstrings.  The
/// helpers below translate per-qubit masks into this index space.
class StateVector {
 public:
  static constexpr int kMaxQubits = 22;

  /// Computational basis state |0...0>.
  explicit StateVector(int n_qubits)
      : n_(check_qubits(n_qubits)), amp_(std::size_t{1} << n_qubits, cplx{0.0, 0.0}) {
    amp_[0] = cplx{1.0, 0.0};
  }

  /// Equal superposition of all 2^n basis states with amplitude 2^{-n/2}.
  static StateVector uniform(int n_qubits) {
    StateVector s(n_qubits);
    const double a = std::pow(2.0, -0.5 * n_qubits);
    std::fill(s.amp_.begin(), s.amp_.end(), cplx{a, 0.0});
    return s;
  }

  int n_qubits() const { return n_; }
  std::uint64_t size() const { return amp_.size(); }
  std::span<const cplx> amplitudes() const { return amp_; }
  std::span<cplx> amplitudes() { return amp_; }
  const cplx& amp(std::uint64_t index) const { return amp_[index]; }
  cplx& amp(std::uint64_t index) { return amp_[index]; }

  /// Value of qubit q in basis index `index` (qubit 0 = leftmost).
  int bit_of(std::uint64_t index, int q) const {
    return static_cast<int>((index >> (n_ - 1 - q)) & 1u);
  }

  /// Translates a per-qubit mask (bit q = qubit q) into index space,
  /// where qubit 0 is the top bit.
  std::uint64_t index_mask(std::uint64_t per_qubit_mask) const {
    return to_index_space(per_qubit_mask, n_);
  }

  /// In-place application of a (phased) Pauli string.
  void apply(const PhasedPauli& p) {
    check_register(p.string);
    const std::uint64_t xm = index_mask(p.string.x_mask());
    const std::uint64_t zm = index_mask(p.string.z_mask());
    // i^{|x&z|} from the Hermitian normalization, plus the explicit phase.
    const cplx base =
        PhasedPauli{(p.phase_exponent + p.string.y_count()) & 3, p.string}.phase();
    const std::uint64_t dim = size();
    if (xm == 0) {
      for (std::uint64_t b = 0; b < dim; ++b) {
        const bool flip = std::popcount(b & zm) & 1;
        amp_[b] *= flip ? -base : base;
      }
      return;
    }
    for (std::uint64_t b = 0; b < dim; ++b) {
      const std::uint64_t partner = b ^ xm;
      if (partner < b) continue;
      const cplx lo = amp_[b], hi = amp_[partner];
      const bool flip_hi = std::popcount(b & zm) & 1;        // sign picked up by lo
      const bool flip_lo = std::popcount(partner & zm) & 1;  // sign picked up by hi
      amp_[partner] = (flip_hi ? -base : base) * lo;
      amp_[b] = (flip_lo ? -base : base) * hi;
    }
  }

  void apply(const PauliString& p) { apply(PhasedPauli{0, p}); }

  /// In-place exp(-i theta P) using the involution identity
  /// exp(-i theta P) = cos(theta) I - i sin(theta) P.
  void apply_rotation(const PauliString& p, double theta) {
    check_register(p);
    if (!std::isfinite(theta)) {
      throw NumericError("apply_rotation: non-finite angle");
    }
    const double c = std::cos(theta), s = std::sin(theta);
    // -i sin(theta) * i^{|x&z|}: for strings with an odd number of Y letters
    // this lands on the real axis, which keeps real states exactly real.
    const cplx f = cplx{0.0, -s} * PhasedPauli{p.y_count() & 3, p}.phase();
    const std::uint64_t xm = index_mask(p.x_mask());
    const std::uint64_t zm = index_mask(p.z_mask());
    const std::uint64_t dim = size();
    if (xm == 0) {
      for (std::uint64_t b = 0; b < dim; ++b) {
        const bool flip = std::popcount(b & zm) & 1;
        amp_[b] *= c + (flip ? -f : f);
      }
      return;
    }
    for (std::uint64_t b = 0; b < dim; ++b) {
      const std::uint64_t partner = b ^ xm;
      if (partner < b) continue;
      const cplx lo = amp_[b], hi = amp_[partner];
      const cplx f_lo = (std::popcount(partner & zm) & 1) ? -f : f;
      const cplx f_hi = (std::popcount(b & zm) & 1) ? -f : f;
      amp_[b] = c * lo + f_lo * hi;
      amp_[partner] = c * hi + f_hi * lo;
    }
  }

  /// <s| i^k P |s>.  Hermitian strings (k = 0) give a real result up to
  /// rounding; callers needing the real value may take std::real.
  cplx expectation(const PhasedPauli& p) const {
    check_register(p.string);
    const std::uint64_t xm = index_mask(p.string.x_mask());
    const std::uint64_t zm = index_mask(p.string.z_mask());
    const cplx base =
        PhasedPauli{(p.phase_exponent + p.string.y_count()) & 3, p.string}.phase();
    const std::uint64_t dim = size();
    cplx acc{0.0, 0.0};
    for (std::uint64_t b = 0; b < dim; ++b) {
      const bool flip = std::popcount((b ^ xm) & zm) & 1;
      const cplx term = std::conj(amp_[b]) * amp_[b ^ xm];
      acc += flip ? -term : term;
    }
    return base * acc;
  }

  cplx expectation(const PauliString& p) const { return expectation(PhasedPauli{0, p}); }

  /// Imaginary-time propagation exp(-tau H) for a *diagonal* Hamiltonian
  /// given by its per-basis-state energies, followed by renormalization.
  /// The minimum energy is subtracted inside the exponent so the scale
  /// factors never overflow; if every retained amplitude still underflows
  /// to zero the state is unrecoverable and an UnderflowError is raised.
  void evolve_exact(std::span<const double> energies, double tau) {
    if (energies.size() != size()) {
      throw ConfigError("evolve_exact: energy table size does not match state");
    }
    if (!(tau >= 0.0) || !std::isfinite(tau)) {
      throw ConfigError("evolve_exact: tau must be finite and non-negative");
    }
    double e_min = energies[0];
    for (const double e : energies) e_min = std::min(e_min, e);
    for (std::uint64_t b = 0; b < size(); ++b) {
      amp_[b] *= std::exp(-tau * (energies[b] - e_min));
    }
    normalize();
  }

  /// <H> for a diagonal Hamiltonian given by its energy table.
  double diagonal_energy(std::span<const double> energies) const {
    if (energies.size() != size()) {
      throw ConfigError("diagonal_energy: energy table size does not match state");
    }
    double acc = 0.0;
    for (std::uint64_t b = 0; b < size(); ++b) {
      acc += std::norm(amp_[b]) * energies[b];
    }
    return acc;
  }

  /// Single-qubit gate, row-major 2x2 matrix, acting on qubit q.
  void apply_1q(int q, const std::array<cplx, 4>& u) {
    check_qubit_index(q);
    const std::uint64_t qb = std::uint64_t{1} << (n_ - 1 - q);
    const std::uint64_t dim = size();
    for (std::uint64_t b = 0; b < dim; ++b) {
      if (b & qb) continue;
      const cplx a0 = amp_[b], a1 = amp_[b | qb];
      amp_[b] = u[0] * a0 + u[1] * a1;
      amp_[b | qb] = u[2] * a0 + u[3] * a1;
    }
  }

  void apply_cnot(int control, int target) {
    check_qubit_index(control);
    check_qubit_index(target);
    if (control == target) throw ConfigError("apply_cnot: control equals target");
    const std::uint64_t cb = std::uint64_t{1} << (n_ - 1 - control);
    const std::uint64_t tb = std::uint64_t{1} << (n_ - 1 - target);
    const std::uint64_t dim = size();
    for (std::uint64_t b = 0; b < dim; ++b) {
      if ((b & cb) && !(b & tb)) std::swap(amp_[b], amp_[b | tb]);
    }
  }

  double norm() const {
    double acc = 0.0;
    for (const cplx& a : amp_) acc += std::norm(a);
    return std::sqrt(acc);
  }

  void normalize() {
    const double nrm = norm();
    if (nrm == 0.0) {
      throw UnderflowError(
          "normalize: all amplitudes underflowed to zero; for imaginary-time "
          "propagation reduce tau or supply a state overlapping the low-energy "
          "sector");
    }
    if (!std::isfinite(nrm)) {
      throw NumericError("normalize: non-finite norm");
    }
    const double inv = 1.0 / nrm;
    for (cplx& a : amp_) a *= inv;
  }

  /// Exact scan: every imaginary part is bit-zero.  The rotation kernel
  /// preserves this for strings with an odd Y count, which is what the
  /// solver's real fast path relies on.
  bool is_real() const {
    for (const cplx& a : amp_) {
      if (a.imag() != 0.0) return false;
    }
    return true;
  }

  /// Exact scan: amp[b] == amp[~b] (global bit-flip symmetry).
  bool is_flip_symmetric() const {
    const std::uint64_t top = size() - 1;
    for (std::uint64_t b = 0; b < size() / 2; ++b) {
      if (amp_[b] != amp_[top ^ b]) return false;
    }
    return true;
  }

  /// |<this|other>|^2.
  double fidelity(const StateVector& other) const {
    if (other.n_ != n_) throw ConfigError("fidelity: qubit counts differ");
    cplx acc{0.0, 0.0};
    for (std::uint64_t b = 0; b < size(); ++b) {
      acc += std::conj(amp_[b]) * other.amp_[b];
    }
    return std::norm(acc);
  }

  /// CSV dump "index,real,imag", one basis state per row.
  void dump_csv(std::ostream& os) const {
    os << "index,real,imag\n";
    char buf[80];
    for (std::uint64_t b = 0; b < size(); ++b) {
      std::snprintf(buf, sizeof buf, "%llu,%.12g,%.12g\n",
                    static_cast<unsigned long long>(b), amp_[b].real(),
                    amp_[b].imag());
      os << buf;
    }
  }

 private:
  static int check_qubits(int n) {
    if (n < 1) throw ConfigError("StateVector: need at least one qubit");
    if (n > kMaxQubits) {
      throw CapacityError("StateVector: " + std::to_string(n) +
                          " qubits exceeds the dense-simulation cap of " +
                          std::to_string(kMaxQubits));
    }
    return n;
  }

  void check_qubit_index(int q) const {
    if (q < 0 || q >= n_) throw ConfigError("qubit index out of range");
  }

  void check_register(const PauliString& p) const {
    if (p.n_qubits() != n_) {
      throw ConfigError("Pauli string is on " + std::to_string(p.n_qubits()) +
                        " qubits but the state has " + std::to_string(n_));
    }
  }

  int n_;
  std::vector<cplx> amp_;
};

}  // namespace qitesim

#endif  // QITESIM_STATEVEC_HPP_
