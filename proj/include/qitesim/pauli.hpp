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

#ifndef QITESIM_PAULI_HPP_
#define QITESIM_PAULI_HPP_

#include <bit>
#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "qitesim/errors.hpp"

namespace qitesim {

/// A tensor product of single-qubit Pauli factors, stored as two bitmasks.
///
/// Bit q of x_mask records an X factor on qubit q, bit q of z_mask a Z
/// factor; a qubit with both bits set carries Y.  Internally a string is
/// the operator i^{|x & z|} X^x Z^z, which makes every string Hermitian
/// and squares to the identity.
///
/// Qubit 0 is the *leftmost* letter of the text form: parse("XIZY") puts
/// X on qubit 0 and Y on qubit 3.
class PauliString {
 public:
  static constexpr int kMaxQubits = 64;

  /// Identity on n qubits.
  explicit PauliString(int n_qubits) : PauliString(n_qubits, 0u, 0u) {}

  PauliString(int n_qubits, std::uint64_t x_mask, std::uint64_t z_mask)
      : n_(n_qubits), x_(x_mask), z_(z_mask) {
    if (n_qubits < 1 || n_qubits > kMaxQubits) {
      throw ConfigError("PauliString: qubit count must be in [1, 64], got " +
                        std::to_string(n_qubits));
    }
    const std::uint64_t valid = qubit_mask(n_qubits);
    if ((x_ | z_) & ~valid) {
      throw ConfigError("PauliString: mask bit outside the qubit range");
    }
  }

  /// Builds a string from its letter sequence, e.g. "XIZY".
  static PauliString parse(std::string_view text) {
    const int n = static_cast<int>(text.size());
    if (n < 1 || n > kMaxQubits) {
      throw ConfigError("PauliString::parse: length must be in [1, 64]");
    }
    std::uint64_t x = 0, z = 0;
    for (int q = 0; q < n; ++q) {
      switch (text[q]) {
        case 'I':
          break;
        case 'X':
          x |= bit(q);
          break;
        case 'Y':
          x |= bit(q);
          z |= bit(q);
          break;
        case 'Z':
          z |= bit(q);
          break;
        default:
          throw ConfigError(std::string("PauliString::parse: invalid letter '") +
                            text[q] + "' (expected I, X, Y or Z)");
      }
    }
    return PauliString(n, x, z);
  }

  /// A single non-identity letter on one qubit, identity elsewhere.
  static PauliString single(int n_qubits, int qubit, char letter) {
    if (qubit < 0 || qubit >= n_qubits) {
      throw ConfigError("PauliString::single: qubit index out of range");
    }
    std::string text(static_cast<std::size_t>(n_qubits), 'I');
    text[static_cast<std::size_t>(qubit)] = letter;
    return parse(text);
  }

  int n_qubits() const { return n_; }
  std::uint64_t x_mask() const { return x_; }
  std::uint64_t z_mask() const { return z_; }

  bool is_identity() const { return (x_ | z_) == 0; }

  /// Number of non-identity letters.
  int weight() const { return std::popcount(x_ | z_); }

  /// Number of Y letters.
  int y_count() const { return std::popcount(x_ & z_); }

  char letter(int q) const {
    const bool x = x_ & bit(q), z = z_ & bit(q);
    return x ? (z ? 'Y' : 'X') : (z ? 'Z' : 'I');
  }

  /// Sorted list of qubits carrying a non-identity letter.
  std::vector<int> support() const {
    std::vector<int> qs;
    std::uint64_t m = x_ | z_;
    while (m) {
      qs.push_back(std::countr_zero(m));
      m &= m - 1;
    }
    return qs;
  }

  std::string str() const {
    std::string out(static_cast<std::size_t>(n_), 'I');
    for (int q = 0; q < n_; ++q) out[static_cast<std::size_t>(q)] = letter(q);
    return out;
  }

  friend bool operator==(const PauliString& a, const PauliString& b) {
    return a.n_ == b.n_ && a.x_ == b.x_ && a.z_ == b.z_;
  }

  /// Canonical total order: lexicographic on (x_mask, z_mask).  Pool
  /// containers rely on this being a strict weak ordering.
  friend bool operator<(const PauliString& a, const PauliString& b) {
    return std::tie(a.n_, a.x_, a.z_) < std::tie(b.n_, b.x_, b.z_);
  }

  static std::uint64_t bit(int q) { return std::uint64_t{1} << q; }

  static std::uint64_t qubit_mask(int n) {
    return n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
  }

 private:
  int n_;
  std::uint64_t x_;
  std::uint64_t z_;
};

/// A Pauli string together with a phase from {+1, +i, -1, -i}, stored as
/// the exponent k of i^k.  Products of Hermitian strings land in exactly
/// this set, so no wider coefficient type is needed.
struct PhasedPauli {
  int phase_exponent;  // 0..3, meaning i^phase_exponent
  PauliString string;

  std::complex<double> phase() const {
    static constexpr std::complex<double> table[4] = {
        {1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};
    return table[phase_exponent & 3];
  }
};

/// Product of two Pauli strings on the same register.
///
/// With each string given by i^{|x&z|} X^x Z^z, commuting the inner Z^z1
/// past X^x2 gives the power-of-i bookkeeping below; the resulting letter
/// masks are plain XORs.  All counts enter mod 4.
inline PhasedPauli multiply(const PauliString& lhs, const PauliString& rhs) {
  if (lhs.n_qubits() != rhs.n_qubits()) {
    throw ConfigError("multiply: qubit counts differ (" +
                      std::to_string(lhs.n_qubits()) + " vs " +
                      std::to_string(rhs.n_qubits()) + ")");
  }
  const std::uint64_t x = lhs.x_mask() ^ rhs.x_mask();
  const std::uint64_t z = lhs.z_mask() ^ rhs.z_mask();
  const int g = std::popcount(lhs.x_mask() & lhs.z_mask()) +
                std::popcount(rhs.x_mask() & rhs.z_mask()) -
                std::popcount(x & z) +
                2 * std::popcount(lhs.z_mask() & rhs.x_mask());
  return PhasedPauli{((g % 4) + 4) % 4, PauliString(lhs.n_qubits(), x, z)};
}

/// True when the two strings commute; Pauli strings either commute or
/// anticommute, decided by the parity of overlapping anticommuting letters.
inline bool commutes(const PauliString& a, const PauliString& b) {
  const int clashes = std::popcount(a.x_mask() & b.z_mask()) +
                      std::popcount(a.z_mask() & b.x_mask());
  return (clashes & 1) == 0;
}

}  // namespace qitesim

#endif  // QITESIM_PAULI_HPP_
