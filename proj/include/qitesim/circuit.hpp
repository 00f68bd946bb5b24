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

#ifndef QITESIM_CIRCUIT_HPP_
#define QITESIM_CIRCUIT_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "qitesim/errors.hpp"
#include "qitesim/hamiltonian.hpp"
#include "qitesim/pauli.hpp"
#include "qitesim/pools.hpp"
#include "qitesim/statevec.hpp"

namespace qitesim {

/// Gate alphabet of the compiled rotation circuits.  The two fixed-angle
/// X rotations are distinct kinds; only RZ carries a free angle.
enum class GateKind { kH, kRxPlus, kRxMinus, kRz, kCnot };

struct Gate {
  GateKind kind;
  int q0;
  int q1 = -1;        // CNOT target, unused otherwise
  double angle = 0.0;  // RZ only

  static Gate h(int q) { return Gate{GateKind::kH, q}; }
  static Gate rx_plus(int q) { return Gate{GateKind::kRxPlus, q}; }
  static Gate rx_minus(int q) { return Gate{GateKind::kRxMinus, q}; }
  static Gate rz(int q, double angle) { return Gate{GateKind::kRz, q, -1, angle}; }
  static Gate cnot(int control, int target) {
    return Gate{GateKind::kCnot, control, target};
  }

  bool two_qubit() const { return kind == GateKind::kCnot; }
};

inline const char* gate_kind_name(GateKind k) {
  switch (k) {
    case GateKind::kH:
      return "H";
    case GateKind::kRxPlus:
      return "RX+";
    case GateKind::kRxMinus:
      return "RX-";
    case GateKind::kRz:
      return "RZ";
    case GateKind::kCnot:
      return "CNOT";
  }
  return "?";
}

/// Flat gate list on a fixed register.
class Circuit {
 public:
  explicit Circuit(int n_qubits) : n_(n_qubits) {
    if (n_qubits < 1) throw ConfigError("Circuit: need at least one qubit");
  }

  int n_qubits() const { return n_; }
  const std::vector<Gate>& gates() const { return gates_; }
  std::uint64_t gate_count() const { return gates_.size(); }

  void append(const Gate& g) {
    check_qubit(g.q0);
    if (g.two_qubit()) {
      check_qubit(g.q1);
      if (g.q0 == g.q1) throw ConfigError("Circuit: CNOT control equals target");
    }
    gates_.push_back(g);
  }

  void append(const Circuit& other) {
    if (other.n_ != n_) throw ConfigError("Circuit: register size mismatch");
    gates_.insert(gates_.end(), other.gates_.begin(), other.gates_.end());
  }

  /// Greedy as-soon-as-possible layering: each gate lands one layer after
  /// the deepest layer currently touching its qubits.
  int depth() const {
    std::vector<int> frontier(static_cast<std::size_t>(n_), 0);
    int depth = 0;
    for (const Gate& g : gates_) {
      int d = frontier[static_cast<std::size_t>(g.q0)];
      if (g.two_qubit()) d = std::max(d, frontier[static_cast<std::size_t>(g.q1)]);
      ++d;
      frontier[static_cast<std::size_t>(g.q0)] = d;
      if (g.two_qubit()) frontier[static_cast<std::size_t>(g.q1)] = d;
      depth = std::max(depth, d);
    }
    return depth;
  }

  /// Applies the gate list to a state vector, first gate first.
  void run_on(StateVector& s) const {
    if (s.n_qubits() != n_) throw ConfigError("Circuit::run_on: register mismatch");
    using namespace std::complex_literals;
    constexpr double inv_sqrt2 = 0.70710678118654752440;
    static const std::array<cplx, 4> kH = {inv_sqrt2, inv_sqrt2, inv_sqrt2,
                                           -inv_sqrt2};
    static const std::array<cplx, 4> kRxP = {inv_sqrt2, -1i * inv_sqrt2,
                                             -1i * inv_sqrt2, inv_sqrt2};
    static const std::array<cplx, 4> kRxM = {inv_sqrt2, 1i * inv_sqrt2,
                                             1i * inv_sqrt2, inv_sqrt2};
    for (const Gate& g : gates_) {
      switch (g.kind) {
        case GateKind::kH:
          s.apply_1q(g.q0, kH);
          break;
        case GateKind::kRxPlus:
          s.apply_1q(g.q0, kRxP);
          break;
        case GateKind::kRxMinus:
          s.apply_1q(g.q0, kRxM);
          break;
        case GateKind::kRz: {
          const cplx e = std::exp(cplx{0.0, -0.5 * g.angle});
          s.apply_1q(g.q0, {e, 0.0, 0.0, std::conj(e)});
          break;
        }
        case GateKind::kCnot:
          s.apply_cnot(g.q0, g.q1);
          break;
      }
    }
  }

  /// One gate per line: "KIND q0 [q1] [angle]".
  void dump(std::ostream& os) const {
    char buf[64];
    for (const Gate& g : gates_) {
      os << gate_kind_name(g.kind) << ' ' << g.q0;
      if (g.two_qubit()) os << ' ' << g.q1;
      if (g.kind == GateKind::kRz) {
        std::snprintf(buf, sizeof buf, " %.12g", g.angle);
        os << buf;
      }
      os << '\n';
    }
  }

 private:
  void check_qubit(int q) const {
    if (q < 0 || q >= n_) throw ConfigError("Circuit: qubit index out of range");
  }

  int n_;
  std::vector<Gate> gates_;
};

/// Compiles exp(-i theta P) exactly (including phase) into
/// basis changes + CNOT parity ladder + RZ(2 theta) + unconjugation:
/// X-qubits are rotated by H, Y-qubits by RX(+pi/2) on entry and
/// RX(-pi/2) on exit, parity is accumulated onto the last support qubit.
inline Circuit compile_rotation(const PauliString& p, double theta) {
  if (p.is_identity()) {
    throw ConfigError("compile_rotation: identity strings have no circuit");
  }
  if (!std::isfinite(theta)) {
    throw NumericError("compile_rotation: non-finite angle");
  }
  Circuit c(p.n_qubits());
  const std::vector<int> supp = p.support();
  for (const int q : supp) {
    if (p.letter(q) == 'X') c.append(Gate::h(q));
    if (p.letter(q) == 'Y') c.append(Gate::rx_plus(q));
  }
  for (std::size_t i = 0; i + 1 < supp.size(); ++i) {
    c.append(Gate::cnot(supp[i], supp[i + 1]));
  }
  c.append(Gate::rz(supp.back(), 2.0 * theta));
  for (std::size_t i = supp.size() - 1; i-- > 0;) {
    c.append(Gate::cnot(supp[i], supp[i + 1]));
  }
  for (const int q : supp) {
    if (p.letter(q) == 'X') c.append(Gate::h(q));
    if (p.letter(q) == 'Y') c.append(Gate::rx_minus(q));
  }
  return c;
}

/// Nominal circuit for one imaginary-time step and its compiled cost.
///
/// Local flavors sweep every term's pool once, so the step concatenates
/// N_ham per-term pool passes.  Nonlocal flavors count a single pass of
/// the shared pool per step, which is the accounting behind the
/// closed-form scalings reported alongside.
struct StepResources {
  int n_bit;
  std::string method;
  double domain;  // 2.5 for the mixed flavor
  std::uint64_t n_operators;
  std::uint64_t gate_count;
  int depth;
  double system_size_bound;        // closed-form linear-system scaling
  double gate_ops_per_qubit_bound; // closed-form per-qubit operator scaling
};

inline StepResources step_resources(const Hamiltonian& h, const DomainSpec& spec,
                                    const PoolSet& pools) {
  Circuit step(h.n_qubits());
  std::uint64_t n_ops = 0;
  const int passes = pools.shared() ? 1 : h.n_terms();
  for (int m = 0; m < passes; ++m) {
    const Pool& pool = pools.for_term(m);
    for (const PauliString& s : pool) {
      step.append(compile_rotation(s, 1.0));  // placeholder angle; costs are angle-free
      ++n_ops;
    }
  }
  DomainSpec scale_spec = spec;
  if (spec.method == Method::kLA && !scale_spec.domain_size) {
    int d = 0;  // scalings use the largest forced per-term domain
    for (int m = 0; m < h.n_terms(); ++m) {
      d = std::max(d, effective_domain(spec, h, m));
    }
    scale_spec.domain_size = d;
  }
  const ScalingEstimate est = pool_size_scaling(scale_spec, h.n_qubits(), h.n_terms());
  double domain = 0.0;
  if (spec.method == Method::kNLA25) {
    domain = 2.5;
  } else if (scale_spec.domain_size) {
    domain = *scale_spec.domain_size;
  }
  return StepResources{h.n_qubits(),       scale_spec.label(),    domain,
                       n_ops,              step.gate_count(),     step.depth(),
                       est.linear_system_size, est.gate_ops_per_qubit};
}

}  // namespace qitesim

#endif  // QITESIM_CIRCUIT_HPP_
