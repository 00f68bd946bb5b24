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

#ifndef QITESIM_NOISE_HPP_
#define QITESIM_NOISE_HPP_

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "qitesim/circuit.hpp"
#include "qitesim/errors.hpp"
#include "qitesim/hamiltonian.hpp"
#include "qitesim/statevec.hpp"

namespace qitesim {

/// Hardware error model: per-qubit thermal relaxation applied for the
/// duration of every gate a qubit participates in, plus a classical
/// readout confusion matrix.  Qubits idle between their gates do not
/// decay; the model charges time only where gates act.
///
/// Times are split by magnitude: relaxation times in microseconds, gate
/// durations in nanoseconds.
struct NoiseModel {
  double t1_us = 100.0;   // amplitude-damping time constant
  double t2_us = 80.0;    // total dephasing time constant (T2 <= 2 T1)
  double tg1_ns = 20.0;   // single-qubit gate duration
  double tg2_ns = 100.0;  // two-qubit gate duration
  // Readout confusion, rows indexed by the true bit: p[true][reported].
  double p00 = 0.995;
  double p01 = 0.005;
  double p10 = 0.02;
  double p11 = 0.98;

  void validate() const {
    if (!(t1_us > 0.0) || !(t2_us > 0.0)) {
      throw ConfigError("NoiseModel: relaxation times must be positive");
    }
    if (t2_us > 2.0 * t1_us) {
      throw ConfigError("NoiseModel: T2 must not exceed 2 T1");
    }
    if (!(tg1_ns >= 0.0) || !(tg2_ns >= 0.0) || !std::isfinite(tg1_ns) ||
        !std::isfinite(tg2_ns)) {
      throw ConfigError("NoiseModel: gate durations must be finite and non-negative");
    }
    for (const double p : {p00, p01, p10, p11}) {
      if (!(p >= 0.0 && p <= 1.0)) {
        throw ConfigError("NoiseModel: confusion entries must lie in [0, 1]");
      }
    }
    if (std::abs(p00 + p01 - 1.0) > 1e-12 || std::abs(p10 + p11 - 1.0) > 1e-12) {
      throw ConfigError("NoiseModel: confusion rows must sum to one");
    }
  }

  /// Identity channel: relaxation times far beyond any circuit duration
  /// and a perfect readout.  Replaying through this model reproduces the
  /// ideal simulation.
  static NoiseModel noiseless() {
    NoiseModel nm;
    nm.t1_us = 1e30;
    nm.t2_us = 1e30;
    nm.p00 = 1.0;
    nm.p01 = 0.0;
    nm.p10 = 0.0;
    nm.p11 = 1.0;
    return nm;
  }
};

/// Kraus factors (row-major 2x2) of the amplitude-damping channel toward
/// |0> with decay probability `gamma`.
inline std::vector<std::array<cplx, 4>> amplitude_damping_kraus(double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw ConfigError("amplitude damping: gamma must lie in [0, 1]");
  }
  const cplx zero{0.0, 0.0};
  const cplx keep{std::sqrt(1.0 - gamma), 0.0};
  const cplx decay{std::sqrt(gamma), 0.0};
  return {{cplx{1.0, 0.0}, zero, zero, keep}, {zero, decay, zero, zero}};
}

/// Kraus factors of the phase-flip channel with flip probability `p`.
inline std::vector<std::array<cplx, 4>> phase_flip_kraus(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ConfigError("phase flip: probability must lie in [0, 1]");
  }
  const cplx zero{0.0, 0.0};
  const cplx a{std::sqrt(1.0 - p), 0.0};
  const cplx b{std::sqrt(p), 0.0};
  return {{a, zero, zero, a}, {b, zero, zero, -b}};
}

/// Decay probability after `duration_ns` of T1 relaxation.
inline double thermal_gamma(double duration_ns, const NoiseModel& nm) {
  return 1.0 - std::exp(-duration_ns * 1e-3 / nm.t1_us);
}

/// Phase-flip probability supplying the dephasing beyond what amplitude
/// damping already causes, so total coherence decay matches exp(-t/T2).
inline double thermal_p_flip(double duration_ns, const NoiseModel& nm) {
  const double t_us = duration_ns * 1e-3;
  const double mu = std::exp(-t_us * (1.0 / nm.t2_us - 0.5 / nm.t1_us));
  return 0.5 * (1.0 - mu);
}

/// Dense density matrix for small registers.  The basis-index convention
/// matches StateVector: qubit 0 is the most significant index bit.
class DensityMatrix {
 public:
  static constexpr int kMaxQubits = 6;

  explicit DensityMatrix(int n_qubits)
      : n_(check_qubits(n_qubits)),
        dim_(std::uint64_t{1} << n_qubits),
        rho_(dim_ * dim_, cplx{0.0, 0.0}) {
    at(0, 0) = cplx{1.0, 0.0};
  }

  static DensityMatrix from_state(const StateVector& s) {
    DensityMatrix d(s.n_qubits());
    for (std::uint64_t r = 0; r < d.dim_; ++r) {
      for (std::uint64_t c = 0; c < d.dim_; ++c) {
        d.at(r, c) = s.amp(r) * std::conj(s.amp(c));
      }
    }
    return d;
  }

  static DensityMatrix uniform(int n_qubits) {
    return from_state(StateVector::uniform(n_qubits));
  }

  int n_qubits() const { return n_; }
  std::uint64_t dim() const { return dim_; }
  const cplx& at(std::uint64_t row, std::uint64_t col) const {
    return rho_[row * dim_ + col];
  }
  cplx& at(std::uint64_t row, std::uint64_t col) { return rho_[row * dim_ + col]; }

  double trace() const {
    double t = 0.0;
    for (std::uint64_t i = 0; i < dim_; ++i) t += at(i, i).real();
    return t;
  }

  /// tr(rho^2); 1 for pure states, 1/2^n for the maximally mixed state.
  double purity() const {
    double p = 0.0;
    for (std::uint64_t r = 0; r < dim_; ++r) {
      for (std::uint64_t c = 0; c < dim_; ++c) {
        p += std::norm(at(r, c));
      }
    }
    return p;
  }

  std::vector<double> diagonal_probabilities() const {
    std::vector<double> p(dim_);
    for (std::uint64_t i = 0; i < dim_; ++i) p[i] = at(i, i).real();
    return p;
  }

  /// rho -> sum_k K_k rho K_k^dagger for 2x2 Kraus operators on qubit q
  /// (row-major 2x2 blocks).
  void apply_kraus_1q(int q, const std::vector<std::array<cplx, 4>>& kraus) {
    check_qubit(q);
    const std::uint64_t qb = std::uint64_t{1} << (n_ - 1 - q);
    std::vector<cplx> out(rho_.size(), cplx{0.0, 0.0});
    std::vector<cplx> tmp(rho_.size());
    for (const auto& k : kraus) {
      // tmp = K rho (acts on row pairs), then out += tmp K^dagger.
      for (std::uint64_t r = 0; r < dim_; ++r) {
        if (r & qb) continue;
        for (std::uint64_t c = 0; c < dim_; ++c) {
          const cplx a0 = at(r, c), a1 = at(r | qb, c);
          tmp[r * dim_ + c] = k[0] * a0 + k[1] * a1;
          tmp[(r | qb) * dim_ + c] = k[2] * a0 + k[3] * a1;
        }
      }
      for (std::uint64_t r = 0; r < dim_; ++r) {
        for (std::uint64_t c = 0; c < dim_; ++c) {
          if (c & qb) continue;
          const cplx a0 = tmp[r * dim_ + c], a1 = tmp[r * dim_ + (c | qb)];
          out[r * dim_ + c] += a0 * std::conj(k[0]) + a1 * std::conj(k[1]);
          out[r * dim_ + (c | qb)] += a0 * std::conj(k[2]) + a1 * std::conj(k[3]);
        }
      }
    }
    rho_.swap(out);
  }

  void apply_unitary_1q(int q, const std::array<cplx, 4>& u) {
    apply_kraus_1q(q, {u});
  }

  void apply_cnot(int control, int target) {
    check_qubit(control);
    check_qubit(target);
    if (control == target) throw ConfigError("DensityMatrix: CNOT control equals target");
    const std::uint64_t cb = std::uint64_t{1} << (n_ - 1 - control);
    const std::uint64_t tb = std::uint64_t{1} << (n_ - 1 - target);
    // Basis permutation: conjugation swaps rows then columns.
    for (std::uint64_t r = 0; r < dim_; ++r) {
      if ((r & cb) && !(r & tb)) {
        for (std::uint64_t c = 0; c < dim_; ++c) std::swap(at(r, c), at(r | tb, c));
      }
    }
    for (std::uint64_t c = 0; c < dim_; ++c) {
      if ((c & cb) && !(c & tb)) {
        for (std::uint64_t r = 0; r < dim_; ++r) std::swap(at(r, c), at(r, c | tb));
      }
    }
  }

  void apply_rz(int q, double angle) {
    check_qubit(q);
    const std::uint64_t qb = std::uint64_t{1} << (n_ - 1 - q);
    const cplx d0 = std::exp(cplx{0.0, -0.5 * angle});
    const cplx d1 = std::exp(cplx{0.0, 0.5 * angle});
    for (std::uint64_t r = 0; r < dim_; ++r) {
      const cplx dr = (r & qb) ? d1 : d0;
      for (std::uint64_t c = 0; c < dim_; ++c) {
        at(r, c) *= dr * std::conj((c & qb) ? d1 : d0);
      }
    }
  }

  /// Thermal relaxation on one qubit for `duration_ns`: amplitude damping
  /// toward |0> with gamma = 1 - exp(-t/T1), then the extra pure
  /// dephasing needed to bring the total coherence decay to exp(-t/T2).
  void apply_thermal(int q, double duration_ns, const NoiseModel& nm) {
    if (duration_ns == 0.0) return;
    const double gamma = thermal_gamma(duration_ns, nm);
    const double p_flip = thermal_p_flip(duration_ns, nm);
    if (gamma > 0.0) apply_kraus_1q(q, amplitude_damping_kraus(gamma));
    if (p_flip > 0.0) apply_kraus_1q(q, phase_flip_kraus(p_flip));
  }

  /// Applies one gate ideally, then charges its duration as thermal
  /// relaxation on every qubit it touches.
  void apply_gate_noisy(const Gate& g, const NoiseModel& nm) {
    constexpr double inv_sqrt2 = 0.70710678118654752440;
    const cplx h00{inv_sqrt2, 0.0};
    const cplx mi{0.0, -inv_sqrt2};
    const cplx pi_{0.0, inv_sqrt2};
    switch (g.kind) {
      case GateKind::kH:
        apply_unitary_1q(g.q0, {h00, h00, h00, -h00});
        apply_thermal(g.q0, nm.tg1_ns, nm);
        break;
      case GateKind::kRxPlus:
        apply_unitary_1q(g.q0, {h00, mi, mi, h00});
        apply_thermal(g.q0, nm.tg1_ns, nm);
        break;
      case GateKind::kRxMinus:
        apply_unitary_1q(g.q0, {h00, pi_, pi_, h00});
        apply_thermal(g.q0, nm.tg1_ns, nm);
        break;
      case GateKind::kRz:
        apply_rz(g.q0, g.angle);
        apply_thermal(g.q0, nm.tg1_ns, nm);
        break;
      case GateKind::kCnot:
        apply_cnot(g.q0, g.q1);
        apply_thermal(g.q0, nm.tg2_ns, nm);
        apply_thermal(g.q1, nm.tg2_ns, nm);
        break;
    }
  }

  void run_noisy(const Circuit& c, const NoiseModel& nm) {
    if (c.n_qubits() != n_) {
      throw ConfigError("DensityMatrix::run_noisy: register mismatch");
    }
    for (const Gate& g : c.gates()) apply_gate_noisy(g, nm);
  }

 private:
  static int check_qubits(int n) {
    if (n < 1) throw ConfigError("DensityMatrix: need at least one qubit");
    if (n > kMaxQubits) {
      throw CapacityError("DensityMatrix: " + std::to_string(n) +
                          " qubits exceeds the density-matrix cap of " +
                          std::to_string(kMaxQubits));
    }
    return n;
  }

  void check_qubit(int q) const {
    if (q < 0 || q >= n_) throw ConfigError("DensityMatrix: qubit index out of range");
  }

  int n_;
  std::uint64_t dim_;
  std::vector<cplx> rho_;  // row-major dim x dim
};

/// Pushes a basis-state probability vector through the per-qubit readout
/// confusion: reported(j) = sum_i p(report j | true i) true(i).
inline std::vector<double> apply_readout_confusion(std::vector<double> probs, int n_qubits,
                                                   const NoiseModel& nm) {
  const std::uint64_t dim = std::uint64_t{1} << n_qubits;
  if (probs.size() != dim) {
    throw ConfigError("apply_readout_confusion: probability table size mismatch");
  }
  for (int q = 0; q < n_qubits; ++q) {
    const std::uint64_t qb = std::uint64_t{1} << (n_qubits - 1 - q);
    for (std::uint64_t i = 0; i < dim; ++i) {
      if (i & qb) continue;
      const double a0 = probs[i], a1 = probs[i | qb];
      probs[i] = nm.p00 * a0 + nm.p10 * a1;
      probs[i | qb] = nm.p01 * a0 + nm.p11 * a1;
    }
  }
  return probs;
}

/// Energy estimate a Z-basis readout would report: diagonal probabilities
/// through the confusion matrix, contracted with the diagonal energies.
inline double measured_energy(const DensityMatrix& rho, const Hamiltonian& h,
                              const NoiseModel& nm) {
  if (rho.n_qubits() != h.n_qubits()) {
    throw ConfigError("measured_energy: register mismatch");
  }
  const std::vector<double> probs =
      apply_readout_confusion(rho.diagonal_probabilities(), rho.n_qubits(), nm);
  double e = 0.0;
  for (std::uint64_t x = 0; x < rho.dim(); ++x) {
    e += probs[x] * h.energy_of_basis_state(x);
  }
  return e;
}

/// Cumulative state of a replay after each circuit prefix.
struct ReplayPoint {
  int circuits_applied;
  int gates;        // cumulative gate count
  int depth;        // cumulative depth (circuits execute back to back)
  double energy_ideal;
  double energy_noisy;
  double purity;
};

struct ReplayResult {
  std::vector<ReplayPoint> points;  // entry 0 is the prepared initial state

  const ReplayPoint& final_point() const { return points.back(); }
};

/// Replays compiled circuits from the equal-superposition start through
/// both the exact simulator and the noisy density-matrix simulator,
/// recording energies after every circuit.  The ideal track measures
/// perfectly; the noisy track measures through the confusion matrix.
inline ReplayResult replay(const std::vector<Circuit>& circuits, const Hamiltonian& h,
                           const NoiseModel& nm) {
  nm.validate();
  const int n = h.n_qubits();
  for (const Circuit& c : circuits) {
    if (c.n_qubits() != n) throw ConfigError("replay: circuit register mismatch");
  }
  StateVector ideal = StateVector::uniform(n);
  DensityMatrix noisy = DensityMatrix::uniform(n);

  std::vector<double> energies(std::uint64_t{1} << n);
  for (std::uint64_t x = 0; x < energies.size(); ++x) {
    energies[x] = h.energy_of_basis_state(x);
  }

  ReplayResult out;
  int gates = 0, depth = 0;
  auto record = [&](int applied) {
    ReplayPoint p{};
    p.circuits_applied = applied;
    p.gates = gates;
    p.depth = depth;
    p.energy_ideal = ideal.diagonal_energy(energies);
    p.energy_noisy = measured_energy(noisy, h, nm);
    p.purity = noisy.purity();
    out.points.push_back(p);
  };
  record(0);
  for (std::size_t i = 0; i < circuits.size(); ++i) {
    circuits[i].run_on(ideal);
    noisy.run_noisy(circuits[i], nm);
    gates += static_cast<int>(circuits[i].gates().size());
    depth += circuits[i].depth();
    record(static_cast<int>(i) + 1);
  }
  return out;
}

}  // namespace qitesim

#endif  // QITESIM_NOISE_HPP_
