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

#ifndef QITESIM_QITE_HPP_
#define QITESIM_QITE_HPP_

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "qitesim/circuit.hpp"
#include "qitesim/errors.hpp"
#include "qitesim/hamiltonian.hpp"
#include "qitesim/pauli.hpp"
#include "qitesim/pools.hpp"
#include "qitesim/statevec.hpp"

namespace qitesim {

// ---------------------------------------------------------------------------
// Contract-level operations
// ---------------------------------------------------------------------------

/// Normal-equation data for one term: the real part of the pool Gram
/// matrix, the right-hand side, and the squared norm of the imaginary-time
/// step target (a diagnostic for the residual).
struct AssembledSystem {
  Eigen::MatrixXd s_re;  // S[I][J] = Re <psi| sigma_I sigma_J |psi>
  Eigen::VectorXd b;     // b[I]    = Im <psi| sigma_I h_m |psi>
  double c_norm;         // <psi| exp(-2 dtau h_m) |psi>
};

namespace qite_detail {

/// Dense column matrix with column I holding sigma_I |psi>.
inline Eigen::MatrixXcd build_phi(const StateVector& s, const Pool& pool) {
  const auto dim = static_cast<Eigen::Index>(s.size());
  const auto k = static_cast<Eigen::Index>(pool.size());
  Eigen::MatrixXcd phi(dim, k);
  for (Eigen::Index col = 0; col < k; ++col) {
    const PauliString& p = pool[static_cast<std::size_t>(col)];
    const std::uint64_t xm = s.index_mask(p.x_mask());
    const std::uint64_t zm = s.index_mask(p.z_mask());
    const cplx base = PhasedPauli{p.y_count() & 3, p}.phase();
    for (std::uint64_t b = 0; b < s.size(); ++b) {
      const std::uint64_t src = b ^ xm;
      const bool flip = std::popcount(src & zm) & 1;
      phi(static_cast<Eigen::Index>(b), col) = (flip ? -base : base) * s.amp(src);
    }
  }
  return phi;
}

}  // namespace qite_detail

/// Builds the linear system for one Hamiltonian term on an arbitrary
/// (possibly complex) state.  This is the reference path; the run driver
/// switches to structure-exploiting equivalents when the state allows.
inline AssembledSystem assemble_system(const StateVector& s, const Pool& pool,
                                       const HamTerm& term, double dtau) {
  if (pool.n_qubits() != s.n_qubits() || term.string.n_qubits() != s.n_qubits()) {
    throw ConfigError("assemble_system: register size mismatch");
  }
  const auto dim = static_cast<Eigen::Index>(s.size());
  const Eigen::MatrixXcd phi = qite_detail::build_phi(s, pool);
  const std::uint64_t zmh = s.index_mask(term.string.z_mask());
  Eigen::VectorXcd w(dim);
  double c_norm = 0.0;
  for (std::uint64_t b = 0; b < s.size(); ++b) {
    const double sign = (std::popcount(b & zmh) & 1) ? -1.0 : 1.0;
    w(static_cast<Eigen::Index>(b)) = sign * term.coeff * s.amp(b);
    c_norm += std::exp(-2.0 * dtau * sign * term.coeff) * std::norm(s.amp(b));
  }
  AssembledSystem out{Eigen::MatrixXd(), Eigen::VectorXd(), c_norm};
  out.s_re = (phi.adjoint() * phi).real();
  out.b = (phi.adjoint() * w).imag();
  return out;
}

namespace qite_detail {

/// Ridge solve of (m + delta I) x = rhs for a symmetric PSD m whose lower
/// triangle is filled.  With a positive ridge the shifted system is
/// definite and Cholesky applies, falling back to a rank-revealing
/// least-squares solve on breakdown or a non-finite solution.  At zero
/// ridge the system may be singular, so the rank-revealing minimum-norm
/// minimizer of |m x - rhs| is used directly (a barely-positive Cholesky
/// pivot would otherwise return a non-minimizing solution).  Returns the
/// solution and a condition estimate of the factored system.
inline std::pair<Eigen::VectorXd, double> ridge_solve(Eigen::MatrixXd m,
                                                      const Eigen::VectorXd& rhs,
                                                      double delta) {
  if (!(delta >= 0.0) || !std::isfinite(delta)) {
    throw ConfigError("ridge parameter must be finite and non-negative");
  }
  m.diagonal().array() += delta;
  if (delta > 0.0) {
    Eigen::LLT<Eigen::MatrixXd> llt(m.selfadjointView<Eigen::Lower>());
    if (llt.info() == Eigen::Success) {
      Eigen::VectorXd x = llt.solve(rhs);
      if (x.allFinite()) {
        const auto d = llt.matrixLLT().diagonal();
        const double dmax = d.maxCoeff(), dmin = d.minCoeff();
        const double cond =
            dmin > 0.0 ? (dmax / dmin) * (dmax / dmin) : std::numeric_limits<double>::infinity();
        return {std::move(x), cond};
      }
    }
  }
  // Least-squares path: minimum-norm minimizer of |m x - rhs|.
  Eigen::MatrixXd full = m.selfadjointView<Eigen::Lower>();
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(full);
  Eigen::VectorXd x = cod.solve(rhs);
  if (!x.allFinite()) {
    throw NumericError("ridge_solve: least-squares fallback produced non-finite values");
  }
  const auto t = cod.matrixT().diagonal().head(cod.rank());
  double cond = std::numeric_limits<double>::infinity();
  if (cod.rank() == m.rows() && t.size() > 0) {
    cond = std::abs(t(0)) / std::abs(t(t.size() - 1));
  }
  return {std::move(x), cond};
}

}  // namespace qite_detail

/// Solves (s_re + delta I) a = b with a symmetric-PSD factorization and a
/// least-squares fallback on breakdown.
inline Eigen::VectorXd solve_step(const Eigen::MatrixXd& s_re, const Eigen::VectorXd& b,
                                  double delta) {
  if (s_re.rows() != s_re.cols() || s_re.rows() != b.size()) {
    throw ConfigError("solve_step: dimension mismatch");
  }
  return qite_detail::ridge_solve(s_re, b, delta).first;
}

/// E / E_GS; meaningful only for strictly negative ground energies.
inline double figure_of_merit(double energy, double ground_energy) {
  if (!(ground_energy < 0.0)) {
    throw ConfigError("figure_of_merit: undefined unless the ground energy is negative");
  }
  return energy / ground_energy;
}

// ---------------------------------------------------------------------------
// Run records
// ---------------------------------------------------------------------------

/// Per-solve diagnostics.  `term` is the Hamiltonian term index, or
/// `kWholeHamiltonian` when one aggregated system was solved for the full
/// Hamiltonian.  `coeffs` spans the solve's pool in canonical order and is
/// kept only when coefficient recording is on.
struct StepSolve {
  static constexpr int kWholeHamiltonian = -1;

  int term;
  double residual;   // squared distance to the normalized imaginary-time target
  double gram_cond;  // condition estimate of the factored system
  std::vector<double> coeffs;
};

struct StepRecord {
  double tau;
  double energy;
  double r;
  std::vector<double> level_weights;  // aligned with Trajectory::levels
  std::vector<StepSolve> solves;
};

/// Consecutive steps merged into a single exponential of summed
/// coefficients over the shared pool.
struct CompressionBlock {
  int start_step;  // 1-based, inclusive
  int end_step;    // inclusive
  std::vector<double> coeff_sum;

  int n_comp() const { return end_step - start_step + 1; }
};

struct Trajectory {
  double dtau = 0.0;
  double e_gs = 0.0;
  std::vector<double> levels;
  std::vector<StepRecord> steps;  // steps[0] is the initial state
  std::vector<CompressionBlock> blocks;

  const StepRecord& final_record() const { return steps.back(); }
};

struct RunResult {
  Trajectory trajectory;
  StateVector final_state;
};

struct RunOptions {
  double dtau = 0.01;
  int n_steps = 0;
  double ridge = 1e-8;
  bool compress = false;
  /// Assemble the Gram data once per step from the step-initial state and
  /// reuse the factorization for every term (shared pools only).  The
  /// default re-assembles per term from the evolving state.
  bool reuse_gram = false;
  /// Solve one system per step for the whole Hamiltonian instead of
  /// sweeping term by term (shared pools only; the per-term right-hand
  /// sides add over the common pool).  A single rotation product is applied
  /// per step, so the step is a projected gradient update with the Gram
  /// metric and the leading-order energy change -2 dtau b^T (S+dI)^-1 b is
  /// never positive; the term-by-term sweep can lose that guarantee near
  /// convergence, where updates from stale intermediate states form small
  /// limit cycles.
  bool aggregate_terms = false;
  bool record_coefficients = false;
  /// Forces the reference (complex, full-pool) assembly even where the
  /// structure-exploiting path applies; used for cross-validation.
  bool force_general = false;
  /// Applies each term's update as the dense exponential of the summed
  /// generator instead of the ordered product of single-string rotations.
  /// A cross-check mode (capped at 10 qubits): it removes the intra-step
  /// splitting error, which is exactly what the compiled circuits have.
  bool exact_update = false;
  bool early_stop = false;
  int early_stop_window = 50;
  double early_stop_tol = 1e-10;
  /// A compression block closes when the merged-exponential energy rises
  /// above the previous step's by more than this guard.
  double compress_close_tol = 1e-9;
};

// ---------------------------------------------------------------------------
// Engine
// ---------------------------------------------------------------------------

namespace qite_detail {

struct PoolEntry {
  std::uint64_t xm;  // index-space X mask
  std::uint64_t zm;  // index-space Z mask
  double sign;       // real value of i^{y-1} for odd-Y strings
  bool odd_y;
  bool even_z;
};

struct PreparedPool {
  const Pool* pool = nullptr;
  std::vector<PoolEntry> entries;
  std::vector<int> idx_real;  // odd Y count
  std::vector<int> idx_sym;   // odd Y count and even z-mask weight
};

inline PreparedPool prepare_pool(const Pool& pool, int n_qubits) {
  PreparedPool pp;
  pp.pool = &pool;
  pp.entries.reserve(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const PauliString& p = pool[i];
    PoolEntry e{};
    e.xm = to_index_space(p.x_mask(), n_qubits);
    e.zm = to_index_space(p.z_mask(), n_qubits);
    const int y = p.y_count();
    e.odd_y = y & 1;
    e.even_z = (std::popcount(p.z_mask()) & 1) == 0;
    e.sign = (y & 3) == 1 ? 1.0 : -1.0;  // i^{y-1} for odd y
    pp.entries.push_back(e);
    if (e.odd_y) {
      pp.idx_real.push_back(static_cast<int>(i));
      if (e.even_z) pp.idx_sym.push_back(static_cast<int>(i));
    }
  }
  return pp;
}

}  // namespace qite_detail

/// Product-formula driver: one sweep applies, for each Hamiltonian term in
/// order, the pool rotation exp(-i dtau sum_I a_I sigma_I) with
/// coefficients from the regularized normal equations.  With reuse_gram
/// every term's system is built from the step-initial state and one
/// factorization; with aggregate_terms the per-term systems collapse into
/// a single whole-Hamiltonian solve and rotation product per step.
///
/// Correctness-preserving fast paths: on an exactly real state only pool
/// strings with an odd Y count can acquire nonzero coefficients (the Gram
/// matrix is block diagonal between the even/odd-Y sectors and the
/// right-hand side vanishes on the even one), and when the state and every
/// term are additionally invariant under the global bit flip the z-odd
/// strings drop out the same way.  Restricting the solve to the surviving
/// block and, when the string count exceeds the state dimension, solving
/// the push-through form a = -V^T (V V^T + delta)^{-1} w reproduces the
/// full ridge solution exactly while keeping the dense work near
/// min(K, 2^n)^2 * max(K, 2^n).
class QiteEngine {
 public:
  QiteEngine(const Hamiltonian& h, const PoolSet& pools, const RunOptions& opts)
      : h_(&h), pools_(&pools), opts_(opts) {
    if (!(opts.dtau > 0.0) || !std::isfinite(opts.dtau)) {
      throw ConfigError("dtau must be positive and finite");
    }
    if (opts.n_steps < 0) throw ConfigError("n_steps must be non-negative");
    if (!(opts.ridge >= 0.0) || !std::isfinite(opts.ridge)) {
      throw ConfigError("ridge must be finite and non-negative");
    }
    if (opts.reuse_gram && !pools.shared()) {
      throw ConfigError("gram reuse requires a shared pool (nla or nla25)");
    }
    if (opts.aggregate_terms && !pools.shared()) {
      throw ConfigError(
          "aggregated steps sum right-hand sides over one shared pool; use nla "
          "or nla25");
    }
    if (opts.aggregate_terms && opts.reuse_gram) {
      throw ConfigError(
          "aggregate_terms already solves once per step; combining it with "
          "reuse_gram is ambiguous");
    }
    if (opts.compress && !pools.shared()) {
      throw ConfigError(
          "compression merges coefficients over one shared pool; use nla or nla25");
    }
    if (opts.exact_update && h.n_qubits() > 10) {
      throw CapacityError("the dense-exponential cross-check caps at 10 qubits");
    }
    if (opts.exact_update && opts.compress) {
      throw ConfigError(
          "the dense-exponential cross-check applies to plain runs; compressed "
          "evolution is defined through the product circuits");
    }
    const int n = h.n_qubits();
    for (int m = 0; m < pools.n_pools(); ++m) {
      prepared_.push_back(qite_detail::prepare_pool(
          pools.shared() ? pools.shared_pool() : pools.for_term(m), n));
    }
    for (const HamTerm& t : h.terms()) {
      term_zm_.push_back(to_index_space(t.string.z_mask(), n));
      ham_flip_symmetric_ = ham_flip_symmetric_ && (t.string.weight() % 2 == 0);
    }
  }

  const Hamiltonian& hamiltonian() const { return *h_; }
  const PoolSet& pools() const { return *pools_; }
  const RunOptions& options() const { return opts_; }

  /// One full term sweep, mutating the state in place.  The state is
  /// renormalized at the end of the sweep.
  std::vector<StepSolve> sweep(StateVector& s, bool want_coeffs) {
    if (s.n_qubits() != h_->n_qubits()) {
      throw ConfigError("sweep: state register does not match the Hamiltonian");
    }
    std::vector<StepSolve> out;
    out.reserve(static_cast<std::size_t>(h_->n_terms()));
    if (opts_.aggregate_terms) {
      sweep_aggregate(s, want_coeffs, out);
    } else if (opts_.reuse_gram) {
      sweep_reused(s, want_coeffs, out);
    } else {
      for (int m = 0; m < h_->n_terms(); ++m) {
        out.push_back(solve_and_apply(s, m, want_coeffs));
      }
    }
    s.normalize();
    return out;
  }

 private:
  using MatrixXd = Eigen::MatrixXd;
  using VectorXd = Eigen::VectorXd;

  const qite_detail::PreparedPool& prepared(int m) const {
    return pools_->shared() ? prepared_[0] : prepared_[static_cast<std::size_t>(m)];
  }

  /// Chooses the exact coefficient subset justified by the current state.
  const std::vector<int>* active_set(const StateVector& s, int m) const {
    if (opts_.force_general || !s.is_real()) return nullptr;
    const qite_detail::PreparedPool& pp = prepared(m);
    if (ham_flip_symmetric_ && s.is_flip_symmetric()) return &pp.idx_sym;
    return &pp.idx_real;
  }

  /// Fills column `col` of V with the real vector -i sigma_I |psi>
  /// restricted to the first `rows` basis indices.
  void fill_column(const StateVector& s, const qite_detail::PoolEntry& e,
                   Eigen::Index rows, Eigen::Index col, MatrixXd& v) const {
    const std::uint64_t xm = e.xm, zm = e.zm;
    const double sign = e.sign;
    for (Eigen::Index b = 0; b < rows; ++b) {
      const std::uint64_t src = static_cast<std::uint64_t>(b) ^ xm;
      const double a = s.amp(src).real();
      v(b, col) = (std::popcount(src & zm) & 1) ? -sign * a : sign * a;
    }
  }

  /// h_m |psi> restricted to the first `rows` indices (real states).
  void fill_target(const StateVector& s, int m, Eigen::Index rows, VectorXd& w) const {
    const double coeff = h_->terms()[static_cast<std::size_t>(m)].coeff;
    const std::uint64_t zm = term_zm_[static_cast<std::size_t>(m)];
    for (Eigen::Index b = 0; b < rows; ++b) {
      const double a = s.amp(static_cast<std::uint64_t>(b)).real();
      w(b) = (std::popcount(static_cast<std::uint64_t>(b) & zm) & 1) ? -coeff * a
                                                                     : coeff * a;
    }
  }

  /// Regularized normal-equation solve of min |V a + w| given the dense
  /// column matrix.  Routes by dense cost: Gram in coefficient space
  /// (K x K) versus the push-through form in state space (rows x rows);
  /// both give the exact ridge solution.
  std::pair<VectorXd, double> solve_vw(const MatrixXd& v, const VectorXd& w,
                                       double mult) const {
    const double kd = static_cast<double>(v.cols()), rd = static_cast<double>(v.rows());
    const bool state_space = rd * rd * kd + rd * rd * rd / 3.0 < kd * kd * rd + kd * kd * kd / 3.0;
    if (state_space) {
      MatrixXd g = MatrixXd::Zero(v.rows(), v.rows());
      g.selfadjointView<Eigen::Lower>().rankUpdate(v, mult);
      auto [z, cond] = qite_detail::ridge_solve(std::move(g), w, opts_.ridge);
      VectorXd a = -mult * (v.transpose() * z);
      return {std::move(a), cond};
    }
    MatrixXd gram = MatrixXd::Zero(v.cols(), v.cols());
    gram.selfadjointView<Eigen::Lower>().rankUpdate(v.transpose(), mult);
    VectorXd rhs = -mult * (v.transpose() * w);
    return qite_detail::ridge_solve(std::move(gram), rhs, opts_.ridge);
  }

  /// Solves one term restricted to `active` on a real state; returns the
  /// coefficients in active order plus the condition estimate.
  std::pair<VectorXd, double> solve_active(const StateVector& s, int m,
                                           const std::vector<int>& active,
                                           bool flip_folded) const {
    const qite_detail::PreparedPool& pp = prepared(m);
    const auto k = static_cast<Eigen::Index>(active.size());
    const auto rows = static_cast<Eigen::Index>(flip_folded ? s.size() / 2 : s.size());
    const double mult = flip_folded ? 2.0 : 1.0;
    if (k == 0) return {VectorXd(), 1.0};
    MatrixXd v(rows, k);
    for (Eigen::Index col = 0; col < k; ++col) {
      fill_column(s, pp.entries[static_cast<std::size_t>(active[col])], rows, col, v);
    }
    VectorXd w(rows);
    fill_target(s, m, rows, w);
    return solve_vw(v, w, mult);
  }

  /// Dense exp(-i dtau sum a_I sigma_I) through a Hermitian
  /// eigendecomposition.  When the incoming state is real and every
  /// contributing string has an odd Y count the map is real-orthogonal,
  /// so the numerical imaginary dust from the eigensolver is projected
  /// away to keep the real fast path available for later steps.
  void apply_exact_exponential(StateVector& s, const Pool& pool,
                               const std::vector<int>* active,
                               const VectorXd& a) const {
    const auto dim = static_cast<Eigen::Index>(s.size());
    const bool was_real = s.is_real();
    bool odd_y_only = true;
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(dim, dim);
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      if (a(i) == 0.0) continue;
      const std::size_t idx =
          active ? static_cast<std::size_t>((*active)[i]) : static_cast<std::size_t>(i);
      const PauliString& p = pool[idx];
      odd_y_only = odd_y_only && (p.y_count() & 1);
      const std::uint64_t xm = s.index_mask(p.x_mask());
      const std::uint64_t zm = s.index_mask(p.z_mask());
      const cplx base = a(i) * PhasedPauli{p.y_count() & 3, p}.phase();
      for (std::uint64_t b = 0; b < s.size(); ++b) {
        const bool flip = std::popcount(b & zm) & 1;
        g(static_cast<Eigen::Index>(b ^ xm), static_cast<Eigen::Index>(b)) +=
            flip ? -base : base;
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g);
    if (es.info() != Eigen::Success) {
      throw NumericError("dense-exponential cross-check: eigensolver failed");
    }
    Eigen::VectorXcd psi(dim);
    for (std::uint64_t b = 0; b < s.size(); ++b) {
      psi(static_cast<Eigen::Index>(b)) = s.amp(b);
    }
    Eigen::VectorXcd y = es.eigenvectors().adjoint() * psi;
    for (Eigen::Index k = 0; k < dim; ++k) {
      y(k) *= std::exp(cplx{0.0, -opts_.dtau * es.eigenvalues()(k)});
    }
    psi = es.eigenvectors() * y;
    const bool strip_imag = was_real && odd_y_only;
    for (std::uint64_t b = 0; b < s.size(); ++b) {
      const cplx v = psi(static_cast<Eigen::Index>(b));
      s.amp(b) = strip_imag ? cplx{v.real(), 0.0} : v;
    }
  }

  /// Applies the update rotations for one term in canonical pool order.
  void apply_update(StateVector& s, int m, const std::vector<int>* active,
                    const VectorXd& a_active, const VectorXd& a_full) const {
    const Pool& pool = pools_->for_term(m);
    if (opts_.exact_update) {
      apply_exact_exponential(s, pool, active, active ? a_active : a_full);
      return;
    }
    if (active) {
      for (Eigen::Index i = 0; i < a_active.size(); ++i) {
        const double theta = opts_.dtau * a_active(i);
        if (theta != 0.0) {
          s.apply_rotation(pool[static_cast<std::size_t>((*active)[i])], theta);
        }
      }
    } else {
      for (Eigen::Index i = 0; i < a_full.size(); ++i) {
        const double theta = opts_.dtau * a_full(i);
        if (theta != 0.0) s.apply_rotation(pool[static_cast<std::size_t>(i)], theta);
      }
    }
  }

  /// Squared distance between the normalized imaginary-time target built
  /// from the pre-sweep amplitudes and the post-rotation state.
  double term_residual(const std::vector<cplx>& pre, const StateVector& post,
                       int m) const {
    const double coeff = h_->terms()[static_cast<std::size_t>(m)].coeff;
    const std::uint64_t zm = term_zm_[static_cast<std::size_t>(m)];
    const double f_plus = std::exp(-opts_.dtau * coeff);
    const double f_minus = std::exp(opts_.dtau * coeff);
    double c2 = 0.0;
    for (std::uint64_t b = 0; b < post.size(); ++b) {
      const double f = (std::popcount(b & zm) & 1) ? f_minus : f_plus;
      c2 += f * f * std::norm(pre[b]);
    }
    const double inv = 1.0 / std::sqrt(c2);
    double dist = 0.0;
    for (std::uint64_t b = 0; b < post.size(); ++b) {
      const double f = (std::popcount(b & zm) & 1) ? f_minus : f_plus;
      dist += std::norm(f * inv * pre[b] - post.amp(b));
    }
    return dist;
  }

  StepSolve solve_and_apply(StateVector& s, int m, bool want_coeffs) {
    pre_.assign(s.amplitudes().begin(), s.amplitudes().end());
    const std::vector<int>* active = active_set(s, m);
    StepSolve rec{m, 0.0, 1.0, {}};
    if (active) {
      const bool folded = active == &prepared(m).idx_sym;
      auto [a, cond] = solve_active(s, m, *active, folded);
      rec.gram_cond = cond;
      apply_update(s, m, active, a, VectorXd());
      if (want_coeffs) {
        rec.coeffs.assign(pools_->for_term(m).size(), 0.0);
        for (Eigen::Index i = 0; i < a.size(); ++i) {
          rec.coeffs[static_cast<std::size_t>((*active)[i])] = a(i);
        }
      }
    } else {
      const AssembledSystem sys = assemble_system(
          s, pools_->for_term(m), h_->terms()[static_cast<std::size_t>(m)], opts_.dtau);
      auto [a, cond] = qite_detail::ridge_solve(sys.s_re, sys.b, opts_.ridge);
      rec.gram_cond = cond;
      apply_update(s, m, nullptr, VectorXd(), a);
      if (want_coeffs) {
        rec.coeffs.assign(a.data(), a.data() + a.size());
      }
    }
    rec.residual = term_residual(pre_, s, m);
    return rec;
  }

  /// Reuse mode: one Gram factorization per step from the step-initial
  /// state, with every term's right-hand side taken from that same state;
  /// the per-term rotations are then applied sequentially.
  void sweep_reused(StateVector& s, bool want_coeffs, std::vector<StepSolve>& out) {
    const std::vector<int>* active = active_set(s, 0);
    if (!active) {
      // Complex states take the reference path per term; reuse offers no
      // exact shortcut there.
      for (int m = 0; m < h_->n_terms(); ++m) {
        out.push_back(solve_and_apply(s, m, want_coeffs));
      }
      return;
    }
    const qite_detail::PreparedPool& pp = prepared_[0];
    const bool folded = active == &pp.idx_sym;
    const auto k = static_cast<Eigen::Index>(active->size());
    const auto rows = static_cast<Eigen::Index>(folded ? s.size() / 2 : s.size());
    const double mult = folded ? 2.0 : 1.0;
    MatrixXd v(rows, k);
    for (Eigen::Index col = 0; col < k; ++col) {
      fill_column(s, pp.entries[static_cast<std::size_t>((*active)[col])], rows, col, v);
    }
    const double kd = static_cast<double>(k), rd = static_cast<double>(rows);
    const bool state_space = rd * rd * kd < kd * kd * rd;
    std::optional<Eigen::LLT<MatrixXd>> llt;
    MatrixXd gram;
    if (state_space) {
      gram = MatrixXd::Zero(rows, rows);
      gram.selfadjointView<Eigen::Lower>().rankUpdate(v, mult);
    } else {
      gram = MatrixXd::Zero(k, k);
      gram.selfadjointView<Eigen::Lower>().rankUpdate(v.transpose(), mult);
    }
    gram.diagonal().array() += opts_.ridge;
    llt.emplace(gram.selfadjointView<Eigen::Lower>());
    if (llt->info() != Eigen::Success) {
      throw NumericError("gram reuse: factorization failed; rerun without reuse");
    }
    const auto d = llt->matrixLLT().diagonal();
    const double cond = std::pow(d.maxCoeff() / d.minCoeff(), 2.0);
    std::vector<VectorXd> coeffs;
    coeffs.reserve(static_cast<std::size_t>(h_->n_terms()));
    VectorXd w(rows);
    for (int m = 0; m < h_->n_terms(); ++m) {
      fill_target(s, m, rows, w);
      if (state_space) {
        coeffs.push_back(-mult * (v.transpose() * llt->solve(w)));
      } else {
        VectorXd rhs = -mult * (v.transpose() * w);
        coeffs.push_back(llt->solve(rhs));
      }
    }
    for (int m = 0; m < h_->n_terms(); ++m) {
      pre_.assign(s.amplitudes().begin(), s.amplitudes().end());
      StepSolve rec{m, 0.0, cond, {}};
      apply_update(s, m, active, coeffs[static_cast<std::size_t>(m)], VectorXd());
      rec.residual = term_residual(pre_, s, m);
      if (want_coeffs) {
        rec.coeffs.assign(pools_->for_term(m).size(), 0.0);
        const VectorXd& a = coeffs[static_cast<std::size_t>(m)];
        for (Eigen::Index i = 0; i < a.size(); ++i) {
          rec.coeffs[static_cast<std::size_t>((*active)[i])] = a(i);
        }
      }
      out.push_back(std::move(rec));
    }
  }

  /// Squared distance between the normalized whole-Hamiltonian
  /// imaginary-time target built from the pre-step amplitudes and the
  /// post-update state.
  double whole_residual(const std::vector<cplx>& pre, const StateVector& post) const {
    std::vector<double> f(post.size());
    double c2 = 0.0;
    for (std::uint64_t b = 0; b < post.size(); ++b) {
      double e = 0.0;
      for (std::size_t m = 0; m < term_zm_.size(); ++m) {
        const double c = h_->terms()[m].coeff;
        e += (std::popcount(b & term_zm_[m]) & 1) ? -c : c;
      }
      f[b] = std::exp(-opts_.dtau * e);
      c2 += f[b] * f[b] * std::norm(pre[b]);
    }
    const double inv = 1.0 / std::sqrt(c2);
    double dist = 0.0;
    for (std::uint64_t b = 0; b < post.size(); ++b) {
      dist += std::norm(f[b] * inv * pre[b] - post.amp(b));
    }
    return dist;
  }

  /// Aggregated mode: the shared pool makes every term's Gram matrix
  /// identical, so the right-hand sides add and one solve per step covers
  /// the whole Hamiltonian, followed by a single rotation product.
  void sweep_aggregate(StateVector& s, bool want_coeffs, std::vector<StepSolve>& out) {
    pre_.assign(s.amplitudes().begin(), s.amplitudes().end());
    const Pool& pool = pools_->shared_pool();
    const std::vector<int>* active = active_set(s, 0);
    StepSolve rec{StepSolve::kWholeHamiltonian, 0.0, 1.0, {}};
    if (active) {
      const qite_detail::PreparedPool& pp = prepared_[0];
      const bool folded = active == &pp.idx_sym;
      const auto k = static_cast<Eigen::Index>(active->size());
      const auto rows = static_cast<Eigen::Index>(folded ? s.size() / 2 : s.size());
      const double mult = folded ? 2.0 : 1.0;
      if (k > 0) {
        MatrixXd v(rows, k);
        for (Eigen::Index col = 0; col < k; ++col) {
          fill_column(s, pp.entries[static_cast<std::size_t>((*active)[col])], rows, col,
                      v);
        }
        VectorXd w = VectorXd::Zero(rows), tmp(rows);
        for (int m = 0; m < h_->n_terms(); ++m) {
          fill_target(s, m, rows, tmp);
          w += tmp;
        }
        auto [a, cond] = solve_vw(v, w, mult);
        rec.gram_cond = cond;
        apply_update(s, 0, active, a, VectorXd());
        if (want_coeffs) {
          rec.coeffs.assign(pool.size(), 0.0);
          for (Eigen::Index i = 0; i < a.size(); ++i) {
            rec.coeffs[static_cast<std::size_t>((*active)[i])] = a(i);
          }
        }
      }
    } else {
      const Eigen::MatrixXcd phi = qite_detail::build_phi(s, pool);
      const double shift = h_->constant();
      Eigen::VectorXcd w(static_cast<Eigen::Index>(s.size()));
      for (std::uint64_t b = 0; b < s.size(); ++b) {
        w(static_cast<Eigen::Index>(b)) = (h_->energy_of_basis_state(b) - shift) * s.amp(b);
      }
      const MatrixXd s_re = (phi.adjoint() * phi).real();
      const VectorXd rhs = (phi.adjoint() * w).imag();
      auto [a, cond] = qite_detail::ridge_solve(s_re, rhs, opts_.ridge);
      rec.gram_cond = cond;
      apply_update(s, 0, nullptr, VectorXd(), a);
      if (want_coeffs) rec.coeffs.assign(a.data(), a.data() + a.size());
    }
    rec.residual = whole_residual(pre_, s);
    out.push_back(std::move(rec));
  }

  const Hamiltonian* h_;
  const PoolSet* pools_;
  RunOptions opts_;
  std::vector<qite_detail::PreparedPool> prepared_;
  std::vector<std::uint64_t> term_zm_;
  bool ham_flip_symmetric_ = true;
  std::vector<cplx> pre_;
};

/// One product-formula sweep over all terms (the standalone form of the
/// driver's inner step).
inline std::vector<StepSolve> qite_step(StateVector& s, const Hamiltonian& h,
                                        const PoolSet& pools, const RunOptions& opts) {
  QiteEngine engine(h, pools, opts);
  return engine.sweep(s, opts.record_coefficients);
}

namespace qite_detail {

class Recorder {
 public:
  explicit Recorder(const Spectrum& spec) : spec_(&spec) {
    const std::vector<Level> levels = energy_levels(spec);
    for (const Level& l : levels) levels_out_.push_back(l.energy);
    level_of_.resize(spec.energies.size());
    for (std::size_t x = 0; x < spec.energies.size(); ++x) {
      const auto it = std::lower_bound(levels_out_.begin(), levels_out_.end(),
                                       spec.energies[x] - 1e-9);
      level_of_[x] = static_cast<std::uint32_t>(it - levels_out_.begin());
    }
  }

  const std::vector<double>& levels() const { return levels_out_; }

  StepRecord record(const StateVector& s, double tau,
                    std::vector<StepSolve> solves) const {
    StepRecord rec;
    rec.tau = tau;
    rec.energy = s.diagonal_energy(spec_->energies);
    rec.r = figure_of_merit(rec.energy, spec_->ground_energy);
    rec.level_weights.assign(levels_out_.size(), 0.0);
    for (std::uint64_t x = 0; x < s.size(); ++x) {
      rec.level_weights[level_of_[x]] += std::norm(s.amp(x));
    }
    rec.solves = std::move(solves);
    return rec;
  }

 private:
  const Spectrum* spec_;
  std::vector<double> levels_out_;
  std::vector<std::uint32_t> level_of_;
};

inline void strip_coeffs(std::vector<StepSolve>& solves) {
  for (StepSolve& s : solves) {
    s.coeffs.clear();
    s.coeffs.shrink_to_fit();
  }
}

}  // namespace qite_detail

/// Full trajectory from the equal-superposition start.  With
/// opts.compress the working state is re-prepared each step from the
/// merged block exponentials (the compressed-circuit state feeds back
/// into the solves); otherwise the sweeps chain directly.
inline RunResult run(const Hamiltonian& h, const PoolSet& pools, const RunOptions& opts,
                     const Spectrum* precomputed = nullptr) {
  QiteEngine engine(h, pools, opts);
  Spectrum local;
  if (!precomputed) {
    local = Spectrum::brute_force(h);
    precomputed = &local;
  }
  const Spectrum& spec = *precomputed;
  qite_detail::Recorder recorder(spec);

  Trajectory traj;
  traj.dtau = opts.dtau;
  traj.e_gs = spec.ground_energy;
  traj.levels = recorder.levels();

  StateVector state = StateVector::uniform(h.n_qubits());
  traj.steps.push_back(recorder.record(state, 0.0, {}));

  int plateau = 0;
  if (!opts.compress) {
    for (int n = 1; n <= opts.n_steps; ++n) {
      std::vector<StepSolve> solves = engine.sweep(state, opts.record_coefficients);
      traj.steps.push_back(recorder.record(state, n * opts.dtau, std::move(solves)));
      const auto& cur = traj.steps;
      if (opts.early_stop &&
          std::abs(cur.back().energy - cur[cur.size() - 2].energy) < opts.early_stop_tol) {
        if (++plateau >= opts.early_stop_window) break;
      } else {
        plateau = 0;
      }
    }
    return RunResult{std::move(traj), std::move(state)};
  }

  // Compressed run.  Coefficient vectors are summed componentwise over the
  // shared pool, within a step and across the steps of the open block.
  const Pool& pool = pools.shared_pool();
  const auto pool_size = pool.size();
  std::vector<double> open_sum(pool_size, 0.0);
  int open_start = 1;
  double prev_energy = traj.steps[0].energy;

  auto prepare = [&](const std::vector<CompressionBlock>& closed,
                     const std::vector<double>& open) {
    StateVector s = StateVector::uniform(h.n_qubits());
    auto apply_sum = [&](const std::vector<double>& sum) {
      for (std::size_t i = 0; i < sum.size(); ++i) {
        const double theta = opts.dtau * sum[i];
        if (theta != 0.0) s.apply_rotation(pool[i], theta);
      }
    };
    for (const CompressionBlock& b : closed) apply_sum(b.coeff_sum);
    apply_sum(open);
    s.normalize();
    return s;
  };

  for (int n = 1; n <= opts.n_steps; ++n) {
    StateVector scratch = state;
    std::vector<StepSolve> solves = engine.sweep(scratch, true);
    std::vector<double> step_sum(pool_size, 0.0);
    for (const StepSolve& sv : solves) {
      for (std::size_t i = 0; i < pool_size; ++i) step_sum[i] += sv.coeffs[i];
    }
    if (!opts.record_coefficients) qite_detail::strip_coeffs(solves);

    std::vector<double> trial_sum = open_sum;
    for (std::size_t i = 0; i < pool_size; ++i) trial_sum[i] += step_sum[i];
    StateVector trial = prepare(traj.blocks, trial_sum);
    const double trial_energy = trial.diagonal_energy(spec.energies);

    if (trial_energy > prev_energy + opts.compress_close_tol && open_start < n) {
      // Merging this step into the open block raised the energy: freeze
      // the block at the previous step and start a new one here.
      traj.blocks.push_back(CompressionBlock{open_start, n - 1, std::move(open_sum)});
      open_sum = std::move(step_sum);
      open_start = n;
      state = prepare(traj.blocks, open_sum);
    } else {
      open_sum = std::move(trial_sum);
      state = std::move(trial);
    }
    traj.steps.push_back(recorder.record(state, n * opts.dtau, std::move(solves)));
    prev_energy = traj.steps.back().energy;

    const auto& cur = traj.steps;
    if (opts.early_stop &&
        std::abs(cur.back().energy - cur[cur.size() - 2].energy) < opts.early_stop_tol) {
      if (++plateau >= opts.early_stop_window) break;
    } else {
      plateau = 0;
    }
  }
  const int last_step = static_cast<int>(traj.steps.size()) - 1;
  if (last_step >= open_start) {
    traj.blocks.push_back(CompressionBlock{open_start, last_step, std::move(open_sum)});
  }
  return RunResult{std::move(traj), std::move(state)};
}

inline RunResult run(const Hamiltonian& h, const DomainSpec& spec, const RunOptions& opts) {
  const PoolSet pools = PoolSet::build(spec, h);
  return run(h, pools, opts);
}

/// Compression-enabled run (shared pools only).
inline RunResult compress_run(const Hamiltonian& h, const DomainSpec& spec,
                              RunOptions opts) {
  opts.compress = true;
  return run(h, spec, opts);
}

// ---------------------------------------------------------------------------
// Circuit export
// ---------------------------------------------------------------------------

/// Compiles a recorded trajectory into circuits: one per step for plain
/// runs (requires recorded coefficients), one per block for compressed
/// runs.  Rotations with |coefficient| below `threshold` are dropped;
/// exact zeros are the common case for the structurally absent strings.
inline std::vector<Circuit> trajectory_circuits(const Trajectory& traj,
                                                const PoolSet& pools, int n_qubits,
                                                double threshold = 1e-12) {
  std::vector<Circuit> out;
  if (!traj.blocks.empty()) {
    const Pool& pool = pools.shared_pool();
    for (const CompressionBlock& b : traj.blocks) {
      Circuit c(n_qubits);
      for (std::size_t i = 0; i < b.coeff_sum.size(); ++i) {
        if (std::abs(b.coeff_sum[i]) > threshold) {
          c.append(compile_rotation(pool[i], traj.dtau * b.coeff_sum[i]));
        }
      }
      out.push_back(std::move(c));
    }
    return out;
  }
  for (std::size_t n = 1; n < traj.steps.size(); ++n) {
    Circuit c(n_qubits);
    for (const StepSolve& sv : traj.steps[n].solves) {
      if (sv.coeffs.empty()) {
        throw ConfigError(
            "trajectory_circuits: run was recorded without coefficients; enable "
            "record_coefficients");
      }
      const Pool& pool =
          sv.term < 0 ? pools.shared_pool() : pools.for_term(sv.term);
      for (std::size_t i = 0; i < sv.coeffs.size(); ++i) {
        if (std::abs(sv.coeffs[i]) > threshold) {
          c.append(compile_rotation(pool[i], traj.dtau * sv.coeffs[i]));
        }
      }
    }
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace qitesim

#endif  // QITESIM_QITE_HPP_
