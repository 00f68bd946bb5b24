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

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "qitesim/circuit.hpp"
#include "qitesim/errors.hpp"
#include "qitesim/hamiltonian.hpp"
#include "qitesim/noise.hpp"
#include "qitesim/pauli.hpp"
#include "qitesim/pools.hpp"
#include "qitesim/qite.hpp"
#include "qitesim/statevec.hpp"

using Catch::Matchers::WithinAbs;
using qitesim::CapacityError;
using qitesim::Circuit;
using qitesim::ConfigError;
using qitesim::cplx;
using qitesim::DensityMatrix;
using qitesim::DomainSpec;
using qitesim::Graph;
using qitesim::Hamiltonian;
using qitesim::HamTerm;
using qitesim::Method;
using qitesim::NoiseModel;
using qitesim::PauliString;
using qitesim::PoolSet;
using qitesim::StateVector;

TEST_CASE("noise model validation enforces the physical parameter ranges") {
  NoiseModel nm;
  CHECK_NOTHROW(nm.validate());
  CHECK_NOTHROW(NoiseModel::noiseless().validate());

  nm = NoiseModel{};
  nm.t1_us = 0.0;
  CHECK_THROWS_AS(nm.validate(), ConfigError);
  nm = NoiseModel{};
  nm.t2_us = 250.0;  // exceeds 2 T1 = 200
  CHECK_THROWS_AS(nm.validate(), ConfigError);
  nm = NoiseModel{};
  nm.tg1_ns = -5.0;
  CHECK_THROWS_AS(nm.validate(), ConfigError);
  nm = NoiseModel{};
  nm.p00 = 1.2;
  CHECK_THROWS_AS(nm.validate(), ConfigError);
  nm = NoiseModel{};
  nm.p00 = 0.9;  // row no longer sums to one
  CHECK_THROWS_AS(nm.validate(), ConfigError);
}

TEST_CASE("channel factors satisfy the completeness relation") {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto completeness_defect = [](const std::vector<std::array<cplx, 4>>& kraus) {
    // sum_k K^dagger K as a row-major 2x2, compared to the identity.
    cplx s00{0, 0}, s01{0, 0}, s10{0, 0}, s11{0, 0};
    for (const auto& k : kraus) {
      s00 += std::conj(k[0]) * k[0] + std::conj(k[2]) * k[2];
      s01 += std::conj(k[0]) * k[1] + std::conj(k[2]) * k[3];
      s10 += std::conj(k[1]) * k[0] + std::conj(k[3]) * k[2];
      s11 += std::conj(k[1]) * k[1] + std::conj(k[3]) * k[3];
    }
    return std::max(std::max(std::abs(s00 - 1.0), std::abs(s11 - 1.0)),
                    std::max(std::abs(s01), std::abs(s10)));
  };
  for (int trial = 0; trial < 50; ++trial) {
    const double g = unit(rng), p = unit(rng);
    CAPTURE(g, p);
    REQUIRE(completeness_defect(qitesim::amplitude_damping_kraus(g)) < 1e-12);
    REQUIRE(completeness_defect(qitesim::phase_flip_kraus(p)) < 1e-12);
  }
  CHECK_THROWS_AS(qitesim::amplitude_damping_kraus(-0.1), ConfigError);
  CHECK_THROWS_AS(qitesim::amplitude_damping_kraus(1.1), ConfigError);
  CHECK_THROWS_AS(qitesim::phase_flip_kraus(2.0), ConfigError);
}

TEST_CASE("relaxation rates reduce to the exponential time constants") {
  const NoiseModel nm;  // T1 = 100 us, T2 = 80 us
  const double t_ns = 1000.0;
  CHECK_THAT(qitesim::thermal_gamma(t_ns, nm), WithinAbs(1.0 - std::exp(-0.01), 1e-15));
  const double want_mu = std::exp(-(1.0 / 80.0 - 0.5 / 100.0) * 1.0);
  CHECK_THAT(qitesim::thermal_p_flip(t_ns, nm), WithinAbs(0.5 * (1.0 - want_mu), 1e-15));
}

TEST_CASE("an excited qubit decays with the amplitude-damping time constant") {
  StateVector one(1);
  one.amp(0) = cplx{0.0, 0.0};
  one.amp(1) = cplx{1.0, 0.0};
  DensityMatrix rho = DensityMatrix::from_state(one);
  const NoiseModel nm;
  const double t_ns = 5000.0;  // 5 us
  rho.apply_thermal(0, t_ns, nm);
  CHECK_THAT(rho.at(1, 1).real(), WithinAbs(std::exp(-0.05), 1e-12));
  CHECK_THAT(rho.trace(), WithinAbs(1.0, 1e-12));
}

TEST_CASE("superposition coherence decays with the total dephasing constant") {
  DensityMatrix rho = DensityMatrix::uniform(1);
  CHECK_THAT(rho.at(0, 1).real(), WithinAbs(0.5, 1e-15));
  const NoiseModel nm;
  const double t_ns = 4000.0;  // 4 us
  rho.apply_thermal(0, t_ns, nm);
  CHECK_THAT(std::abs(rho.at(0, 1)), WithinAbs(0.5 * std::exp(-4.0 / 80.0), 1e-12));
  CHECK_THAT(rho.trace(), WithinAbs(1.0, 1e-12));
}

TEST_CASE("density-matrix gate action matches the pure-state simulator") {
  std::mt19937_64 rng(62);
  std::uniform_real_distribution<double> angle(-2.0, 2.0);
  const NoiseModel off = NoiseModel::noiseless();
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 3;
    Circuit c(n);
    for (int i = 0; i < 3; ++i) {
      c.append(qitesim::compile_rotation(oracle::random_pauli(n, rng), angle(rng)));
    }
    StateVector s = StateVector::uniform(n);
    DensityMatrix rho = DensityMatrix::uniform(n);
    c.run_on(s);
    rho.run_noisy(c, off);
    double err = 0.0;
    for (std::uint64_t r = 0; r < rho.dim(); ++r) {
      for (std::uint64_t col = 0; col < rho.dim(); ++col) {
        err = std::max(err,
                       std::abs(rho.at(r, col) - s.amp(r) * std::conj(s.amp(col))));
      }
    }
    CAPTURE(trial);
    REQUIRE(err < 1e-10);
    REQUIRE_THAT(rho.purity(), WithinAbs(1.0, 1e-10));
  }
}

TEST_CASE("readout confusion mixes probabilities row by true state") {
  const NoiseModel nm;
  const auto from_zero = qitesim::apply_readout_confusion({1.0, 0.0}, 1, nm);
  CHECK_THAT(from_zero[0], WithinAbs(0.995, 1e-15));
  CHECK_THAT(from_zero[1], WithinAbs(0.005, 1e-15));
  const auto from_one = qitesim::apply_readout_confusion({0.0, 1.0}, 1, nm);
  CHECK_THAT(from_one[0], WithinAbs(0.02, 1e-15));
  CHECK_THAT(from_one[1], WithinAbs(0.98, 1e-15));
  const auto mixed = qitesim::apply_readout_confusion({0.25, 0.25, 0.25, 0.25}, 2, nm);
  double total = 0.0;
  for (const double p : mixed) total += p;
  CHECK_THAT(total, WithinAbs(1.0, 1e-12));
  CHECK_THROWS_AS(qitesim::apply_readout_confusion({1.0, 0.0}, 2, nm), ConfigError);
}

TEST_CASE("measured energies fold the confusion matrix into the expectation") {
  const Hamiltonian h(1, 0.0, {HamTerm{1.0, PauliString::parse("Z")}});
  const DensityMatrix rho(1);  // |0><0|, <Z> = +1
  const NoiseModel nm;
  // 0.995 * (+1) + 0.005 * (-1)
  CHECK_THAT(qitesim::measured_energy(rho, h, nm), WithinAbs(0.99, 1e-12));
  const DensityMatrix wrong(2);
  CHECK_THROWS_AS(qitesim::measured_energy(wrong, h, nm), ConfigError);
}

TEST_CASE("replay through the identity channel reproduces the ideal energies") {
  const Hamiltonian h = Hamiltonian::maxcut(Graph::complete_unit(4));
  const PoolSet ps = PoolSet::build({Method::kNLA, 2}, h);
  qitesim::RunOptions opts;
  opts.dtau = 0.5;
  opts.n_steps = 5;
  opts.record_coefficients = true;
  opts.reuse_gram = true;
  const qitesim::RunResult res = qitesim::run(h, ps, opts);
  const std::vector<Circuit> circuits =
      qitesim::trajectory_circuits(res.trajectory, ps, 4);
  const qitesim::ReplayResult rep = qitesim::replay(circuits, h, NoiseModel::noiseless());
  REQUIRE(rep.points.size() == circuits.size() + 1);
  CHECK_THAT(rep.points[0].energy_ideal, WithinAbs(-3.0, 1e-12));
  for (const auto& p : rep.points) {
    REQUIRE_THAT(p.energy_noisy, WithinAbs(p.energy_ideal, 1e-9));
    REQUIRE_THAT(p.purity, WithinAbs(1.0, 1e-9));
  }
  // The replayed ideal endpoint is the solver's endpoint.
  CHECK_THAT(rep.final_point().energy_ideal,
             WithinAbs(res.trajectory.final_record().energy, 1e-9));
  CHECK(rep.final_point().gates > 0);
  CHECK(rep.final_point().depth > 0);
}

TEST_CASE("hardware noise degrades purity monotonically and preserves trace") {
  const Hamiltonian h = Hamiltonian::maxcut(Graph::complete_unit(4));
  const PoolSet ps = PoolSet::build({Method::kNLA, 2}, h);
  qitesim::RunOptions opts;
  opts.dtau = 0.5;
  opts.n_steps = 4;
  opts.record_coefficients = true;
  opts.reuse_gram = true;
  const qitesim::RunResult res = qitesim::run(h, ps, opts);
  const std::vector<Circuit> circuits =
      qitesim::trajectory_circuits(res.trajectory, ps, 4);
  const NoiseModel nm;
  const qitesim::ReplayResult rep = qitesim::replay(circuits, h, nm);
  for (std::size_t i = 1; i < rep.points.size(); ++i) {
    REQUIRE(rep.points[i].purity <= rep.points[i - 1].purity + 1e-12);
  }
  CHECK(rep.final_point().purity < 1.0);
  // Decoherence pulls the reported energy above the ideal one.
  CHECK(rep.final_point().energy_noisy > rep.final_point().energy_ideal);

  DensityMatrix rho = DensityMatrix::uniform(4);
  for (const Circuit& c : circuits) rho.run_noisy(c, nm);
  CHECK_THAT(rho.trace(), WithinAbs(1.0, 1e-10));
}

TEST_CASE("density matrices are capped at six qubits") {
  CHECK_THROWS_AS(DensityMatrix(7), CapacityError);
  CHECK_THROWS_AS(DensityMatrix(0), ConfigError);
  CHECK_NOTHROW(DensityMatrix(6));
}

TEST_CASE("density-matrix operations validate their qubit arguments") {
  DensityMatrix rho(2);
  const NoiseModel nm;
  CHECK_THROWS_AS(rho.apply_thermal(2, 10.0, nm), ConfigError);
  CHECK_THROWS_AS(rho.apply_cnot(0, 0), ConfigError);
  CHECK_THROWS_AS(rho.apply_rz(-1, 0.1), ConfigError);
  Circuit wrong(3);
  CHECK_THROWS_AS(rho.run_noisy(wrong, nm), ConfigError);
  std::vector<Circuit> mismatched = {Circuit(3)};
  const Hamiltonian h = Hamiltonian::maxcut(Graph::complete_unit(4));
  CHECK_THROWS_AS(qitesim::replay(mismatched, h, nm), ConfigError);
}
