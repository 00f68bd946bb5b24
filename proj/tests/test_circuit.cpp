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
#include <limits>
#include <random>
#include <sstream>
#include <string>

#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "qitesim/circuit.hpp"
#include "qitesim/errors.hpp"
#include "qitesim/hamiltonian.hpp"
#include "qitesim/pauli.hpp"
#include "qitesim/pools.hpp"
#include "qitesim/statevec.hpp"

using qitesim::Circuit;
using qitesim::ConfigError;
using qitesim::DomainSpec;
using qitesim::Gate;
using qitesim::GateKind;
using qitesim::Graph;
using qitesim::Hamiltonian;
using qitesim::Method;
using qitesim::NumericError;
using qitesim::PauliString;
using qitesim::PoolSet;
using qitesim::StateVector;
using qitesim::StepResources;

TEST_CASE("gate and register validation") {
  CHECK_THROWS_AS(Circuit(0), ConfigError);
  Circuit c(2);
  CHECK_THROWS_AS(c.append(Gate::h(2)), ConfigError);
  CHECK_THROWS_AS(c.append(Gate::cnot(0, 0)), ConfigError);
  CHECK_THROWS_AS(c.append(Gate::cnot(0, 5)), ConfigError);
  CHECK_THROWS_AS(c.append(Circuit(3)), ConfigError);
  c.append(Gate::rz(1, 0.3));
  Circuit d(2);
  d.append(c);
  CHECK(d.gate_count() == 1);
  CHECK(d.gates()[0].angle == 0.3);
  StateVector wrong(3);
  CHECK_THROWS_AS(c.run_on(wrong), ConfigError);
}

TEST_CASE("depth counts greedy layers, not gates") {
  Circuit empty(2);
  CHECK(empty.depth() == 0);
  CHECK(empty.gate_count() == 0);

  Circuit serial(2);  // three gates sharing qubit 1: depth equals count
  serial.append(Gate::cnot(0, 1));
  serial.append(Gate::rz(1, 0.1));
  serial.append(Gate::cnot(0, 1));
  CHECK(serial.depth() == 3);

  Circuit parallel(2);  // independent qubits pack into one layer
  parallel.append(Gate::h(0));
  parallel.append(Gate::h(1));
  CHECK(parallel.depth() == 1);

  Circuit disjoint(4);
  disjoint.append(Gate::cnot(0, 1));
  disjoint.append(Gate::cnot(2, 3));
  CHECK(disjoint.depth() == 1);

  Circuit mixed(3);  // H on 2 fits beside the CNOT on {0,1}
  mixed.append(Gate::cnot(0, 1));
  mixed.append(Gate::h(2));
  mixed.append(Gate::cnot(1, 2));
  CHECK(mixed.depth() == 2);
}

TEST_CASE("compiled rotations equal the dense exponential including phase") {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> angle(-3.0, 3.0);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 5);
    const PauliString p = oracle::random_pauli(n, rng);
    const double theta = angle(rng);
    const Circuit c = qitesim::compile_rotation(p, theta);
    StateVector s = oracle::random_state(n, rng);
    const oracle::Vec want =
        oracle::expm(qitesim::cplx{0.0, -theta} * oracle::dense(p)) *
        oracle::to_vec(s);
    c.run_on(s);
    const double err = (oracle::to_vec(s) - want).cwiseAbs().maxCoeff();
    CAPTURE(n, p.str(), theta);
    REQUIRE(err < 1e-10);
  }
}

TEST_CASE("compilation rejects identities and non-finite angles") {
  CHECK_THROWS_AS(qitesim::compile_rotation(PauliString::parse("II"), 0.1),
                  ConfigError);
  CHECK_THROWS_AS(qitesim::compile_rotation(
                      PauliString::parse("XZ"),
                      std::numeric_limits<double>::quiet_NaN()),
                  NumericError);
}

TEST_CASE("compiled gate counts follow the ladder construction") {
  std::mt19937_64 rng(52);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 5);
    const PauliString p = oracle::random_pauli(n, rng);
    const Circuit c = qitesim::compile_rotation(p, 0.7);
    int nx = 0, ny = 0;
    for (int q = 0; q < n; ++q) {
      nx += p.letter(q) == 'X';
      ny += p.letter(q) == 'Y';
    }
    const std::uint64_t want = 2u * static_cast<unsigned>(nx + ny) +
                               2u * static_cast<unsigned>(p.weight() - 1) + 1u;
    CAPTURE(p.str());
    REQUIRE(c.gate_count() == want);
  }
}

TEST_CASE("the two-qubit phase rotation compiles to the three-gate ladder") {
  const Circuit c = qitesim::compile_rotation(PauliString::parse("ZZ"), 0.25);
  CHECK(c.depth() == 3);
  std::ostringstream os;
  c.dump(os);
  CHECK(os.str() == "CNOT 0 1\nRZ 1 0.5\nCNOT 0 1\n");
}

TEST_CASE("gate kind names are stable") {
  CHECK(std::string(qitesim::gate_kind_name(GateKind::kH)) == "H");
  CHECK(std::string(qitesim::gate_kind_name(GateKind::kRxPlus)) == "RX+");
  CHECK(std::string(qitesim::gate_kind_name(GateKind::kRxMinus)) == "RX-");
  CHECK(std::string(qitesim::gate_kind_name(GateKind::kRz)) == "RZ");
  CHECK(std::string(qitesim::gate_kind_name(GateKind::kCnot)) == "CNOT");
}

TEST_CASE("per-step resource estimates count one pass over each pool") {
  const Hamiltonian pet = Hamiltonian::maxcut(Graph::petersen());

  const DomainSpec nla2{Method::kNLA, 2};
  const PoolSet shared = PoolSet::build(nla2, pet);
  const StepResources r = qitesim::step_resources(pet, nla2, shared);
  CHECK(r.n_bit == 10);
  CHECK(r.method == "nla-D2");
  CHECK(r.domain == 2.0);
  CHECK(r.n_operators == 435);
  CHECK(r.system_size_bound == 720.0);        // 16 * C(10,2)
  CHECK(r.gate_ops_per_qubit_bound == 144.0);  // 16 * C(9,1)
  CHECK(r.depth > 0);
  CHECK(r.gate_count > r.n_operators);  // every rotation is several gates

  const DomainSpec la{Method::kLA, std::nullopt};
  const PoolSet per_term = PoolSet::build(la, pet);
  const StepResources rl = qitesim::step_resources(pet, la, per_term);
  CHECK(rl.method == "la-D6");
  CHECK(rl.domain == 6.0);
  CHECK(rl.n_operators == 61425);  // 15 terms x 4095 strings
  CHECK(rl.system_size_bound == 4096.0);

  const DomainSpec mid{Method::kNLA25, std::nullopt};
  const PoolSet mid_pools = PoolSet::build(mid, pet);
  const StepResources rm = qitesim::step_resources(pet, mid, mid_pools);
  CHECK(rm.method == "nla25");
  CHECK(rm.domain == 2.5);
  CHECK(rm.n_operators == 1245);
}
