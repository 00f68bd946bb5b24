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

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "qitesim/errors.hpp"
#include "qitesim/hamiltonian.hpp"
#include "qitesim/pauli.hpp"
#include "qitesim/pools.hpp"

using Catch::Matchers::ContainsSubstring;
using qitesim::build_pool;
using qitesim::ConfigError;
using qitesim::DomainSpec;
using qitesim::Graph;
using qitesim::Hamiltonian;
using qitesim::Method;
using qitesim::PauliString;
using qitesim::Pool;
using qitesim::PoolSet;

namespace {

Hamiltonian ham(const Graph& g) { return Hamiltonian::maxcut(g); }

/// Collects a pool's strings into a set for order-free comparisons.
std::set<PauliString> as_set(const Pool& p) {
  return std::set<PauliString>(p.begin(), p.end());
}

}  // namespace

TEST_CASE("interaction set collects coupled qubits outside the term support") {
  const Hamiltonian h = ham(Graph::petersen());
  // Edge 0 joins vertices 0 and 1; their other neighbors are 4, 5 and 2, 6.
  CHECK(qitesim::interaction_set(h, 0) == std::vector<int>{2, 4, 5, 6});
  CHECK_THROWS_AS(qitesim::interaction_set(h, -1), ConfigError);
  CHECK_THROWS_AS(qitesim::interaction_set(h, h.n_terms()), ConfigError);

  // A graph of two disconnected edges: nothing couples to anything.
  const Hamiltonian iso = ham(Graph(4, {{0, 1, 1.0}, {2, 3, 1.0}}));
  CHECK(qitesim::interaction_set(iso, 0).empty());
}

TEST_CASE("shared pool sizes follow the weight-by-weight counting formula") {
  auto nla_count = [](int n, int d) {
    std::size_t total = 0;
    for (int w = 1; w <= d; ++w) {
      double c = qitesim::binomial(n, w);
      double p3 = 1.0;
      for (int i = 0; i < w; ++i) p3 *= 3.0;
      total += static_cast<std::size_t>(c * p3 + 0.5);
    }
    return total;
  };
  const Hamiltonian k4 = ham(Graph::complete_unit(4));
  const Hamiltonian pet = ham(Graph::petersen());
  CHECK(build_pool({Method::kNLA, 1}, k4).size() == 12);
  CHECK(build_pool({Method::kNLA, 2}, k4).size() == 66);
  CHECK(build_pool({Method::kNLA, 2}, pet).size() == 435);
  CHECK(build_pool({Method::kNLA, 3}, pet).size() == 3675);
  CHECK(nla_count(4, 2) == 66);
  CHECK(nla_count(10, 2) == 435);
  CHECK(nla_count(10, 3) == 3675);
}

TEST_CASE("extended-local pools on the 3-regular fixture have 207 strings per term") {
  const Hamiltonian pet = ham(Graph::petersen());
  const PoolSet ps = PoolSet::build({Method::kELA, 3}, pet);
  REQUIRE(ps.n_pools() == pet.n_terms());
  for (int m = 0; m < pet.n_terms(); ++m) {
    // Four size-3 domains sharing the 2-qubit support block:
    // 4 * 63 - 3 * 15 = 207.
    CHECK(ps.for_term(m).size() == 207);
  }
}

TEST_CASE("full-domain local pools contain every string on support plus neighborhood") {
  const Hamiltonian pet = ham(Graph::petersen());
  const PoolSet ps = PoolSet::build({Method::kLA, std::nullopt}, pet);
  for (int m = 0; m < pet.n_terms(); ++m) {
    CHECK(ps.for_term(m).size() == 4095);  // 4^6 - 1 on six qubits
  }
  CHECK(qitesim::effective_domain({Method::kLA, std::nullopt}, pet, 0) == 6);
}

TEST_CASE("local pools equal extended-local pools at the maximal domain size") {
  for (const Graph& g : {Graph::petersen(), Graph::complete_unit(4),
                         Graph::cycle_unit(5)}) {
    const Hamiltonian h = ham(g);
    for (int m = 0; m < h.n_terms(); ++m) {
      const int k =
          h.terms()[static_cast<std::size_t>(m)].string.weight();
      const int n_l = static_cast<int>(qitesim::interaction_set(h, m).size());
      const Pool la = build_pool({Method::kLA, std::nullopt}, h, m);
      const Pool ela = build_pool({Method::kELA, k + n_l}, h, m);
      CAPTURE(g.n_vertices(), m);
      REQUIRE(as_set(la) == as_set(ela));
    }
  }
}

TEST_CASE("on complete graphs the union of extended-local pools is the shared pool") {
  for (int n : {4, 5}) {
    const Hamiltonian h = ham(Graph::complete_unit(n));
    std::set<PauliString> ela_union;
    for (int m = 0; m < h.n_terms(); ++m) {
      const Pool p = build_pool({Method::kELA, 3}, h, m);
      ela_union.insert(p.begin(), p.end());
    }
    const Pool nla = build_pool({Method::kNLA, 3}, h);
    CAPTURE(n);
    REQUIRE(ela_union == as_set(nla));
    CHECK(nla.size() == (n == 4 ? 174u : 375u));
  }
}

TEST_CASE("intermediate shared pool sits between its weight-2 and weight-3 neighbors") {
  const Hamiltonian pet = ham(Graph::petersen());
  const Pool mid = build_pool({Method::kNLA25, std::nullopt}, pet);
  const Pool d2 = build_pool({Method::kNLA, 2}, pet);
  const Pool d3 = build_pool({Method::kNLA, 3}, pet);
  CHECK(mid.size() == 1245);
  // Contains all of D2, is contained in D3.
  for (const PauliString& s : d2) REQUIRE(mid.contains(s));
  for (const PauliString& s : mid) REQUIRE(d3.contains(s));
  CHECK(mid.size() > d2.size());
  CHECK(mid.size() < d3.size());
}

TEST_CASE("domain size validation names the offending range") {
  const Hamiltonian pet = ham(Graph::petersen());
  CHECK_THROWS_WITH(PoolSet::build({Method::kLA, 3}, pet), ContainsSubstring("ela"));
  CHECK_THROWS_AS(PoolSet::build({Method::kELA, std::nullopt}, pet), ConfigError);
  CHECK_THROWS_WITH(PoolSet::build({Method::kELA, 1}, pet),
                    ContainsSubstring("[k, k + N_L]"));
  CHECK_THROWS_WITH(PoolSet::build({Method::kELA, 7}, pet),
                    ContainsSubstring("[k, k + N_L]"));
  CHECK_THROWS_AS(PoolSet::build({Method::kNLA, std::nullopt}, pet), ConfigError);
  CHECK_THROWS_AS(PoolSet::build({Method::kNLA, 0}, pet), ConfigError);
  CHECK_THROWS_AS(PoolSet::build({Method::kNLA, 11}, pet), ConfigError);
  CHECK_THROWS_AS(PoolSet::build({Method::kNLA25, 3}, pet), ConfigError);
}

TEST_CASE("pools are sorted, duplicate-free, identity-free, and searchable") {
  const Hamiltonian k4 = ham(Graph::complete_unit(4));
  const Pool p = build_pool({Method::kNLA, 2}, k4);
  REQUIRE(p.size() > 0);
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    REQUIRE(p[i] < p[i + 1]);  // strictly increasing: sorted and duplicate-free
  }
  for (const PauliString& s : p) {
    REQUIRE_FALSE(s.is_identity());
    REQUIRE(p.contains(s));
  }
  CHECK_FALSE(p.contains(PauliString::parse("XXXX")));  // weight 4 not in D2
}

TEST_CASE("closed-form scaling estimates bound the exact pool sizes") {
  const Hamiltonian pet = ham(Graph::petersen());
  const int n = pet.n_qubits();
  const auto nla2 = qitesim::pool_size_scaling({Method::kNLA, 2}, n, pet.n_terms());
  CHECK(nla2.linear_system_size >= 435.0);
  CHECK(nla2.linear_system_size == 16.0 * qitesim::binomial(10, 2));
  const auto nla3 = qitesim::pool_size_scaling({Method::kNLA, 3}, n, pet.n_terms());
  CHECK(nla3.linear_system_size >= 3675.0);
  const auto ela3 = qitesim::pool_size_scaling({Method::kELA, 3}, n, pet.n_terms());
  CHECK(ela3.linear_system_size >= 207.0);
  const auto mid = qitesim::pool_size_scaling({Method::kNLA25, std::nullopt}, n,
                                              pet.n_terms());
  CHECK(mid.linear_system_size >= 1245.0);
  const auto la = qitesim::pool_size_scaling({Method::kLA, 6}, n, pet.n_terms());
  CHECK(la.linear_system_size == 4096.0);
  CHECK(la.linear_system_size >= 4095.0);
  CHECK(la.gate_ops_per_qubit == 4096.0 * 15 * 6 / 10);
  CHECK_THROWS_AS(qitesim::pool_size_scaling({Method::kELA, std::nullopt}, n, 15),
                  ConfigError);
  CHECK_THROWS_AS(qitesim::pool_size_scaling({Method::kNLA, 2}, 0, 15), ConfigError);
}

TEST_CASE("binomial coefficients match Pascal recursion") {
  CHECK(qitesim::binomial(10, 2) == 45.0);
  CHECK(qitesim::binomial(10, 3) == 120.0);
  CHECK(qitesim::binomial(5, 0) == 1.0);
  CHECK(qitesim::binomial(5, 5) == 1.0);
  CHECK(qitesim::binomial(5, 6) == 0.0);
  CHECK(qitesim::binomial(5, -1) == 0.0);
  for (int n = 1; n < 12; ++n) {
    for (int k = 1; k < n; ++k) {
      REQUIRE(qitesim::binomial(n, k) ==
              qitesim::binomial(n - 1, k - 1) + qitesim::binomial(n - 1, k));
    }
  }
}

TEST_CASE("pool sets expose shared versus per-term access consistently") {
  const Hamiltonian k4 = ham(Graph::complete_unit(4));
  const PoolSet shared = PoolSet::build({Method::kNLA, 2}, k4);
  CHECK(shared.shared());
  CHECK(shared.n_pools() == 1);
  CHECK(&shared.for_term(0) == &shared.for_term(5));
  CHECK(&shared.shared_pool() == &shared.for_term(3));

  const PoolSet local = PoolSet::build({Method::kELA, 3}, k4);
  CHECK_FALSE(local.shared());
  CHECK(local.n_pools() == 6);
  CHECK_THROWS_AS(local.shared_pool(), ConfigError);
}

TEST_CASE("method names and labels round-trip") {
  for (Method m : {Method::kLA, Method::kELA, Method::kNLA, Method::kNLA25}) {
    CHECK(qitesim::parse_method(qitesim::method_name(m)) == m);
  }
  CHECK_THROWS_AS(qitesim::parse_method("bogus"), ConfigError);
  CHECK(DomainSpec{Method::kNLA, 2}.label() == "nla-D2");
  CHECK(DomainSpec{Method::kELA, 3}.label() == "ela-D3");
  CHECK(DomainSpec{Method::kNLA25, std::nullopt}.label() == "nla25");
  CHECK(DomainSpec{Method::kLA, std::nullopt}.label() == "la");
}
