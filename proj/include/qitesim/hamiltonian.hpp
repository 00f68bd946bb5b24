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

#ifndef QITESIM_HAMILTONIAN_HPP_
#define QITESIM_HAMILTONIAN_HPP_

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qitesim/errors.hpp"
#include "qitesim/pauli.hpp"
#include "qitesim/statevec.hpp"

namespace qitesim {

struct Edge {
  int u;
  int v;
  double weight;
};

/// Undirected weighted graph with positive edge weights.  Edge order is
/// preserved: Hamiltonian terms, and therefore the product-formula sweep
/// order, follow the edge list.
class Graph {
 public:
  Graph(int n_vertices, std::vector<Edge> edges)
      : n_(n_vertices), edges_(std::move(edges)) {
    if (n_ < 1) throw ConfigError("Graph: need at least one vertex");
    std::set<std::pair<int, int>> seen;
    for (const Edge& e : edges_) {
      if (e.u < 0 || e.u >= n_ || e.v < 0 || e.v >= n_) {
        throw ConfigError("Graph: edge endpoint out of range");
      }
      if (e.u == e.v) throw ConfigError("Graph: self-loops are not allowed");
      if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
        throw ConfigError("Graph: edge weights must be positive and finite");
      }
      if (!seen.insert(std::minmax(e.u, e.v)).second) {
        throw ConfigError("Graph: duplicate edge " + std::to_string(e.u) + "-" +
                          std::to_string(e.v));
      }
    }
  }

  int n_vertices() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }

  std::vector<int> degrees() const {
    std::vector<int> d(static_cast<std::size_t>(n_), 0);
    for (const Edge& e : edges_) {
      ++d[static_cast<std::size_t>(e.u)];
      ++d[static_cast<std::size_t>(e.v)];
    }
    return d;
  }

  /// Parses the plain text format:
  ///   n <n_vertices>
  ///   i j [weight]
  /// one edge per line, weight defaulting to 1.  Blank lines and lines
  /// starting with '#' are skipped.
  static Graph parse(std::istream& in) {
    std::string line;
    int n = -1;
    std::vector<Edge> edges;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#') continue;
      std::istringstream ls(line);
      if (n < 0) {
        std::string tag;
        ls >> tag >> n;
        if (tag != "n" || ls.fail() || n < 1) {
          throw ConfigError("Graph::parse: expected header 'n <n_vertices>' at line " +
                            std::to_string(lineno));
        }
        continue;
      }
      int u, v;
      ls >> u >> v;
      if (ls.fail()) {
        throw ConfigError("Graph::parse: malformed edge at line " +
                          std::to_string(lineno));
      }
      double w = 1.0;
      if (!(ls >> w)) w = 1.0;
      edges.push_back(Edge{u, v, w});
    }
    if (n < 1) throw ConfigError("Graph::parse: missing 'n <n_vertices>' header");
    return Graph(n, std::move(edges));
  }

  /// The Petersen graph: outer 5-cycle, inner pentagram, five spokes.
  /// 3-regular, triangle-free, and the stock 10-vertex reference instance.
  static Graph petersen() {
    std::vector<Edge> edges;
    for (int i = 0; i < 5; ++i) edges.push_back(Edge{i, (i + 1) % 5, 1.0});
    for (int i = 0; i < 5; ++i) edges.push_back(Edge{i, i + 5, 1.0});
    for (int i = 0; i < 5; ++i) edges.push_back(Edge{5 + i, 5 + (i + 2) % 5, 1.0});
    return Graph(10, std::move(edges));
  }

  /// Complete graph with unit weights (k4 is the 4-vertex benchmark).
  static Graph complete_unit(int n) {
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) edges.push_back(Edge{i, j, 1.0});
    }
    return Graph(n, std::move(edges));
  }

  /// Cycle 0-1-...-(n-1)-0 with unit weights (c4 alternative benchmark).
  static Graph cycle_unit(int n) {
    if (n < 3) throw ConfigError("Graph::cycle_unit: need at least 3 vertices");
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i) edges.push_back(Edge{i, (i + 1) % n, 1.0});
    return Graph(n, std::move(edges));
  }

  /// Complete graph with i.i.d. uniform(0,1) weights drawn from a seeded
  /// generator; the (seed, n) pair fully determines the instance.
  static Graph complete_weighted(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        double w = 0.0;
        while (w == 0.0) w = canonical_double(rng);
        edges.push_back(Edge{i, j, w});
      }
    }
    return Graph(n, std::move(edges));
  }

  /// Uniform random simple 3-regular graph via the pairing model: three
  /// stubs per vertex are shuffled and paired; drawings with self-loops or
  /// repeated edges are rejected wholesale and redrawn.
  static Graph random_3_regular(int n, std::uint64_t seed) {
    if (n < 4 || n % 2 != 0) {
      throw ConfigError("random_3_regular: vertex count must be even and >= 4");
    }
    std::mt19937_64 rng(seed);
    std::vector<int> stubs(static_cast<std::size_t>(3 * n));
    for (int i = 0; i < 3 * n; ++i) stubs[static_cast<std::size_t>(i)] = i / 3;
    constexpr int kMaxAttempts = 100000;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
      std::shuffle(stubs.begin(), stubs.end(), rng);
      std::set<std::pair<int, int>> seen;
      bool ok = true;
      for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
        const auto e = std::minmax(stubs[i], stubs[i + 1]);
        if (e.first == e.second || !seen.insert(e).second) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      std::vector<Edge> edges;
      for (const auto& [u, v] : seen) edges.push_back(Edge{u, v, 1.0});
      return Graph(n, std::move(edges));
    }
    throw NumericError("random_3_regular: pairing model failed to produce a simple graph");
  }

  static double canonical_double(std::mt19937_64& rng) {
    // 53 uniform bits -> [0, 1); identical across standard libraries.
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
  }

 private:
  int n_;
  std::vector<Edge> edges_;
};

struct HamTerm {
  double coeff;
  PauliString string;
};

/// Diagonal Hamiltonian: a constant offset plus weighted Z-type Pauli
/// strings.  For max-cut instances every term is a two-qubit ZZ string.
class Hamiltonian {
 public:
  Hamiltonian(int n_qubits, double constant, std::vector<HamTerm> terms)
      : n_(n_qubits), constant_(constant), terms_(std::move(terms)) {
    for (const HamTerm& t : terms_) {
      if (t.string.n_qubits() != n_) {
        throw ConfigError("Hamiltonian: term register size mismatch");
      }
      if (t.string.x_mask() != 0) {
        throw ConfigError("Hamiltonian: only diagonal (Z-type) terms are supported");
      }
      if (t.string.is_identity()) {
        throw ConfigError("Hamiltonian: identity terms belong in the constant");
      }
      if (!std::isfinite(t.coeff)) {
        throw ConfigError("Hamiltonian: non-finite coefficient");
      }
    }
  }

  /// Cut Hamiltonian H = -sum_{(i,j)} w_ij (1 - Z_i Z_j) / 2, split per
  /// edge into a constant -w/2 and a term +w/2 Z_i Z_j.  Minimizing H is
  /// finding the maximum cut; E(x) = -cut(x) for every bitstring x.
  static Hamiltonian maxcut(const Graph& g) {
    if (g.n_vertices() > PauliString::kMaxQubits) {
      throw CapacityError("maxcut: graph exceeds the qubit cap");
    }
    double constant = 0.0;
    std::vector<HamTerm> terms;
    for (const Edge& e : g.edges()) {
      constant -= 0.5 * e.weight;
      const std::uint64_t zm = PauliString::bit(e.u) | PauliString::bit(e.v);
      terms.push_back(HamTerm{0.5 * e.weight, PauliString(g.n_vertices(), 0u, zm)});
    }
    return Hamiltonian(g.n_vertices(), constant, std::move(terms));
  }

  int n_qubits() const { return n_; }
  double constant() const { return constant_; }
  const std::vector<HamTerm>& terms() const { return terms_; }
  int n_terms() const { return static_cast<int>(terms_.size()); }

  /// E(x) for one basis index (qubit 0 = most significant bit).
  double energy_of_basis_state(std::uint64_t index) const {
    double e = constant_;
    for (const HamTerm& t : terms_) {
      std::uint64_t zm_index = 0;
      std::uint64_t zm = t.string.z_mask();
      while (zm) {
        const int q = std::countr_zero(zm);
        zm &= zm - 1;
        zm_index |= std::uint64_t{1} << (n_ - 1 - q);
      }
      e += (std::popcount(index & zm_index) & 1) ? -t.coeff : t.coeff;
    }
    return e;
  }

  /// <H> by summing term expectation values on a state.  The driver
  /// normally evaluates energies through the diagonal table instead; the
  /// two routes agreeing is a correctness invariant.
  double expectation(const StateVector& s) const {
    double e = constant_;
    for (const HamTerm& t : terms_) {
      e += t.coeff * std::real(s.expectation(t.string));
    }
    return e;
  }

 private:
  int n_;
  double constant_;
  std::vector<HamTerm> terms_;
};

/// Exhaustive diagonalization of a diagonal Hamiltonian: per-basis-state
/// energies plus the ground data.
struct Spectrum {
  static constexpr int kMaxQubits = 24;

  std::vector<double> energies;          // indexed by basis state
  double ground_energy = 0.0;
  std::vector<std::uint64_t> ground_states;  // argmin set, tolerance 1e-9

  static Spectrum brute_force(const Hamiltonian& h) {
    if (h.n_qubits() > kMaxQubits) {
      throw CapacityError("Spectrum::brute_force: " + std::to_string(h.n_qubits()) +
                          " qubits exceeds the enumeration cap of " +
                          std::to_string(kMaxQubits));
    }
    const std::uint64_t dim = std::uint64_t{1} << h.n_qubits();
    Spectrum spec;
    spec.energies.resize(dim);
    // Precompute index-space Z masks once; the inner loop is pure popcount.
    std::vector<std::pair<std::uint64_t, double>> zmasks;
    for (const HamTerm& t : h.terms()) {
      std::uint64_t zm_index = 0;
      std::uint64_t zm = t.string.z_mask();
      while (zm) {
        const int q = std::countr_zero(zm);
        zm &= zm - 1;
        zm_index |= std::uint64_t{1} << (h.n_qubits() - 1 - q);
      }
      zmasks.emplace_back(zm_index, t.coeff);
    }
    double best = std::numeric_limits<double>::infinity();
    for (std::uint64_t x = 0; x < dim; ++x) {
      double e = h.constant();
      for (const auto& [zm, c] : zmasks) {
        e += (std::popcount(x & zm) & 1) ? -c : c;
      }
      spec.energies[x] = e;
      best = std::min(best, e);
    }
    spec.ground_energy = best;
    for (std::uint64_t x = 0; x < dim; ++x) {
      if (spec.energies[x] <= best + 1e-9) spec.ground_states.push_back(x);
    }
    return spec;
  }
};

/// Distinct energy level with its degeneracy count.
struct Level {
  double energy;
  std::uint64_t degeneracy;
};

/// Sorted distinct levels; energies closer than `tol` are merged.
inline std::vector<Level> energy_levels(const Spectrum& spec, double tol = 1e-9) {
  std::vector<double> sorted = spec.energies;
  std::sort(sorted.begin(), sorted.end());
  std::vector<Level> levels;
  for (const double e : sorted) {
    if (levels.empty() || e > levels.back().energy + tol) {
      levels.push_back(Level{e, 1});
    } else {
      ++levels.back().degeneracy;
    }
  }
  return levels;
}

/// Weight of the state on each distinct energy level: pairs (E, n(E))
/// sorted by energy, with the weights summing to one for a unit state.
inline std::vector<std::pair<double, double>> spectral_decomposition(
    const StateVector& s, const Spectrum& spec, double tol = 1e-9) {
  if (spec.energies.size() != s.size()) {
    throw ConfigError("spectral_decomposition: spectrum does not match state size");
  }
  const std::vector<Level> levels = energy_levels(spec, tol);
  std::vector<std::pair<double, double>> out;
  out.reserve(levels.size());
  for (const Level& l : levels) out.emplace_back(l.energy, 0.0);
  for (std::uint64_t x = 0; x < s.size(); ++x) {
    const double e = spec.energies[x];
    // Levels are sorted; locate the bucket by binary search.
    const auto it = std::lower_bound(
        out.begin(), out.end(), e - tol,
        [](const std::pair<double, double>& p, double v) { return p.first < v; });
    it->second += std::norm(s.amp(x));
  }
  return out;
}

enum class GraphKind { kPetersen, kK4, kC4, kComplete, kRandom3Regular };

/// Named generator used by the drivers; `n` and `seed` are ignored by the
/// fixed fixtures.
inline Graph generate_graph(GraphKind kind, int n = 0, std::uint64_t seed = 1) {
  switch (kind) {
    case GraphKind::kPetersen:
      return Graph::petersen();
    case GraphKind::kK4:
      return Graph::complete_unit(4);
    case GraphKind::kC4:
      return Graph::cycle_unit(4);
    case GraphKind::kComplete:
      return Graph::complete_weighted(n, seed);
    case GraphKind::kRandom3Regular:
      return Graph::random_3_regular(n, seed);
  }
  throw ConfigError("generate_graph: unknown kind");
}

}  // namespace qitesim

#endif  // QITESIM_HAMILTONIAN_HPP_
