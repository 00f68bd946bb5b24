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

#ifndef QITESIM_POOLS_HPP_
#define QITESIM_POOLS_HPP_

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "qitesim/errors.hpp"
#include "qitesim/hamiltonian.hpp"
#include "qitesim/pauli.hpp"

namespace qitesim {

/// Unitarization pool flavors.
///
///   kLA    - per-term pool over the full interaction domain of the term;
///            the domain size is forced to k + |interaction set|.
///   kELA   - per-term pool over the term support extended by every
///            (D - k)-subset of its interaction set.
///   kNLA   - one shared pool of all strings of weight 1..D on the whole
///            register.
///   kNLA25 - shared union of the D=2 nonlocal pool with every term's
///            D=3 extended-local pool.
enum class Method { kLA, kELA, kNLA, kNLA25 };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::kLA:
      return "la";
    case Method::kELA:
      return "ela";
    case Method::kNLA:
      return "nla";
    case Method::kNLA25:
      return "nla25";
  }
  return "?";
}

inline Method parse_method(const std::string& name) {
  if (name == "la") return Method::kLA;
  if (name == "ela") return Method::kELA;
  if (name == "nla") return Method::kNLA;
  if (name == "nla25") return Method::kNLA25;
  throw ConfigError("unknown method '" + name + "' (expected la, ela, nla or nla25)");
}

/// Method plus the requested domain size.  LA derives its size from each
/// term, so the domain may be omitted there; a supplied value must match
/// every term.  The 2.5 flavor has a fixed built-in shape and takes no
/// domain size at all.
struct DomainSpec {
  Method method = Method::kNLA;
  std::optional<int> domain_size;

  bool per_term() const { return method == Method::kLA || method == Method::kELA; }

  std::string label() const {
    std::string s = method_name(method);
    if (method == Method::kNLA25) return s;  // the name carries the 2.5
    if (domain_size) s += "-D" + std::to_string(*domain_size);
    return s;
  }
};

/// Qubits outside the support of term m that some other term couples to
/// the support of term m.  Sorted ascending.
inline std::vector<int> interaction_set(const Hamiltonian& h, int term) {
  if (term < 0 || term >= h.n_terms()) {
    throw ConfigError("interaction_set: term index out of range");
  }
  const std::uint64_t supp = h.terms()[static_cast<std::size_t>(term)].string.z_mask() |
                             h.terms()[static_cast<std::size_t>(term)].string.x_mask();
  std::uint64_t acc = 0;
  for (int m = 0; m < h.n_terms(); ++m) {
    if (m == term) continue;
    const PauliString& s = h.terms()[static_cast<std::size_t>(m)].string;
    const std::uint64_t other = s.z_mask() | s.x_mask();
    if (other & supp) acc |= other & ~supp;
  }
  std::vector<int> out;
  while (acc) {
    out.push_back(std::countr_zero(acc));
    acc &= acc - 1;
  }
  return out;
}

/// A duplicate-free, identity-free set of Pauli strings in canonical mask
/// order.  The order is load-bearing: rotation products are applied in it.
class Pool {
 public:
  Pool() = default;

  static Pool from_set(int n_qubits, const std::set<PauliString>& strings) {
    Pool p;
    p.n_qubits_ = n_qubits;
    p.strings_.assign(strings.begin(), strings.end());
    return p;
  }

  int n_qubits() const { return n_qubits_; }
  std::size_t size() const { return strings_.size(); }
  const PauliString& operator[](std::size_t i) const { return strings_[i]; }
  const std::vector<PauliString>& strings() const { return strings_; }
  auto begin() const { return strings_.begin(); }
  auto end() const { return strings_.end(); }

  bool contains(const PauliString& s) const {
    return std::binary_search(strings_.begin(), strings_.end(), s);
  }

  /// One string per line, canonical order.
  void dump(std::ostream& os) const {
    for (const PauliString& s : strings_) os << s.str() << "\n";
  }

 private:
  int n_qubits_ = 0;
  std::vector<PauliString> strings_;
};

namespace pool_detail {

/// Inserts all 4^|qubits| - 1 non-identity strings supported inside the
/// given qubit set.
inline void add_all_strings_on(int n_qubits, const std::vector<int>& qubits,
                               std::set<PauliString>& out) {
  const int d = static_cast<int>(qubits.size());
  const std::uint64_t count = std::uint64_t{1} << (2 * d);  // 4^d letter codes
  for (std::uint64_t code = 1; code < count; ++code) {
    std::uint64_t x = 0, z = 0;
    std::uint64_t c = code;
    for (int i = 0; i < d; ++i) {
      const std::uint64_t letter = c & 3u;  // 0=I 1=X 2=Y 3=Z
      c >>= 2;
      const std::uint64_t qb = PauliString::bit(qubits[static_cast<std::size_t>(i)]);
      if (letter == 1 || letter == 2) x |= qb;
      if (letter == 2 || letter == 3) z |= qb;
    }
    out.insert(PauliString(n_qubits, x, z));
  }
}

/// Visits every size-k subset of `universe` (sorted input, sorted output).
template <typename Fn>
void for_each_subset(const std::vector<int>& universe, int k, Fn&& fn) {
  const int n = static_cast<int>(universe.size());
  if (k < 0 || k > n) return;
  std::vector<int> pick(static_cast<std::size_t>(k));
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  while (true) {
    for (int i = 0; i < k; ++i) {
      pick[static_cast<std::size_t>(i)] =
          universe[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
    }
    fn(pick);
    int i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) break;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) {
      idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
}

inline void add_ela_strings(const Hamiltonian& h, int term, int domain,
                            std::set<PauliString>& out) {
  const PauliString& ts = h.terms()[static_cast<std::size_t>(term)].string;
  const std::vector<int> supp = ts.support();
  const std::vector<int> inter = interaction_set(h, term);
  const int k = static_cast<int>(supp.size());
  const int n_l = static_cast<int>(inter.size());
  if (domain < k || domain > k + n_l) {
    throw ConfigError("domain size " + std::to_string(domain) + " for term " +
                      std::to_string(term) + " is outside [k, k + N_L] = [" +
                      std::to_string(k) + ", " + std::to_string(k + n_l) + "]");
  }
  for_each_subset(inter, domain - k, [&](const std::vector<int>& extra) {
    std::vector<int> qubits = supp;
    qubits.insert(qubits.end(), extra.begin(), extra.end());
    std::sort(qubits.begin(), qubits.end());
    add_all_strings_on(h.n_qubits(), qubits, out);
  });
}

inline void add_nla_strings(int n_qubits, int domain, std::set<PauliString>& out) {
  std::vector<int> all(static_cast<std::size_t>(n_qubits));
  for (int q = 0; q < n_qubits; ++q) all[static_cast<std::size_t>(q)] = q;
  for (int w = 1; w <= domain; ++w) {
    for_each_subset(all, w, [&](const std::vector<int>& qubits) {
      // Exactly weight-w strings: letters X/Y/Z on every chosen qubit.
      const int d = static_cast<int>(qubits.size());
      std::uint64_t count = 1;
      for (int i = 0; i < d; ++i) count *= 3;
      for (std::uint64_t code = 0; code < count; ++code) {
        std::uint64_t x = 0, z = 0, c = code;
        for (int i = 0; i < d; ++i) {
          const std::uint64_t letter = c % 3;  // 0=X 1=Y 2=Z
          c /= 3;
          const std::uint64_t qb = PauliString::bit(qubits[static_cast<std::size_t>(i)]);
          if (letter == 0 || letter == 1) x |= qb;
          if (letter == 1 || letter == 2) z |= qb;
        }
        out.insert(PauliString(n_qubits, x, z));
      }
    });
  }
}

}  // namespace pool_detail

/// The effective per-term domain size: k + N_L for LA (validating any
/// user-supplied value), the requested size otherwise.
inline int effective_domain(const DomainSpec& spec, const Hamiltonian& h, int term) {
  switch (spec.method) {
    case Method::kLA: {
      // Only this flavor is defined relative to one term's neighborhood.
      if (term < 0 || term >= h.n_terms()) {
        throw ConfigError("la: term index out of range");
      }
      const PauliString& ts = h.terms()[static_cast<std::size_t>(term)].string;
      const int k = ts.weight();
      const int n_l = static_cast<int>(interaction_set(h, term).size());
      const int forced = k + n_l;
      if (spec.domain_size && *spec.domain_size != forced) {
        throw ConfigError("la: domain size is fixed at k + N_L = " +
                          std::to_string(forced) + " for term " + std::to_string(term) +
                          ", got " + std::to_string(*spec.domain_size) +
                          " (use ela for smaller domains)");
      }
      return forced;
    }
    case Method::kELA:
      if (!spec.domain_size) throw ConfigError("ela: domain size is required");
      return *spec.domain_size;  // range-checked during pool construction
    case Method::kNLA:
      if (!spec.domain_size) throw ConfigError("nla: domain size is required");
      if (*spec.domain_size < 1 || *spec.domain_size > h.n_qubits()) {
        throw ConfigError("nla: domain size must be in [1, n_qubits]");
      }
      return *spec.domain_size;
    case Method::kNLA25:
      if (spec.domain_size) {
        throw ConfigError("nla25: the domain size is built in; do not supply one");
      }
      return 3;  // largest tensor order contained in the pool
  }
  throw ConfigError("effective_domain: unknown method");
}

/// Builds the pool for one term (LA/eLA) or the shared pool (NLA flavors,
/// where `term` is ignored).
inline Pool build_pool(const DomainSpec& spec, const Hamiltonian& h, int term = 0) {
  std::set<PauliString> acc;
  switch (spec.method) {
    case Method::kLA:
      pool_detail::add_ela_strings(h, term, effective_domain(spec, h, term), acc);
      break;
    case Method::kELA:
      pool_detail::add_ela_strings(h, term, effective_domain(spec, h, term), acc);
      break;
    case Method::kNLA:
      pool_detail::add_nla_strings(h.n_qubits(), effective_domain(spec, h, 0), acc);
      break;
    case Method::kNLA25: {
      (void)effective_domain(spec, h, 0);  // rejects a supplied domain size
      pool_detail::add_nla_strings(h.n_qubits(), 2, acc);
      for (int m = 0; m < h.n_terms(); ++m) {
        const int k = h.terms()[static_cast<std::size_t>(m)].string.weight();
        const int n_l = static_cast<int>(interaction_set(h, m).size());
        // Terms whose neighborhood cannot host a third qubit fall back to
        // their largest admissible extended-local pool.
        pool_detail::add_ela_strings(h, m, std::min(3, k + n_l), acc);
      }
      break;
    }
  }
  return Pool::from_set(h.n_qubits(), acc);
}

/// All pools needed for one run: per-term pools for local flavors, one
/// shared pool otherwise.
class PoolSet {
 public:
  static PoolSet build(const DomainSpec& spec, const Hamiltonian& h) {
    PoolSet ps;
    ps.spec_ = spec;
    if (spec.per_term()) {
      for (int m = 0; m < h.n_terms(); ++m) {
        // Validate every term up front so a bad domain size fails fast.
        (void)effective_domain(spec, h, m);
      }
      for (int m = 0; m < h.n_terms(); ++m) {
        ps.pools_.push_back(build_pool(spec, h, m));
      }
    } else {
      ps.pools_.push_back(build_pool(spec, h));
    }
    return ps;
  }

  const DomainSpec& spec() const { return spec_; }
  bool shared() const { return !spec_.per_term(); }
  int n_pools() const { return static_cast<int>(pools_.size()); }

  const Pool& for_term(int m) const {
    return shared() ? pools_[0] : pools_[static_cast<std::size_t>(m)];
  }

  const Pool& shared_pool() const {
    if (!shared()) throw ConfigError("PoolSet: method has per-term pools");
    return pools_[0];
  }

 private:
  DomainSpec spec_;
  std::vector<Pool> pools_;
};

/// Closed-form scaling estimates for one imaginary-time step.
///
/// linear_system_size bounds the per-solve Gram dimension; the per-qubit
/// gate measure is the matching operator-count scaling.  LA uses 4^D and
/// 4^D * N_ham * D / N_bit.  The nonlocal flavors use 4^D C(N,D) and
/// 4^D C(N-1,D-1); those also upper-bound eLA and the 2.5 flavor (with
/// D = 3), whose exact pools are strict subsets of the D-weight pool.
struct ScalingEstimate {
  double linear_system_size;
  double gate_ops_per_qubit;
};

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double acc = 1.0;
  for (int i = 1; i <= k; ++i) acc = acc * (n - k + i) / i;
  return acc;
}

inline ScalingEstimate pool_size_scaling(const DomainSpec& spec, int n_bit, int n_ham) {
  if (n_bit < 1 || n_ham < 0) throw ConfigError("pool_size_scaling: bad register shape");
  const int d = spec.method == Method::kNLA25
                    ? 3
                    : spec.domain_size.value_or(
                          spec.method == Method::kLA ? 0 : -1);
  if (d <= 0) throw ConfigError("pool_size_scaling: domain size required");
  const double four_d = std::pow(4.0, d);
  if (spec.method == Method::kLA) {
    return ScalingEstimate{four_d, four_d * n_ham * d / n_bit};
  }
  return ScalingEstimate{four_d * binomial(n_bit, d),
                         four_d * binomial(n_bit - 1, d - 1)};
}

}  // namespace qitesim

#endif  // QITESIM_POOLS_HPP_
