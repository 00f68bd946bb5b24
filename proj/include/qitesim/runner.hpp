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

#ifndef QITESIM_RUNNER_HPP_
#define QITESIM_RUNNER_HPP_

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qitesim/circuit.hpp"
#include "qitesim/errors.hpp"
#include "qitesim/hamiltonian.hpp"
#include "qitesim/noise.hpp"
#include "qitesim/pauli.hpp"
#include "qitesim/pools.hpp"
#include "qitesim/qite.hpp"
#include "qitesim/statevec.hpp"

namespace qitesim {

/// Everything a driver invocation needs, loadable from a flat JSON config
/// file with command-line overrides layered on top.
struct RunConfig {
  std::string graph = "petersen";
  std::uint64_t seed = 1;  // feeds the seeded graph generators
  std::string method = "nla";
  std::optional<int> domain_size;
  double dtau = 0.01;
  int n_steps = 100;
  double ridge = 1e-8;
  bool compress = false;
  bool reuse_gram = false;
  bool aggregate_terms = false;
  bool record_coefficients = false;
  bool early_stop = false;
  bool force_general = false;
  bool exact_update = false;
  std::string out = "out";
  bool dump_pool = false;
  bool dump_state = false;
  bool dump_circuits = false;
  NoiseModel noise;

  RunOptions options() const {
    RunOptions o;
    o.dtau = dtau;
    o.n_steps = n_steps;
    o.ridge = ridge;
    o.compress = compress;
    o.reuse_gram = reuse_gram;
    o.aggregate_terms = aggregate_terms;
    o.record_coefficients = record_coefficients || dump_circuits;
    o.force_general = force_general;
    o.exact_update = exact_update;
    o.early_stop = early_stop;
    return o;
  }

  DomainSpec domain_spec() const { return DomainSpec{parse_method(method), domain_size}; }
};

/// Applies one parsed JSON object onto a config; unknown keys are
/// rejected so typos fail loudly instead of silently running defaults.
inline void apply_config_json(RunConfig& cfg, const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "graph") {
        cfg.graph = value.get<std::string>();
      } else if (key == "seed") {
        cfg.seed = value.get<std::uint64_t>();
      } else if (key == "method") {
        cfg.method = value.get<std::string>();
      } else if (key == "domain_size") {
        if (value.is_null()) {
          cfg.domain_size.reset();
        } else {
          cfg.domain_size = value.get<int>();
        }
      } else if (key == "dtau") {
        cfg.dtau = value.get<double>();
      } else if (key == "n_steps") {
        cfg.n_steps = value.get<int>();
      } else if (key == "ridge") {
        cfg.ridge = value.get<double>();
      } else if (key == "compress") {
        cfg.compress = value.get<bool>();
      } else if (key == "reuse_gram") {
        cfg.reuse_gram = value.get<bool>();
      } else if (key == "aggregate_terms") {
        cfg.aggregate_terms = value.get<bool>();
      } else if (key == "record_coefficients") {
        cfg.record_coefficients = value.get<bool>();
      } else if (key == "early_stop") {
        cfg.early_stop = value.get<bool>();
      } else if (key == "force_general") {
        cfg.force_general = value.get<bool>();
      } else if (key == "exact_update") {
        cfg.exact_update = value.get<bool>();
      } else if (key == "out") {
        cfg.out = value.get<std::string>();
      } else if (key == "dump_pool") {
        cfg.dump_pool = value.get<bool>();
      } else if (key == "dump_state") {
        cfg.dump_state = value.get<bool>();
      } else if (key == "dump_circuits") {
        cfg.dump_circuits = value.get<bool>();
      } else if (key == "t1_us") {
        cfg.noise.t1_us = value.get<double>();
      } else if (key == "t2_us") {
        cfg.noise.t2_us = value.get<double>();
      } else if (key == "tg1_ns") {
        cfg.noise.tg1_ns = value.get<double>();
      } else if (key == "tg2_ns") {
        cfg.noise.tg2_ns = value.get<double>();
      } else if (key == "p00") {
        cfg.noise.p00 = value.get<double>();
      } else if (key == "p01") {
        cfg.noise.p01 = value.get<double>();
      } else if (key == "p10") {
        cfg.noise.p10 = value.get<double>();
      } else if (key == "p11") {
        cfg.noise.p11 = value.get<double>();
      } else {
        throw ConfigError("config: unknown key '" + key + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("config: bad value for '" + key + "': " + e.what());
    }
  }
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config: parse failure in '" + path + "': " + e.what());
  }
  RunConfig cfg;
  apply_config_json(cfg, j);
  return cfg;
}

/// Graph tokens: petersen | k<N> | c<N> | complete:<N> | rand3:<N> | a
/// file path in the plain edge-list format.  k4/c4 are the fixed
/// benchmarks; complete:<N> draws seeded uniform weights.
inline Graph make_graph(const std::string& token, std::uint64_t seed) {
  auto parse_int = [&](const std::string& s, const char* what) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ConfigError(std::string("graph token: bad ") + what + " in '" + token + "'");
    }
  };
  if (token == "petersen") return Graph::petersen();
  if (token.rfind("complete:", 0) == 0) {
    return Graph::complete_weighted(parse_int(token.substr(9), "vertex count"), seed);
  }
  if (token.rfind("rand3:", 0) == 0) {
    return Graph::random_3_regular(parse_int(token.substr(6), "vertex count"), seed);
  }
  if (token.size() >= 2 && (token[0] == 'k' || token[0] == 'c') &&
      std::isdigit(static_cast<unsigned char>(token[1]))) {
    const int n = parse_int(token.substr(1), "vertex count");
    return token[0] == 'k' ? Graph::complete_unit(n) : Graph::cycle_unit(n);
  }
  std::ifstream in(token);
  if (!in) {
    throw ConfigError("graph: '" + token +
                      "' is neither a recognized token nor a readable file");
  }
  return Graph::parse(in);
}

// ---------------------------------------------------------------------------
// Deterministic writers
// ---------------------------------------------------------------------------

namespace run_detail {

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::ofstream open_out(const std::filesystem::path& dir, const std::string& name) {
  std::ofstream os(dir / name);
  if (!os) throw ConfigError("cannot write output file '" + (dir / name).string() + "'");
  return os;
}

inline std::string bitstring(std::uint64_t index, int n) {
  std::string s(static_cast<std::size_t>(n), '0');
  for (int q = 0; q < n; ++q) {
    if ((index >> (n - 1 - q)) & 1u) s[static_cast<std::size_t>(q)] = '1';
  }
  return s;
}

}  // namespace run_detail

inline void write_trajectory_csv(const Trajectory& t, std::ostream& os) {
  os << "tau,energy,r\n";
  for (const StepRecord& s : t.steps) {
    os << run_detail::fmt(s.tau) << ',' << run_detail::fmt(s.energy) << ','
       << run_detail::fmt(s.r) << "\n";
  }
}

/// Level-resolved occupation over the trajectory, long format.
inline void write_level_weights_csv(const Trajectory& t, std::ostream& os) {
  os << "tau,level_energy,weight\n";
  for (const StepRecord& s : t.steps) {
    for (std::size_t l = 0; l < t.levels.size(); ++l) {
      os << run_detail::fmt(s.tau) << ',' << run_detail::fmt(t.levels[l]) << ','
         << run_detail::fmt(s.level_weights[l]) << "\n";
    }
  }
}

inline void write_blocks_csv(const Trajectory& t, std::ostream& os) {
  os << "block,start_step,end_step,n_comp\n";
  for (std::size_t i = 0; i < t.blocks.size(); ++i) {
    const CompressionBlock& b = t.blocks[i];
    os << i << ',' << b.start_step << ',' << b.end_step << ',' << b.n_comp() << "\n";
  }
}

inline void write_resources_csv(const StepResources& r, std::ostream& os) {
  os << "n_bit,method,domain,n_operators,gate_count,depth,system_size_bound,gate_ops_"
        "per_qubit_bound\n";
  os << r.n_bit << ',' << r.method << ',' << run_detail::fmt(r.domain) << ','
     << r.n_operators << ',' << r.gate_count << ',' << r.depth << ','
     << run_detail::fmt(r.system_size_bound) << ','
     << run_detail::fmt(r.gate_ops_per_qubit_bound) << "\n";
}

inline void write_replay_csv(const ReplayResult& r, std::ostream& os) {
  os << "circuits,gates,depth,energy_ideal,energy_noisy,purity\n";
  for (const ReplayPoint& p : r.points) {
    os << p.circuits_applied << ',' << p.gates << ',' << p.depth << ','
       << run_detail::fmt(p.energy_ideal) << ',' << run_detail::fmt(p.energy_noisy) << ','
       << run_detail::fmt(p.purity) << "\n";
  }
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

namespace run_detail {

struct Session {
  Graph graph;
  Hamiltonian ham;
  DomainSpec spec;
  PoolSet pools;
  Spectrum spectrum;
};

inline Session open_session(const RunConfig& cfg) {
  Graph g = make_graph(cfg.graph, cfg.seed);
  Hamiltonian h = Hamiltonian::maxcut(g);
  if (h.n_terms() == 0) throw ConfigError("graph has no edges; nothing to optimize");
  if (h.n_qubits() > StateVector::kMaxQubits) {
    throw CapacityError("graph needs " + std::to_string(h.n_qubits()) +
                        " qubits; the dense simulator caps at " +
                        std::to_string(StateVector::kMaxQubits));
  }
  const DomainSpec spec = cfg.domain_spec();
  PoolSet pools = PoolSet::build(spec, h);
  Spectrum sp = Spectrum::brute_force(h);
  return Session{std::move(g), std::move(h), spec, std::move(pools), std::move(sp)};
}

inline void dump_pools(const Session& ses, const std::filesystem::path& dir) {
  std::ofstream os = open_out(dir, "pool.txt");
  if (ses.pools.shared()) {
    ses.pools.shared_pool().dump(os);
    return;
  }
  for (int m = 0; m < ses.ham.n_terms(); ++m) {
    os << "# term " << m << ": "
       << ses.ham.terms()[static_cast<std::size_t>(m)].string.str() << "\n";
    ses.pools.for_term(m).dump(os);
  }
}

inline nlohmann::json base_summary(const RunConfig& cfg, const Session& ses) {
  nlohmann::json j;
  j["graph"] = cfg.graph;
  j["seed"] = cfg.seed;
  j["n_qubits"] = ses.ham.n_qubits();
  j["n_terms"] = ses.ham.n_terms();
  j["method"] = ses.spec.label();
  j["ground_energy"] = ses.spectrum.ground_energy;
  j["n_ground_states"] = ses.spectrum.ground_states.size();
  std::size_t pmin = ses.pools.for_term(0).size(), pmax = pmin, ptotal = 0;
  for (int m = 0; m < ses.pools.n_pools(); ++m) {
    const std::size_t s = ses.pools.for_term(m).size();
    pmin = std::min(pmin, s);
    pmax = std::max(pmax, s);
    ptotal += s;
  }
  j["pool_size_min"] = pmin;
  j["pool_size_max"] = pmax;
  j["pool_size_total"] = ptotal;
  j["pool_shared"] = ses.pools.shared();
  return j;
}

inline void fill_run_summary(nlohmann::json& j, const RunConfig& cfg,
                             const RunResult& res) {
  j["dtau"] = cfg.dtau;
  j["n_steps_requested"] = cfg.n_steps;
  j["n_steps_done"] = res.trajectory.steps.size() - 1;
  j["ridge"] = cfg.ridge;
  j["compress"] = cfg.compress;
  j["reuse_gram"] = cfg.reuse_gram;
  j["aggregate_terms"] = cfg.aggregate_terms;
  j["final_tau"] = res.trajectory.final_record().tau;
  j["final_energy"] = res.trajectory.final_record().energy;
  j["final_r"] = res.trajectory.final_record().r;
  if (cfg.compress) {
    j["n_blocks"] = res.trajectory.blocks.size();
    nlohmann::json blocks = nlohmann::json::array();
    for (const CompressionBlock& b : res.trajectory.blocks) {
      blocks.push_back({b.start_step, b.end_step});
    }
    j["blocks"] = std::move(blocks);
  }
  nlohmann::json residuals = nlohmann::json::array();
  for (const StepRecord& s : res.trajectory.steps) {
    nlohmann::json row = nlohmann::json::array();
    for (const StepSolve& sv : s.solves) row.push_back(sv.residual);
    residuals.push_back(std::move(row));
  }
  j["residuals"] = std::move(residuals);
}

}  // namespace run_detail

/// `run`: full trajectory; writes trajectory.csv, spectrum.csv and
/// summary.json (plus the optional dumps) under cfg.out.
inline void cmd_run(const RunConfig& cfg) {
  namespace rd = run_detail;
  const rd::Session ses = rd::open_session(cfg);
  const std::filesystem::path dir(cfg.out);
  std::filesystem::create_directories(dir);

  const RunResult res = run(ses.ham, ses.pools, cfg.options(), &ses.spectrum);

  {
    std::ofstream os = rd::open_out(dir, "trajectory.csv");
    write_trajectory_csv(res.trajectory, os);
  }
  {
    std::ofstream os = rd::open_out(dir, "spectrum.csv");
    write_level_weights_csv(res.trajectory, os);
  }
  if (cfg.compress) {
    std::ofstream os = rd::open_out(dir, "blocks.csv");
    write_blocks_csv(res.trajectory, os);
  }
  if (cfg.dump_pool) rd::dump_pools(ses, dir);
  if (cfg.dump_state) {
    std::ofstream os = rd::open_out(dir, "state.csv");
    res.final_state.dump_csv(os);
  }
  if (cfg.dump_circuits) {
    const std::vector<Circuit> circuits =
        trajectory_circuits(res.trajectory, ses.pools, ses.ham.n_qubits());
    std::ofstream os = rd::open_out(dir, "circuits.txt");
    for (std::size_t i = 0; i < circuits.size(); ++i) {
      os << "# circuit " << i << " depth " << circuits[i].depth() << "\n";
      circuits[i].dump(os);
    }
  }
  nlohmann::json j = rd::base_summary(cfg, ses);
  rd::fill_run_summary(j, cfg, res);
  std::ofstream os = rd::open_out(dir, "summary.json");
  os << j.dump(2) << "\n";
}

/// `depth`: per-step resource counts without running the evolution;
/// writes resources.csv.
inline void cmd_depth(const RunConfig& cfg) {
  namespace rd = run_detail;
  const rd::Session ses = rd::open_session(cfg);
  const std::filesystem::path dir(cfg.out);
  std::filesystem::create_directories(dir);
  const StepResources r = step_resources(ses.ham, ses.spec, ses.pools);
  std::ofstream os = rd::open_out(dir, "resources.csv");
  write_resources_csv(r, os);
  if (cfg.dump_pool) rd::dump_pools(ses, dir);
}

/// `spectrum`: exhaustive diagonalization only; writes levels.csv,
/// ground.csv and summary.json.
inline void cmd_spectrum(const RunConfig& cfg) {
  namespace rd = run_detail;
  Graph g = make_graph(cfg.graph, cfg.seed);
  Hamiltonian h = Hamiltonian::maxcut(g);
  const Spectrum sp = Spectrum::brute_force(h);
  const std::filesystem::path dir(cfg.out);
  std::filesystem::create_directories(dir);
  {
    std::ofstream os = rd::open_out(dir, "levels.csv");
    os << "energy,degeneracy\n";
    for (const Level& l : energy_levels(sp)) {
      os << rd::fmt(l.energy) << ',' << l.degeneracy << "\n";
    }
  }
  {
    std::ofstream os = rd::open_out(dir, "ground.csv");
    os << "index,bitstring,energy\n";
    for (const std::uint64_t x : sp.ground_states) {
      os << x << ',' << rd::bitstring(x, h.n_qubits()) << ','
         << rd::fmt(sp.energies[x]) << "\n";
    }
  }
  nlohmann::json j;
  j["graph"] = cfg.graph;
  j["seed"] = cfg.seed;
  j["n_qubits"] = h.n_qubits();
  j["n_terms"] = h.n_terms();
  j["constant"] = h.constant();
  j["ground_energy"] = sp.ground_energy;
  j["n_ground_states"] = sp.ground_states.size();
  j["n_levels"] = energy_levels(sp).size();
  j["max_cut"] = -sp.ground_energy;
  std::ofstream os = rd::open_out(dir, "summary.json");
  os << j.dump(2) << "\n";
}

/// `noise-run`: run, compile the step (or block) circuits, replay them
/// through the hardware error model; writes trajectory.csv,
/// trajectory_noisy.csv and summary.json.
inline void cmd_noise_run(const RunConfig& cfg) {
  namespace rd = run_detail;
  cfg.noise.validate();
  const rd::Session ses = rd::open_session(cfg);
  if (ses.ham.n_qubits() > DensityMatrix::kMaxQubits) {
    throw CapacityError("noisy replay caps at " + std::to_string(DensityMatrix::kMaxQubits) +
                        " qubits; graph needs " + std::to_string(ses.ham.n_qubits()));
  }
  const std::filesystem::path dir(cfg.out);
  std::filesystem::create_directories(dir);

  RunOptions opts = cfg.options();
  opts.record_coefficients = true;  // circuits are compiled from the coefficients
  const RunResult res = run(ses.ham, ses.pools, opts, &ses.spectrum);
  const std::vector<Circuit> circuits =
      trajectory_circuits(res.trajectory, ses.pools, ses.ham.n_qubits());
  const ReplayResult rep = replay(circuits, ses.ham, cfg.noise);

  {
    std::ofstream os = rd::open_out(dir, "trajectory.csv");
    write_trajectory_csv(res.trajectory, os);
  }
  {
    std::ofstream os = rd::open_out(dir, "trajectory_noisy.csv");
    write_replay_csv(rep, os);
  }
  if (cfg.compress) {
    std::ofstream os = rd::open_out(dir, "blocks.csv");
    write_blocks_csv(res.trajectory, os);
  }
  if (cfg.dump_circuits) {
    std::ofstream os = rd::open_out(dir, "circuits.txt");
    for (std::size_t i = 0; i < circuits.size(); ++i) {
      os << "# circuit " << i << " depth " << circuits[i].depth() << "\n";
      circuits[i].dump(os);
    }
  }
  nlohmann::json j = rd::base_summary(cfg, ses);
  rd::fill_run_summary(j, cfg, res);
  j["n_circuits"] = circuits.size();
  j["total_gates"] = rep.final_point().gates;
  j["total_depth"] = rep.final_point().depth;
  j["final_energy_ideal_replay"] = rep.final_point().energy_ideal;
  j["final_energy_noisy"] = rep.final_point().energy_noisy;
  j["final_purity"] = rep.final_point().purity;
  j["t1_us"] = cfg.noise.t1_us;
  j["t2_us"] = cfg.noise.t2_us;
  j["tg1_ns"] = cfg.noise.tg1_ns;
  j["tg2_ns"] = cfg.noise.tg2_ns;
  std::ofstream os = rd::open_out(dir, "summary.json");
  os << j.dump(2) << "\n";
}

}  // namespace qitesim

#endif  // QITESIM_RUNNER_HPP_
