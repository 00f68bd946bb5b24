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

// Command-line driver.  Subcommands:
//   run        evolve a max-cut instance and write the trajectory
//   depth      per-step gate/depth/scaling estimates without evolving
//   spectrum   exhaustive diagonalization of the cut Hamiltonian
//   noise-run  evolve, compile circuits, replay through the error model
//
// Options may come from a JSON config file (--config); explicitly passed
// flags override the file.  Exit codes: 0 success, 2 configuration
// errors, 3 numerical failures.

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qitesim/qitesim.hpp"

namespace {

using qitesim::RunConfig;

/// One subcommand's option set: values land in `flags`; `resolve()`
/// layers explicitly-set flags over the config file.
struct CommandOpts {
  CLI::App* cmd = nullptr;
  std::string config_path;
  RunConfig flags;
  int domain = 0;

  void bind(CLI::App* c) {
    cmd = c;
    c->add_option("--config", config_path, "JSON config file; flags override it");
    c->add_option("--graph,-g", flags.graph,
                  "petersen | k<N> | c<N> | complete:<N> | rand3:<N> | edge-list file");
    c->add_option("--seed", flags.seed, "seed for the random graph generators");
    c->add_option("--method,-m", flags.method, "la | ela | nla | nla25");
    c->add_option("--domain,-D", domain, "domain size (where the method takes one)");
    c->add_option("--dtau", flags.dtau, "imaginary-time step");
    c->add_option("--steps,-n", flags.n_steps, "number of steps");
    c->add_option("--ridge", flags.ridge, "ridge added to the linear system");
    c->add_flag("--compress,!--no-compress", flags.compress,
                "merge consecutive steps into blocks (shared pools only)");
    c->add_flag("--reuse-gram,!--no-reuse-gram", flags.reuse_gram,
                "factor the linear system once per step");
    c->add_flag("--aggregate,!--no-aggregate", flags.aggregate_terms,
                "one whole-Hamiltonian solve per step (shared pools only)");
    c->add_flag("--record-coefficients", flags.record_coefficients,
                "keep per-term solve coefficients in memory");
    c->add_flag("--early-stop", flags.early_stop,
                "stop after a long plateau of the energy");
    c->add_flag("--force-general", flags.force_general,
                "disable the structure-exploiting solver paths");
    c->add_flag("--exact-update", flags.exact_update,
                "apply each term update as a dense exponential (cross-check mode)");
    c->add_option("--out,-o", flags.out, "output directory");
    c->add_flag("--dump-pool", flags.dump_pool, "write pool.txt");
    c->add_flag("--dump-state", flags.dump_state, "write the final state to state.csv");
    c->add_flag("--dump-circuits", flags.dump_circuits, "write circuits.txt");
    c->add_option("--t1", flags.noise.t1_us, "relaxation time T1 in microseconds");
    c->add_option("--t2", flags.noise.t2_us, "dephasing time T2 in microseconds");
    c->add_option("--tg1", flags.noise.tg1_ns, "one-qubit gate time in nanoseconds");
    c->add_option("--tg2", flags.noise.tg2_ns, "two-qubit gate time in nanoseconds");
    c->add_option("--p00", flags.noise.p00, "P(read 0 | prepared 0)");
    c->add_option("--p01", flags.noise.p01, "P(read 1 | prepared 0)");
    c->add_option("--p10", flags.noise.p10, "P(read 0 | prepared 1)");
    c->add_option("--p11", flags.noise.p11, "P(read 1 | prepared 1)");
  }

  RunConfig resolve() const {
    RunConfig cfg;
    if (cmd->count("--config") > 0) cfg = qitesim::load_config(config_path);
    auto take = [&](const char* name, auto RunConfig::* member) {
      if (cmd->count(name) > 0) cfg.*member = flags.*member;
    };
    take("--graph", &RunConfig::graph);
    take("--seed", &RunConfig::seed);
    take("--method", &RunConfig::method);
    take("--dtau", &RunConfig::dtau);
    take("--steps", &RunConfig::n_steps);
    take("--ridge", &RunConfig::ridge);
    take("--compress", &RunConfig::compress);
    take("--reuse-gram", &RunConfig::reuse_gram);
    take("--aggregate", &RunConfig::aggregate_terms);
    take("--record-coefficients", &RunConfig::record_coefficients);
    take("--early-stop", &RunConfig::early_stop);
    take("--force-general", &RunConfig::force_general);
    take("--exact-update", &RunConfig::exact_update);
    take("--out", &RunConfig::out);
    take("--dump-pool", &RunConfig::dump_pool);
    take("--dump-state", &RunConfig::dump_state);
    take("--dump-circuits", &RunConfig::dump_circuits);
    if (cmd->count("--domain") > 0) cfg.domain_size = domain;
    auto take_noise = [&](const char* name, double qitesim::NoiseModel::* member) {
      if (cmd->count(name) > 0) cfg.noise.*member = flags.noise.*member;
    };
    take_noise("--t1", &qitesim::NoiseModel::t1_us);
    take_noise("--t2", &qitesim::NoiseModel::t2_us);
    take_noise("--tg1", &qitesim::NoiseModel::tg1_ns);
    take_noise("--tg2", &qitesim::NoiseModel::tg2_ns);
    take_noise("--p00", &qitesim::NoiseModel::p00);
    take_noise("--p01", &qitesim::NoiseModel::p01);
    take_noise("--p10", &qitesim::NoiseModel::p10);
    take_noise("--p11", &qitesim::NoiseModel::p11);
    return cfg;
  }
};

int report(const char* kind, const std::string& message) {
  nlohmann::json j;
  j["kind"] = kind;
  j["error"] = message;
  std::cerr << j.dump() << "\n";
  return std::string(kind) == "config" ? 2 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Imaginary-time evolution simulator and resource estimator for max-cut"};
  app.require_subcommand(1);

  CommandOpts run_opts, depth_opts, spectrum_opts, noise_opts;
  run_opts.bind(app.add_subcommand("run", "evolve and record the trajectory"));
  depth_opts.bind(app.add_subcommand("depth", "per-step resource estimates"));
  spectrum_opts.bind(app.add_subcommand("spectrum", "exhaustive diagonalization"));
  noise_opts.bind(
      app.add_subcommand("noise-run", "evolve, compile and replay with noise"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    return report("config", e.what());
  }

  try {
    if (run_opts.cmd->parsed()) {
      qitesim::cmd_run(run_opts.resolve());
    } else if (depth_opts.cmd->parsed()) {
      qitesim::cmd_depth(depth_opts.resolve());
    } else if (spectrum_opts.cmd->parsed()) {
      qitesim::cmd_spectrum(spectrum_opts.resolve());
    } else if (noise_opts.cmd->parsed()) {
      qitesim::cmd_noise_run(noise_opts.resolve());
    }
    return 0;
  } catch (const qitesim::ConfigError& e) {
    return report("config", e.what());
  } catch (const qitesim::NumericError& e) {
    return report("numeric", e.what());
  } catch (const std::exception& e) {
    return report("internal", e.what());
  }
}
