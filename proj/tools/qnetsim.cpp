// Copyright 2026 The qnetsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// qnetsim <experiment> --config <path> [--seed N] [--reps N] [--out path]

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "qnetsim/config.hpp"
#include "qnetsim/experiments.hpp"

int main(int argc, char** argv) {
  using namespace qnetsim;
  CLI::App app{"qnetsim: noisy quantum network simulations"};
  std::string experiment, config_path, out_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> reps;
  std::optional<unsigned> threads;
  const std::vector<std::string> names(std::begin(kExperiments), std::end(kExperiments));
  app.add_option("experiment", experiment, "Experiment to run")->required()->check(CLI::IsMember(names));
  app.add_option("--config", config_path, "Configuration file")->required();
  app.add_option("--seed", seed, "Master seed (overrides the config)")->envname("QNETSIM_SEED");
  app.add_option("--reps", reps, "Repetitions or samples (overrides the config)")->check(CLI::PositiveNumber);
  app.add_option("--out", out_path, "CSV output path (default: stdout)");
  app.add_option("--threads", threads, "Worker threads")->check(CLI::Range(1u, 4096u));
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  RunConfig cfg;
  try {
    cfg = parse_config(config_path);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  if (!cfg.experiment.empty() && cfg.experiment != experiment) {
    std::cerr << "error: config names experiment '" << cfg.experiment << "' but '" << experiment << "' was requested\n";
    return kExitConfig;
  }
  cfg.experiment = experiment;
  if (seed) cfg.master_seed = *seed;
  if (reps) cfg.reps = *reps;
  if (threads) cfg.threads = *threads;
  if (!out_path.empty()) cfg.out = out_path;

  std::ofstream file;
  if (!cfg.out.empty()) {
    file.open(cfg.out);
    if (!file) {
      std::cerr << "error: cannot write '" << cfg.out << "'\n";
      return kExitConfig;
    }
  }
  std::ostream& csv = cfg.out.empty() ? std::cout : file;
  try {
    return run_experiment(cfg, csv, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}
