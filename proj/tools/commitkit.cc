// Copyright 2026 The Authors.
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

// Command-line front end for the commitment toolkit studies.
//
//   commitkit <command> --config <path> --seed <u64> --out <dir>
//
// Commands: gen, discretize, query-study, joint-value, protocol-sim.
// Every run is a pure function of (config, seed); value outputs land in
// <out>/results.csv and wall-clock measurements in <out>/timings.csv.
// COMMITKIT_THREADS caps the worker pool.

#include <cstdio>
#include <exception>
#include <functional>
#include <string>

#include <CLI11.hpp>

#include "commitkit/experiments.h"

namespace {

using Runner = std::function<void(const commitkit::ExperimentConfig&, uint64_t,
                                  const std::string&)>;

struct CommandSpec {
  const char* name;
  const char* help;
  Runner run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"commitment toolkit study runner"};
  app.require_subcommand(1);

  const CommandSpec commands[] = {
      {"gen", "Generate an instance corpus under <out>/instances/", commitkit::run_gen},
      {"discretize", "Compare commitment-set constructions", commitkit::run_discretize},
      {"query-study", "Compare query selection methods", commitkit::run_query_study},
      {"joint-value", "Joint value of agreed commitments vs. baselines",
       commitkit::run_joint_value},
      {"protocol-sim", "Run query/response exchanges and record transcripts",
       commitkit::run_protocol_sim},
  };

  std::string config_path;
  uint64_t seed = 0;
  std::string out_dir;
  const Runner* selected = nullptr;

  for (const CommandSpec& cmd : commands) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    sub->add_option("--config", config_path, "Experiment config JSON")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "Run seed (uint64)")->required();
    sub->add_option("--out", out_dir, "Output directory")->required();
    sub->callback([&selected, &cmd] { selected = &cmd.run; });
  }

  CLI11_PARSE(app, argc, argv);

  try {
    const commitkit::ExperimentConfig cfg = commitkit::ExperimentConfig::from_file(config_path);
    (*selected)(cfg, seed, out_dir);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
