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

// Desk-scale experiment runners behind the command-line tool: corpus
// generation and the discretization, query, joint-value, and protocol
// studies. Every run is a pure function of (config, seed); value columns go
// to results.csv (bit-for-bit reproducible) and wall-clock measurements to a
// separate timings.csv, so reproducibility checks can diff the former.

#ifndef COMMITKIT_EXPERIMENTS_H_
#define COMMITKIT_EXPERIMENTS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "commitkit/breakpoints.h"
#include "commitkit/domains.h"
#include "commitkit/query.h"

namespace commitkit {

struct ExperimentConfig {
  std::string domain = "synthetic";  // "synthetic" | "overcooked"
  int n_instances = 20;
  int n_candidates = 10;
  int m = 1;         // overcooked food items
  int horizon = 20;
  std::vector<int> ks = {1, 2, 3, 5};
  int rounds = 1;  // exchange rounds (1 or 2)
  int k0 = 2;      // first-round query size when rounds == 2
  std::vector<std::string> priors = {"uniform"};
  std::vector<DiscretizationSpec> discretizations;  // default: breakpoints,
                                                    // even/dp at n=10,20,50
  int64_t exhaustive_budget = 20000000;
  int exhaustive_max_k = 3;
  int random_repeats = 5;  // repeats for random-query / random-commitment rows
  int64_t joint_state_budget = 2000000;
  LpMethod method = LpMethod::kAuto;

  void validate() const;
  std::string to_json() const;
  static ExperimentConfig from_json(const std::string& text);
  static ExperimentConfig from_file(const std::string& path);
};

// One generated coordination problem: a provider, candidate recipients, and
// the index of the candidate that is actually the true recipient.
struct Instance {
  uint64_t seed = 0;
  std::string domain;
  ProviderModel provider;
  std::vector<RecipientCandidate> candidates;
  int true_index = 0;

  // Domain parameter records, for params.json and the joint baselines.
  std::vector<WalkParams> walk_params;                // synthetic
  OvercookedChefParams chef_params;                   // overcooked
  std::vector<OvercookedWaiterParams> waiter_params;  // overcooked
};

// Instance `index` of the run: everything derives from
// Rng(run_seed).fork("instance", index).
Instance make_instance(const ExperimentConfig& cfg, uint64_t run_seed, int index);

// Study runners. Each writes results.csv and timings.csv (plus study-specific
// files) into out_dir, creating it if needed.
void run_gen(const ExperimentConfig& cfg, uint64_t seed, const std::string& out_dir);
void run_discretize(const ExperimentConfig& cfg, uint64_t seed, const std::string& out_dir);
void run_query_study(const ExperimentConfig& cfg, uint64_t seed, const std::string& out_dir);
void run_joint_value(const ExperimentConfig& cfg, uint64_t seed, const std::string& out_dir);
void run_protocol_sim(const ExperimentConfig& cfg, uint64_t seed, const std::string& out_dir);

// CSV helpers shared with tests: doubles print with "%.12g", so equal values
// produce equal bytes.
std::string csv_double(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;  // -1 when absent
};

CsvTable read_csv(const std::string& path);

}  // namespace commitkit

#endif  // COMMITKIT_EXPERIMENTS_H_
