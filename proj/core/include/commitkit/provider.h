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

#ifndef COMMITKIT_PROVIDER_H_
#define COMMITKIT_PROVIDER_H_

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "commitkit/commitment.h"
#include "commitkit/mdp.h"

namespace commitkit {

// The provider agent: its MDP plus, per controllable feature, the set of
// states where the feature has its plus value. Feature membership must be
// permanent: every successor of a plus state is again plus.
struct ProviderModel {
  FiniteHorizonMdp mdp;
  // feature id -> [h][s] membership flags.
  std::map<int, std::vector<std::vector<char>>> plus;
  // Optional: base-state index per (h, s) when the model is an unrolled
  // stationary MDP; enables the stationary deterministic-policy
  // discretization. Empty otherwise.
  std::vector<std::vector<int>> base_state;

  void validate() const;
  std::vector<int> feature_ids() const;
  int sole_feature() const;  // throws unless exactly one feature
  const std::vector<std::vector<char>>& plus_of(int feature) const;

  // The mdp schema plus {"plus_states": {"<feature>": [state ids]}} and,
  // when present, {"base_states": {"<state id>": base index}}.
  std::string to_json() const;
  static ProviderModel from_json(const std::string& text);
};

// Maximum probability of sitting in a plus state of `feature` at stage T,
// over all provider policies (backward induction on the membership
// indicator). feature = -1 selects the sole feature.
double max_feasible_probability(const ProviderModel& pm, int T, int feature = -1);

enum class LpMethod {
  kAuto,              // tableau for small programs, column generation above
  kDenseTableau,      // full occupancy LP via the Bland-rule tableau simplex
  kColumnGeneration,  // exact Dantzig-Wolfe over deterministic-policy columns
};

struct CommitmentSolveResult {
  double value = 0.0;             // v^p(c): best provider value honoring c
  double achieved_probability = 0.0;  // plus mass at T under the occupancy
  Policy policy;                  // stochastic commitment policy
  OccupancyMeasure occupancy;     // optimal occupancy measure
};

// Solves the commitment LP: maximize expected reward over occupancy measures
// subject to flow conservation and plus-mass at stage c.T of at least c.p
// (a nonnegative slack turns the inequality into an equality row). Throws
// InfeasibleCommitmentError when c.p exceeds the maximum feasible
// probability by more than 1e-9.
CommitmentSolveResult commitment_value(const ProviderModel& pm, const Commitment& c,
                                       LpMethod method = LpMethod::kAuto);

// Pr(plus at c.T) when the provider runs `pi`; forward pass, no LP.
double verify_commitment_policy(const ProviderModel& pm, const Policy& pi, const Commitment& c);

// Repeated v^p(T, .) evaluations against one (model, feature, T). The column
// generation path keeps its deterministic-policy columns across calls, which
// makes probability sweeps (breakpoint search, dense reference grids) cheap.
// Results are identical to one-shot commitment_value calls; the pool only
// changes how fast certificates are reached.
class ProviderCommitmentOracle {
 public:
  ProviderCommitmentOracle(const ProviderModel& pm, int T, int feature = -1,
                           LpMethod method = LpMethod::kAuto);
  ~ProviderCommitmentOracle();
  ProviderCommitmentOracle(ProviderCommitmentOracle&&) noexcept;

  double max_probability() const;  // p-bar(T)
  double value(double p);          // v^p(T, p); throws when infeasible
  CommitmentSolveResult solve(double p);
  int64_t solve_count() const;     // LP solves issued so far

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace commitkit

#endif  // COMMITKIT_PROVIDER_H_
