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

#ifndef COMMITKIT_MDP_H_
#define COMMITKIT_MDP_H_

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace commitkit {

// One action available in a state: external action id, sparse distribution
// over next-stage states (indices into stage h+1), and immediate reward.
struct ActionEntry {
  int id = 0;
  std::vector<std::pair<int, double>> next;
  double reward = 0.0;
};

// Finite-horizon MDP with explicitly stage-partitioned states: a state lives
// at exactly one stage h in 0..horizon and transitions only into stage h+1.
// States carry external integer ids (unique across the whole model, grouped
// by stage); all computations use dense per-stage indices.
//
// Stage `horizon` states have no actions. Occupancy measures give them a
// single synthetic zero-reward terminate slot so that stage masses are
// conserved through the final stage.
struct FiniteHorizonMdp {
  int horizon = 0;
  std::vector<std::vector<int>> stage_ids;                     // [h][i] -> id, h in 0..horizon
  std::vector<std::vector<std::vector<ActionEntry>>> actions;  // [h][i][k], h in 0..horizon-1
  int initial_state = 0;                                       // index into stage 0

  int num_states(int h) const { return static_cast<int>(stage_ids[h].size()); }
  int num_actions(int h, int s) const { return static_cast<int>(actions[h][s].size()); }

  // Total (stage, state, action) triples plus one terminate slot per final
  // stage state; the variable count of the occupancy polytope.
  int64_t num_occupancy_variables() const;

  // Throws ValidationError: empty stages, missing actions, transition rows
  // that do not sum to 1 within 1e-9, negative probabilities, out-of-range
  // targets, duplicate ids, or a bad initial state.
  void validate() const;

  // External id -> (stage, index). Built on demand.
  std::unordered_map<int, std::pair<int, int>> id_index() const;

  // Canonical JSON (sorted keys, compact). Schema:
  //   {"horizon": H,
  //    "stages": [[ids of stage 0], ..., [ids of stage H]],
  //    "actions": {"<state id>": [action ids], ...},        // states with h < H
  //    "transitions": [[h, s, a, [[s', prob], ...]], ...],
  //    "rewards": [[h, s, a, r], ...],
  //    "initial_state": s0}
  // where s, s', s0 and a are external ids.
  std::string to_json() const;
  static FiniteHorizonMdp from_json(const std::string& text);
};

// pi[h][s][k]: probability of the k-th action of state (h, s); h in
// 0..horizon-1. Rows are distributions (sum 1 within 1e-9).
using Policy = std::vector<std::vector<std::vector<double>>>;

// v[h][s] for h in 0..horizon; the final stage row is all zeros.
using ValueTable = std::vector<std::vector<double>>;

// x[h][s][k] occupancy of the k-th action of state (h, s); stage `horizon`
// has a single terminate slot x[H][s][0]. Each stage sums to 1.
using OccupancyMeasure = std::vector<std::vector<std::vector<double>>>;

// Deterministic policy: action *index* per (stage, state).
using DetPolicy = std::vector<std::vector<int>>;

struct Solution {
  Policy policy;
  ValueTable value;
};

// Backward-induction optimum. Argmax ties break toward the lowest action
// index (equivalently the lowest action id; actions are sorted by id).
Solution solve(const FiniteHorizonMdp& m);

// Value of a fixed (stochastic) policy.
ValueTable evaluate(const FiniteHorizonMdp& m, const Policy& pi);

inline double initial_value(const FiniteHorizonMdp& m, const ValueTable& v) {
  return v[0][m.initial_state];
}

// Forward pass: state-action visitation probabilities under pi.
OccupancyMeasure occupancy(const FiniteHorizonMdp& m, const Policy& pi);

// pi(a|s) = x(s,a) / sum_a' x(s,a'). States with occupancy below 1e-14 get
// uniform rows; negative numerical dust is clamped to zero.
Policy policy_from_occupancy(const FiniteHorizonMdp& m, const OccupancyMeasure& x);

// sum over (h,s,a) of x * reward. Equal to the initial value of the policy
// that induced x (flow conservation makes the two bookkeepings agree).
double occupancy_reward(const FiniteHorizonMdp& m, const OccupancyMeasure& x);

Policy uniform_policy(const FiniteHorizonMdp& m);
Policy det_to_policy(const FiniteHorizonMdp& m, const DetPolicy& d);

// Throws ValidationError if pi has wrong shape, negative entries, or rows
// not summing to 1 within 1e-9.
void validate_policy(const FiniteHorizonMdp& m, const Policy& pi);

// Order- and representation-stable fingerprint of a policy table, for
// transcripts and golden files.
uint64_t policy_fingerprint(const Policy& pi);

}  // namespace commitkit

#endif  // COMMITKIT_MDP_H_
