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

#ifndef COMMITKIT_RECIPIENT_H_
#define COMMITKIT_RECIPIENT_H_

#include <array>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "commitkit/commitment.h"
#include "commitkit/mdp.h"

namespace commitkit {

// Marginal law of the shared feature u as the recipient sees it: u starts at
// its minus value and flips permanently; hazard[h-1] is the probability that
// the flip happens on the step entering stage h, given it has not happened
// yet. The recipient can first act on u-plus at the flip stage itself.
struct Influence {
  int horizon = 0;
  std::vector<double> hazard;  // size horizon, entry h-1 for stage h

  void validate() const;
  std::string to_json() const;  // {"hazard": [...], "horizon": H}
  static Influence from_json(const std::string& text);
};

// The influence a commitment (T, p) induces under single-branch modeling:
// the flip happens at stage T with probability p and never otherwise.
Influence single_branch_influence(const Commitment& c, int horizon);

struct LocalAction {
  std::vector<std::pair<int, double>> next;  // (local state index, prob)
  double reward = 0.0;
};

// The recipient agent: local states l whose transitions and rewards may
// depend on the current value of the shared feature u, but which never
// influence u themselves.
struct RecipientModel {
  int horizon = 0;
  std::vector<int> local_ids;
  int initial_local = 0;                      // index into local_ids
  std::vector<std::vector<int>> action_ids;   // [l][k], sorted ascending
  // table[h][l][u][k]; u in {0 minus, 1 plus}; h in 0..horizon-1.
  std::vector<std::vector<std::array<std::vector<LocalAction>, 2>>> table;

  int num_local() const { return static_cast<int>(local_ids.size()); }
  int num_actions(int l) const { return static_cast<int>(action_ids[l].size()); }
  const LocalAction& action(int h, int l, int u, int k) const { return table[h][l][u][k]; }

  void validate() const;
  // {"horizon", "local_states", "initial_local_state", "actions",
  //  "transitions": [[h, l, u, a, [[l', prob], ...]], ...],
  //  "rewards": [[h, l, u, a, r], ...]}
  // A stage h of -1 is the compact stationary form: the row applies to every
  // stage. Serialization uses it whenever the model is stage-invariant.
  std::string to_json() const;
  static RecipientModel from_json(const std::string& text);
};

// Product MDP over (l, u) pairs under the given influence. State ids follow
// id = (h * 2 + u) * num_local + l; the initial state is (l0, u minus).
FiniteHorizonMdp build_approx_model(const RecipientModel& rm, const Influence& inf);

struct RecipientSolveResult {
  double value = 0.0;
  Policy policy;  // over the product model built by build_approx_model
};

// v^r(c): the recipient's best value when it models the commitment with
// single-branch influence.
RecipientSolveResult commitment_value(const RecipientModel& rm, const Commitment& c);

// Value of a fixed product-model policy under an arbitrary influence (for
// executing a planned policy against the provider's true flip law).
double evaluate_under_influence(const RecipientModel& rm, const Policy& pi, const Influence& inf);

// Conditional values (v_{T,1}, v_{T,0}) of the optimal single-branch policy:
// flip-at-T branch and never-flip branch. They satisfy
//    v^r(T, p) = p * v_{T,1} + (1 - p) * v_{T,0}.
std::pair<double, double> conditional_values(const RecipientModel& rm, const Commitment& c);

// Whether the plus world dominates: the optimal value with u pinned to plus
// is at least the optimal value with u pinned to minus, for every local
// state and stage (tolerance 1e-12). The convexity and monotonicity
// guarantees for v^r(T, .) assume this.
struct AssumptionCheck {
  bool holds = true;
  int stage = -1;      // worst violating (stage, local state); -1 when none
  int local = -1;
  double gap = 0.0;    // v_minus - v_plus at the worst violation

  explicit operator bool() const { return holds; }
};

AssumptionCheck check_assumption_u(const RecipientModel& rm);

// One hypothesis about the recipient: a local model per feature the provider
// can commit on. Single-feature domains use feature id 0.
struct RecipientCandidate {
  std::map<int, RecipientModel> models;

  const RecipientModel& for_feature(int feature) const;
  int horizon() const;  // shared across features
};

// v^r of the candidate for a commitment on feature c.u_c.
double candidate_value(const RecipientCandidate& rc, const Commitment& c);

}  // namespace commitkit

#endif  // COMMITKIT_RECIPIENT_H_
