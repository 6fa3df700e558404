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

// Seeded generators for the evaluation environments, plus the centralized
// joint model and joint-execution evaluation used as baselines.
//
// All generators are pure functions of their seed: the seed feeds a root Rng
// whose labeled forks (documented per generator) draw each field, so adding a
// field never shifts the draws of another.

#ifndef COMMITKIT_DOMAINS_H_
#define COMMITKIT_DOMAINS_H_

#include <cstdint>
#include <utility>
#include <vector>

#include "commitkit/provider.h"
#include "commitkit/recipient.h"
#include "commitkit/rng.h"

namespace commitkit {

// ---------------------------------------------------------------------------
// Synthetic provider: n_states fully-connected states per stage, one of them
// (the last) absorbing and marked plus for feature 0 with reward 0; all other
// rewards and transition rows are uniform draws, stationary across stages.

struct SyntheticSpec {
  int n_states = 10;
  int n_actions = 3;
  int horizon = 20;
};

// Rng forks: "synthetic"/attempt draws, per non-absorbing (s, a) in order, a
// transition row then the reward, followed by the initial state. The rare
// seed whose plus state is unreachable at every stage is regenerated with the
// next attempt number (logged to stderr).
ProviderModel gen_synthetic_provider(uint64_t seed, const SyntheticSpec& spec = {});

// ---------------------------------------------------------------------------
// 1D walk recipient: locations 0..n-1 on a line; both ends absorbing with
// reward 0 per step; interior steps cost 1 (actions left/right/stay, ids
// 0/1/2). A gate sits between locations 0 and 1, open exactly when u is
// plus: moving left from 1 through the closed gate bumps (stays, total step
// reward -11); through the open gate it reaches location 0, collecting the
// one-time bonus r0 on top of the step cost.

struct WalkSpec {
  int n_locations = 10;
  int horizon = 20;
  double step_reward = -1.0;
  double bump_reward = -10.0;  // added to the step reward on a bump
  double r0_max = 10.0;        // r0 ~ U[0, r0_max)
};

struct WalkParams {
  int L0 = 1;      // initial location, uniform in 1..n-2
  double r0 = 0.0;  // left-end bonus
};

struct WalkRecipient {
  RecipientModel model;
  WalkParams params;
};

// Rng forks: "L0", "r0".
WalkRecipient gen_walk_recipient(uint64_t seed, const WalkSpec& spec = {});

// ---------------------------------------------------------------------------
// Overcooked: a 7x7 grid whose boundary and center column are counters,
// splitting the floor into a chef half (columns 1-2) and a waiter half
// (columns 4-5); the shared plate sits mid-divider at (3, 3). The chef picks
// tomatoes from counters, chops them at the knife, and plates them; plating
// food i is the permanent plus feature with id i (features 1..m). The chef's
// only reward is -1 per step the pot boils (it ignites with chance p_boiling,
// interacting turns it off), so an uncommitted chef never plates. The waiter
// (recipient, one model per food) picks a plated food from the plate, gated
// on the plus feature, delivers it at the delivery counter for r_delivery,
// and pays r_distance times its Manhattan distance to the dine-in customer
// every step.
//
// Cells are encoded as row * 7 + column.

struct OvercookedSpec {
  int m = 1;         // food items, feature ids 1..m
  int horizon = 20;  // not pinned by the source environment; default matches
                     // the synthetic domain
};

struct OvercookedChefParams {
  int chef_cell = 0;              // walkable, chef side
  std::vector<int> tomato_cells;  // chef-side counters, one per food, distinct
  int pot_cell = 0;               // chef-side counter
  int knife_cell = 0;             // chef-side counter
  double p_boiling = 0.0;         // U[0, 0.1]
};

struct OvercookedWaiterParams {
  int waiter_cell = 0;              // walkable, waiter side
  int delivery_cell = 0;            // waiter-side counter
  int customer_cell = 0;            // waiter-side counter, distinct from delivery
  std::vector<double> r_delivery;   // per food, U[5, 15]
  double r_distance = 0.0;          // penalty magnitude, U[0, 0.1]
};

struct OvercookedChef {
  ProviderModel model;
  OvercookedChefParams params;
};

struct OvercookedWaiter {
  RecipientCandidate candidate;  // one RecipientModel per feature 1..m
  OvercookedWaiterParams params;
};

// Rng forks: "chef_pos", "objects" (m tomato cells, pot, knife: distinct
// counter cells by rejection in draw order), "p_boiling".
OvercookedChef gen_overcooked_chef(uint64_t seed, const OvercookedSpec& spec = {});

// Rng forks: "waiter_pos", "service" (delivery then customer, distinct
// counter cells by rejection), "r_delivery"/food index, "r_distance".
OvercookedWaiter gen_overcooked_waiter(uint64_t seed, const OvercookedSpec& spec = {});

// Chef from fork "chef", waiter from fork "waiter" of the instance seed.
std::pair<OvercookedChef, OvercookedWaiter> gen_overcooked_pair(uint64_t seed,
                                                                const OvercookedSpec& spec = {});

// Grid geometry helpers (row-major 7x7 cells).
int overcooked_cell(int r, int c);
int overcooked_cell_row(int cell);
int overcooked_cell_col(int cell);

// Centralized optimum of the full chef-and-waiter problem (all m foods, the
// waiter carrying at most one and each food deliverable once), solved by
// backward induction on the product state space without materializing it.
double overcooked_joint_value(const OvercookedChefParams& chef,
                              const OvercookedWaiterParams& waiter,
                              const OvercookedSpec& spec = {});

// ---------------------------------------------------------------------------
// Generic centralized model and decentralized joint execution.

// Product MDP over (provider state, recipient local state) with u read from
// the provider state via `feature`, joint actions as pairs (id = provider
// action id * 16 + recipient action id), rewards summed. Throws
// ValidationError when the product exceeds max_joint_states across stages.
FiniteHorizonMdp build_joint_mmdp(const ProviderModel& pm, const RecipientModel& rm, int feature,
                                  int64_t max_joint_states = 2000000);

// The provider's actual flip-time law under the policy realizing occupancy
// x: the plus mass F_h per stage is converted to per-step hazards. Mass
// already plus at stage 0 is folded into the first step's hazard, since the
// recipient model starts at minus.
Influence true_influence(const ProviderModel& pm, const OccupancyMeasure& x, int feature);

// Decentralized execution of a commitment: the provider follows its
// commitment policy; the recipient follows the policy it derived from the
// commitment's promised hazard, but is evaluated under the provider's true
// flip-time law.
struct JointExecutionResult {
  double provider_value = 0.0;
  double recipient_value = 0.0;
  double total = 0.0;
  Influence influence;  // the provider's true flip-time law
};

JointExecutionResult evaluate_joint_execution(const ProviderModel& pm, const RecipientModel& rm,
                                              const Commitment& c,
                                              LpMethod method = LpMethod::kAuto);

}  // namespace commitkit

#endif  // COMMITKIT_DOMAINS_H_
