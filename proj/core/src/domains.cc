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

#include "commitkit/domains.h"

#include <algorithm>
#include <cstdio>

#include "commitkit/errors.h"

namespace commitkit {

namespace {

constexpr int kMaxSyntheticAttempts = 64;

ProviderModel synthetic_attempt(uint64_t seed, uint64_t attempt, const SyntheticSpec& spec) {
  Rng rng = Rng(seed).fork("synthetic", attempt);
  const int n = spec.n_states;
  const int plus_state = n - 1;
  const int H = spec.horizon;

  // Stationary rows, drawn once: per non-absorbing (s, a) a transition row
  // over all n states, then the reward.
  std::vector<std::vector<std::vector<std::pair<int, double>>>> next(plus_state);
  std::vector<std::vector<double>> reward(plus_state);
  for (int s = 0; s < plus_state; ++s) {
    next[s].resize(spec.n_actions);
    reward[s].resize(spec.n_actions);
    for (int a = 0; a < spec.n_actions; ++a) {
      std::vector<double> row(n);
      double sum = 0.0;
      for (int t = 0; t < n; ++t) {
        row[t] = rng.next_double();
        sum += row[t];
      }
      next[s][a].reserve(n);
      for (int t = 0; t < n; ++t) next[s][a].push_back({t, row[t] / sum});
      reward[s][a] = rng.next_double();
    }
  }
  const int initial = static_cast<int>(rng.next_below(static_cast<uint64_t>(plus_state)));

  ProviderModel pm;
  pm.mdp.horizon = H;
  pm.mdp.initial_state = initial;
  pm.mdp.stage_ids.assign(H + 1, std::vector<int>(n));
  pm.mdp.actions.assign(H, {});
  pm.base_state.assign(H + 1, std::vector<int>(n));
  auto& plus_mask = pm.plus[0];
  plus_mask.assign(H + 1, std::vector<char>(n, 0));
  for (int h = 0; h <= H; ++h) {
    for (int i = 0; i < n; ++i) {
      pm.mdp.stage_ids[h][i] = h * n + i;
      pm.base_state[h][i] = i;
    }
    plus_mask[h][plus_state] = 1;
    if (h == H) continue;
    pm.mdp.actions[h].resize(n);
    for (int s = 0; s < plus_state; ++s) {
      for (int a = 0; a < spec.n_actions; ++a)
        pm.mdp.actions[h][s].push_back({a, next[s][a], reward[s][a]});
    }
    pm.mdp.actions[h][plus_state].push_back({0, {{plus_state, 1.0}}, 0.0});
  }
  pm.validate();
  return pm;
}

}  // namespace

ProviderModel gen_synthetic_provider(uint64_t seed, const SyntheticSpec& spec) {
  if (spec.n_states < 2 || spec.n_actions < 1 || spec.horizon < 1)
    throw ValidationError("synthetic spec: need >= 2 states, >= 1 action, horizon >= 1");
  for (uint64_t attempt = 0; attempt < kMaxSyntheticAttempts; ++attempt) {
    ProviderModel pm = synthetic_attempt(seed, attempt, spec);
    double best = 0.0;
    for (int T = 1; T <= spec.horizon; ++T)
      best = std::max(best, max_feasible_probability(pm, T, 0));
    if (best > 0.0) return pm;
    std::fprintf(stderr,
                 "note: synthetic seed %llu attempt %llu cannot reach the plus state; "
                 "regenerating\n",
                 static_cast<unsigned long long>(seed), static_cast<unsigned long long>(attempt));
  }
  throw ValidationError("synthetic generator: plus state unreachable after retries");
}

WalkRecipient gen_walk_recipient(uint64_t seed, const WalkSpec& spec) {
  const int n = spec.n_locations;
  if (n < 3 || spec.horizon < 1)
    throw ValidationError("walk spec: need >= 3 locations and horizon >= 1");
  Rng root(seed);
  WalkParams params;
  params.L0 = 1 + static_cast<int>(root.fork("L0").next_below(static_cast<uint64_t>(n - 2)));
  params.r0 = root.fork("r0").next_double(0.0, spec.r0_max);

  RecipientModel rm;
  rm.horizon = spec.horizon;
  rm.local_ids.resize(n);
  for (int l = 0; l < n; ++l) rm.local_ids[l] = l;
  rm.initial_local = params.L0;
  rm.action_ids.assign(n, {});
  rm.action_ids[0] = {0};
  rm.action_ids[n - 1] = {0};
  for (int l = 1; l < n - 1; ++l) rm.action_ids[l] = {0, 1, 2};  // left, right, stay

  // One stationary stage, copied across the horizon.
  std::vector<std::array<std::vector<LocalAction>, 2>> stage(n);
  for (int l = 0; l < n; ++l) {
    for (int u = 0; u < 2; ++u) {
      auto& rows = stage[l][u];
      if (l == 0 || l == n - 1) {
        rows.push_back({{{l, 1.0}}, 0.0});  // absorbing end
        continue;
      }
      LocalAction left;
      if (l == 1 && u == 0) {
        left = {{{1, 1.0}}, spec.step_reward + spec.bump_reward};  // bump: stay
      } else if (l == 1) {
        left = {{{0, 1.0}}, spec.step_reward + params.r0};  // through the gate
      } else {
        left = {{{l - 1, 1.0}}, spec.step_reward};
      }
      rows.push_back(left);
      rows.push_back({{{l + 1, 1.0}}, spec.step_reward});  // right
      rows.push_back({{{l, 1.0}}, spec.step_reward});      // stay
    }
  }
  rm.table.assign(spec.horizon, stage);
  rm.validate();
  return {std::move(rm), params};
}

}  // namespace commitkit
