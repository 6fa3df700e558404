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
#include <vector>

#include "commitkit/errors.h"

namespace commitkit {

namespace {

constexpr int kGrid = 7;
// Cardinal directions in action-id order: N, E, S, W.
constexpr int kDr[4] = {-1, 0, 1, 0};
constexpr int kDc[4] = {0, 1, 0, -1};
constexpr int kNumActions = 9;  // 0-3 move, 4-7 interact, 8 do-nothing
constexpr int kPlateCell = 3 * kGrid + 3;

bool chef_floor(int r, int c) { return r >= 1 && r <= 5 && c >= 1 && c <= 2; }
bool waiter_floor(int r, int c) { return r >= 1 && r <= 5 && c >= 4 && c <= 5; }

std::vector<int> floor_cells(bool chef_side) {
  std::vector<int> cells;
  for (int r = 0; r < kGrid; ++r)
    for (int c = 0; c < kGrid; ++c)
      if (chef_side ? chef_floor(r, c) : waiter_floor(r, c)) cells.push_back(r * kGrid + c);
  return cells;
}

// Counter cells an agent on the given side can interact with: boundary and
// divider cells adjacent to that side's floor, excluding the fixed plate.
std::vector<int> counter_cells(bool chef_side) {
  std::vector<int> cells;
  for (int r = 0; r < kGrid; ++r) {
    for (int c = 0; c < kGrid; ++c) {
      const bool counter = r == 0 || r == kGrid - 1 || c == 0 || c == kGrid - 1 || c == 3;
      if (!counter || r * kGrid + c == kPlateCell) continue;
      bool adjacent = false;
      for (int d = 0; d < 4; ++d) {
        const int rr = r + kDr[d];
        const int cc = c + kDc[d];
        if (rr < 0 || rr >= kGrid || cc < 0 || cc >= kGrid) continue;
        if (chef_side ? chef_floor(rr, cc) : waiter_floor(rr, cc)) adjacent = true;
      }
      if (adjacent) cells.push_back(r * kGrid + c);
    }
  }
  return cells;
}

int manhattan(int cell_a, int cell_b) {
  return std::abs(cell_a / kGrid - cell_b / kGrid) + std::abs(cell_a % kGrid - cell_b % kGrid);
}

// Tomato phases per food.
enum TomatoPhase { kOnCounter = 0, kCarriedUnchopped = 1, kCarriedChopped = 2, kPlated = 3 };

// Chef-side rules shared by the provider-model generator and the joint
// solver. States factor as (position, tomato-phase combo, pot flag); a combo
// assigns each food a phase with at most one food carried.
struct ChefRules {
  const OvercookedChefParams& params;
  int m;
  std::vector<int> floor;                  // walkable cells, sorted
  std::vector<int> pos_of_cell;            // cell -> floor index or -1
  std::vector<std::vector<int>> combos;    // rank -> phase per food
  std::vector<int> rank_of_code;           // base-4 code -> rank or -1

  explicit ChefRules(const OvercookedChefParams& p, int m_in)
      : params(p), m(m_in), floor(floor_cells(true)) {
    pos_of_cell.assign(kGrid * kGrid, -1);
    for (size_t i = 0; i < floor.size(); ++i) pos_of_cell[floor[i]] = static_cast<int>(i);
    int codes = 1;
    for (int i = 0; i < m; ++i) codes *= 4;
    rank_of_code.assign(codes, -1);
    for (int code = 0; code < codes; ++code) {
      std::vector<int> phases(m);
      int carried = 0;
      for (int i = 0, rest = code; i < m; ++i, rest /= 4) {
        phases[i] = rest % 4;
        if (phases[i] == kCarriedUnchopped || phases[i] == kCarriedChopped) ++carried;
      }
      if (carried > 1) continue;
      rank_of_code[code] = static_cast<int>(combos.size());
      combos.push_back(std::move(phases));
    }
  }

  int num_states() const { return static_cast<int>(floor.size() * combos.size() * 2); }
  int state(int pos, int combo, int pot) const {
    return (pos * static_cast<int>(combos.size()) + combo) * 2 + pot;
  }
  int pot_of(int s) const { return s & 1; }
  int combo_of(int s) const { return (s >> 1) % static_cast<int>(combos.size()); }
  int pos_of(int s) const { return (s >> 1) / static_cast<int>(combos.size()); }
  bool plated(int s, int food_index) const { return combos[combo_of(s)][food_index] == kPlated; }

  int code_of(const std::vector<int>& phases) const {
    int code = 0;
    for (int i = m - 1; i >= 0; --i) code = code * 4 + phases[i];
    return code;
  }

  // Deterministic action effect, before the pot's stochastic ignition.
  int apply(int s, int action) const {
    int pos = pos_of(s), combo = combo_of(s), pot = pot_of(s);
    if (action < 4) {
      const int cell = floor[pos];
      const int target = (cell / kGrid + kDr[action]) * kGrid + (cell % kGrid + kDc[action]);
      if (pos_of_cell[target] >= 0) pos = pos_of_cell[target];
    } else if (action < 8) {
      const int dir = action - 4;
      const int cell = floor[pos];
      const int target = (cell / kGrid + kDr[dir]) * kGrid + (cell % kGrid + kDc[dir]);
      std::vector<int> phases = combos[combo];
      int carried = -1;
      for (int i = 0; i < m; ++i)
        if (phases[i] == kCarriedUnchopped || phases[i] == kCarriedChopped) carried = i;
      bool changed = false;
      for (int i = 0; i < m && !changed; ++i) {
        if (target == params.tomato_cells[i] && phases[i] == kOnCounter && carried == -1) {
          phases[i] = kCarriedUnchopped;
          changed = true;
        }
      }
      if (!changed && target == params.knife_cell && carried >= 0 &&
          phases[carried] == kCarriedUnchopped) {
        phases[carried] = kCarriedChopped;
        changed = true;
      }
      if (!changed && target == kPlateCell && carried >= 0 &&
          phases[carried] == kCarriedChopped) {
        phases[carried] = kPlated;
        changed = true;
      }
      if (!changed && target == params.pot_cell && pot == 1) pot = 0;
      if (changed) combo = rank_of_code[code_of(phases)];
    }
    return state(pos, combo, pot);
  }

  double step_reward(int s) const { return pot_of(s) == 1 ? -1.0 : 0.0; }

  // Successors: the pot ignites during the step with chance p_boiling
  // whenever it ends the deterministic effect unboiled.
  void successors(int s, int action, std::vector<std::pair<int, double>>* out) const {
    out->clear();
    const int t = apply(s, action);
    if (pot_of(t) == 1 || params.p_boiling <= 0.0) {
      out->push_back({t, 1.0});
      return;
    }
    out->push_back({t, 1.0 - params.p_boiling});
    out->push_back({t + 1, params.p_boiling});  // pot is the lowest state bit
  }
};

// Waiter-side rules for a single food (the per-feature recipient model):
// status 0 = waiting, 1 = carrying, 2 = delivered.
struct WaiterRules {
  const OvercookedWaiterParams& params;
  int food_index;
  std::vector<int> floor;
  std::vector<int> pos_of_cell;

  WaiterRules(const OvercookedWaiterParams& p, int food)
      : params(p), food_index(food), floor(floor_cells(false)) {
    pos_of_cell.assign(kGrid * kGrid, -1);
    for (size_t i = 0; i < floor.size(); ++i) pos_of_cell[floor[i]] = static_cast<int>(i);
  }

  int target_of(int pos, int dir) const {
    const int cell = floor[pos];
    return (cell / kGrid + kDr[dir]) * kGrid + (cell % kGrid + kDc[dir]);
  }

  double distance_penalty(int pos) const {
    return -params.r_distance * manhattan(floor[pos], params.customer_cell);
  }

  // Effect on (pos, status) given the current shared-feature value; fills the
  // one-time delivery bonus.
  void apply(int pos, int status, int u, int action, int* npos, int* nstatus,
             double* bonus) const {
    *npos = pos;
    *nstatus = status;
    *bonus = 0.0;
    if (action < 4) {
      const int target = target_of(pos, action);
      if (pos_of_cell[target] >= 0) *npos = pos_of_cell[target];
    } else if (action < 8) {
      const int target = target_of(pos, action - 4);
      if (target == kPlateCell && status == 0 && u == 1) {
        *nstatus = 1;
      } else if (target == params.delivery_cell && status == 1) {
        *nstatus = 2;
        *bonus = params.r_delivery[food_index];
      }
    }
  }
};

std::vector<int> sample_distinct_cells(Rng rng, const std::vector<int>& pool, int count) {
  std::vector<int> chosen;
  while (static_cast<int>(chosen.size()) < count) {
    const int cell = pool[rng.next_below(pool.size())];
    if (std::find(chosen.begin(), chosen.end(), cell) == chosen.end()) chosen.push_back(cell);
  }
  return chosen;
}

void check_reachable(int cell, bool chef_side, const char* label) {
  for (int d = 0; d < 4; ++d) {
    const int r = cell / kGrid + kDr[d];
    const int c = cell % kGrid + kDc[d];
    if (r < 0 || r >= kGrid || c < 0 || c >= kGrid) continue;
    if (chef_side ? chef_floor(r, c) : waiter_floor(r, c)) return;
  }
  std::fprintf(stderr, "note: rejecting unreachable %s placement at cell %d\n", label, cell);
  throw ValidationError("unreachable counter placement");
}

}  // namespace

int overcooked_cell(int r, int c) { return r * kGrid + c; }
int overcooked_cell_row(int cell) { return cell / kGrid; }
int overcooked_cell_col(int cell) { return cell % kGrid; }

OvercookedChef gen_overcooked_chef(uint64_t seed, const OvercookedSpec& spec) {
  if (spec.m < 1 || spec.horizon < 1)
    throw ValidationError("overcooked spec: need m >= 1 and horizon >= 1");
  Rng root(seed);
  const std::vector<int> floor = floor_cells(true);
  const std::vector<int> counters = counter_cells(true);

  OvercookedChefParams params;
  params.chef_cell = floor[root.fork("chef_pos").next_below(floor.size())];
  // The tomato cells, the pot, and the knife occupy distinct counters; they
  // are drawn from one pool in that order, rejecting repeats.
  {
    std::vector<int> cells = sample_distinct_cells(root.fork("objects"), counters, spec.m + 2);
    params.tomato_cells.assign(cells.begin(), cells.begin() + spec.m);
    params.pot_cell = cells[spec.m];
    params.knife_cell = cells[spec.m + 1];
  }
  params.p_boiling = root.fork("p_boiling").next_double(0.0, 0.1);
  for (int i = 0; i < spec.m; ++i) check_reachable(params.tomato_cells[i], true, "tomato");
  check_reachable(params.pot_cell, true, "pot");
  check_reachable(params.knife_cell, true, "knife");
  check_reachable(kPlateCell, true, "plate");

  const ChefRules rules(params, spec.m);
  const int S = rules.num_states();
  const int H = spec.horizon;

  ProviderModel pm;
  pm.mdp.horizon = H;
  pm.mdp.initial_state = rules.state(rules.pos_of_cell[params.chef_cell], 0, 0);
  pm.mdp.stage_ids.assign(H + 1, std::vector<int>(S));
  pm.mdp.actions.assign(H, {});
  pm.base_state.assign(H + 1, std::vector<int>(S));
  for (int f = 1; f <= spec.m; ++f) pm.plus[f].assign(H + 1, std::vector<char>(S, 0));
  std::vector<std::pair<int, double>> next;
  for (int h = 0; h <= H; ++h) {
    for (int s = 0; s < S; ++s) {
      pm.mdp.stage_ids[h][s] = h * S + s;
      pm.base_state[h][s] = s;
      for (int f = 1; f <= spec.m; ++f) pm.plus[f][h][s] = rules.plated(s, f - 1);
    }
    if (h == H) continue;
    pm.mdp.actions[h].resize(S);
    for (int s = 0; s < S; ++s) {
      const double r = rules.step_reward(s);
      for (int a = 0; a < kNumActions; ++a) {
        rules.successors(s, a, &next);
        pm.mdp.actions[h][s].push_back({a, next, r});
      }
    }
  }
  pm.validate();
  return {std::move(pm), std::move(params)};
}

OvercookedWaiter gen_overcooked_waiter(uint64_t seed, const OvercookedSpec& spec) {
  if (spec.m < 1 || spec.horizon < 1)
    throw ValidationError("overcooked spec: need m >= 1 and horizon >= 1");
  Rng root(seed);
  const std::vector<int> floor = floor_cells(false);
  const std::vector<int> counters = counter_cells(false);

  OvercookedWaiterParams params;
  params.waiter_cell = floor[root.fork("waiter_pos").next_below(floor.size())];
  {
    std::vector<int> cells = sample_distinct_cells(root.fork("service"), counters, 2);
    params.delivery_cell = cells[0];
    params.customer_cell = cells[1];
  }
  params.r_delivery.resize(spec.m);
  for (int i = 0; i < spec.m; ++i)
    params.r_delivery[i] = root.fork("r_delivery", static_cast<uint64_t>(i)).next_double(5.0, 15.0);
  params.r_distance = root.fork("r_distance").next_double(0.0, 0.1);
  check_reachable(params.delivery_cell, false, "delivery");
  check_reachable(kPlateCell, false, "plate");

  OvercookedWaiter out;
  out.params = params;
  const int L = static_cast<int>(floor.size()) * 3;
  for (int f = 1; f <= spec.m; ++f) {
    const WaiterRules rules(out.params, f - 1);
    RecipientModel rm;
    rm.horizon = spec.horizon;
    rm.local_ids.resize(L);
    for (int l = 0; l < L; ++l) rm.local_ids[l] = l;
    rm.initial_local = rules.pos_of_cell[params.waiter_cell] * 3;
    rm.action_ids.assign(L, std::vector<int>(kNumActions));
    for (int l = 0; l < L; ++l)
      for (int a = 0; a < kNumActions; ++a) rm.action_ids[l][a] = a;

    std::vector<std::array<std::vector<LocalAction>, 2>> stage(L);
    for (int l = 0; l < L; ++l) {
      const int pos = l / 3;
      const int status = l % 3;
      for (int u = 0; u < 2; ++u) {
        stage[l][u].resize(kNumActions);
        for (int a = 0; a < kNumActions; ++a) {
          int npos, nstatus;
          double bonus;
          rules.apply(pos, status, u, a, &npos, &nstatus, &bonus);
          stage[l][u][a] = {{{npos * 3 + nstatus, 1.0}},
                            rules.distance_penalty(pos) + bonus};
        }
      }
    }
    rm.table.assign(spec.horizon, stage);
    rm.validate();
    out.candidate.models.emplace(f, std::move(rm));
  }
  return out;
}

std::pair<OvercookedChef, OvercookedWaiter> gen_overcooked_pair(uint64_t seed,
                                                                const OvercookedSpec& spec) {
  Rng root(seed);
  OvercookedChef chef = gen_overcooked_chef(root.fork("chef").seed(), spec);
  OvercookedWaiter waiter = gen_overcooked_waiter(root.fork("waiter").seed(), spec);
  return {std::move(chef), std::move(waiter)};
}

double overcooked_joint_value(const OvercookedChefParams& chef,
                              const OvercookedWaiterParams& waiter, const OvercookedSpec& spec) {
  if (static_cast<int>(chef.tomato_cells.size()) != spec.m ||
      static_cast<int>(waiter.r_delivery.size()) != spec.m)
    throw ValidationError("overcooked joint: params do not match m");
  const int m = spec.m;
  const ChefRules cr(chef, m);
  const WaiterRules wr(waiter, 0);  // geometry only; food picked per action below

  const int nc = cr.num_states();
  const int npos = static_cast<int>(wr.floor.size());
  const int mask_count = 1 << m;
  // Waiter joint state: (position, carried food or 0, delivered mask).
  const int nw = npos * (m + 1) * mask_count;
  auto wstate = [&](int pos, int carry, int mask) {
    return (pos * (m + 1) + carry) * mask_count + mask;
  };

  const int H = spec.horizon;
  std::vector<double> value(static_cast<size_t>(nc) * nw, 0.0);
  std::vector<double> next_value(static_cast<size_t>(nc) * nw, 0.0);

  // Precompute chef successors per (state, action).
  std::vector<std::vector<std::pair<int, double>>> chef_next(static_cast<size_t>(nc) * kNumActions);
  for (int s = 0; s < nc; ++s)
    for (int a = 0; a < kNumActions; ++a)
      cr.successors(s, a, &chef_next[static_cast<size_t>(s) * kNumActions + a]);

  for (int h = H - 1; h >= 0; --h) {
    for (int sc = 0; sc < nc; ++sc) {
      const double chef_reward = cr.step_reward(sc);
      for (int wpos = 0; wpos < npos; ++wpos) {
        const double dist_penalty = wr.distance_penalty(wpos);
        for (int carry = 0; carry <= m; ++carry) {
          for (int mask = 0; mask < mask_count; ++mask) {
            const int sw = wstate(wpos, carry, mask);
            double best = -1e300;
            for (int ac = 0; ac < kNumActions; ++ac) {
              const auto& outcomes = chef_next[static_cast<size_t>(sc) * kNumActions + ac];
              for (int aw = 0; aw < kNumActions; ++aw) {
                // Waiter effect under the current chef state.
                int nwpos = wpos, ncarry = carry, nmask = mask;
                double bonus = 0.0;
                if (aw < 4) {
                  const int target = wr.target_of(wpos, aw);
                  if (wr.pos_of_cell[target] >= 0) nwpos = wr.pos_of_cell[target];
                } else if (aw < 8) {
                  const int target = wr.target_of(wpos, aw - 4);
                  if (target == kPlateCell && carry == 0) {
                    // Grab the lowest plated food not yet delivered.
                    for (int i = 0; i < m; ++i) {
                      if (cr.plated(sc, i) && !((mask >> i) & 1)) {
                        ncarry = i + 1;
                        break;
                      }
                    }
                  } else if (target == waiter.delivery_cell && carry > 0) {
                    nmask = mask | (1 << (carry - 1));
                    ncarry = 0;
                    bonus = waiter.r_delivery[carry - 1];
                  }
                }
                const int nsw = wstate(nwpos, ncarry, nmask);
                double expect = 0.0;
                for (const auto& [nsc, prob] : outcomes)
                  expect += prob * next_value[static_cast<size_t>(nsc) * nw + nsw];
                const double total = chef_reward + dist_penalty + bonus + expect;
                if (total > best) best = total;
              }
            }
            value[static_cast<size_t>(sc) * nw + sw] = best;
          }
        }
      }
    }
    std::swap(value, next_value);
  }
  const int init_c = cr.state(cr.pos_of_cell[chef.chef_cell], 0, 0);
  const int init_w = wstate(wr.pos_of_cell[waiter.waiter_cell], 0, 0);
  return next_value[static_cast<size_t>(init_c) * nw + init_w];
}

FiniteHorizonMdp build_joint_mmdp(const ProviderModel& pm, const RecipientModel& rm, int feature,
                                  int64_t max_joint_states) {
  pm.validate();
  rm.validate();
  if (pm.mdp.horizon != rm.horizon)
    throw ValidationError("joint model: provider and recipient horizons differ");
  const auto& plus = pm.plus_of(feature);
  const int L = rm.num_local();
  const int H = pm.mdp.horizon;
  int64_t total = 0;
  for (int h = 0; h <= H; ++h)
    total += static_cast<int64_t>(pm.mdp.num_states(h)) * L;
  if (total > max_joint_states)
    throw ValidationError("joint model: " + std::to_string(total) +
                          " product states exceed the budget of " +
                          std::to_string(max_joint_states));

  FiniteHorizonMdp joint;
  joint.horizon = H;
  joint.stage_ids.assign(H + 1, {});
  joint.actions.assign(H, {});
  joint.initial_state = pm.mdp.initial_state * L + rm.initial_local;
  for (int h = 0; h <= H; ++h) {
    const int S = pm.mdp.num_states(h);
    joint.stage_ids[h].resize(static_cast<size_t>(S) * L);
    for (int sp = 0; sp < S; ++sp)
      for (int l = 0; l < L; ++l)
        joint.stage_ids[h][sp * L + l] = h * 1000000 + sp * L + l;
    if (h == H) continue;
    joint.actions[h].resize(static_cast<size_t>(S) * L);
    for (int sp = 0; sp < S; ++sp) {
      const int u = plus[h][sp] ? 1 : 0;
      for (int l = 0; l < L; ++l) {
        auto& slot = joint.actions[h][sp * L + l];
        for (const ActionEntry& ap : pm.mdp.actions[h][sp]) {
          for (int k = 0; k < rm.num_actions(l); ++k) {
            const LocalAction& ar = rm.action(h, l, u, k);
            ActionEntry e;
            e.id = ap.id * 16 + rm.action_ids[l][k];
            e.reward = ap.reward + ar.reward;
            for (const auto& [spn, pp] : ap.next)
              for (const auto& [ln, pr] : ar.next) e.next.push_back({spn * L + ln, pp * pr});
            slot.push_back(std::move(e));
          }
        }
      }
    }
  }
  joint.validate();
  return joint;
}

Influence true_influence(const ProviderModel& pm, const OccupancyMeasure& x, int feature) {
  const auto& plus = pm.plus_of(feature);
  const int H = pm.mdp.horizon;
  std::vector<double> plus_mass(H + 1, 0.0);
  for (int h = 0; h <= H; ++h) {
    for (int s = 0; s < pm.mdp.num_states(h); ++s) {
      if (!plus[h][s]) continue;
      for (double v : x[h][s]) plus_mass[h] += v;
    }
    plus_mass[h] = std::min(plus_mass[h], 1.0);
  }
  Influence inf;
  inf.horizon = H;
  inf.hazard.assign(H, 0.0);
  for (int h = 1; h <= H; ++h) {
    // Mass already plus at stage 0 folds into the first step (the recipient
    // model starts at minus); permanence makes plus_mass monotone.
    const double prev = h == 1 ? 0.0 : plus_mass[h - 1];
    const double remaining = 1.0 - prev;
    const double increment = std::max(plus_mass[h] - prev, 0.0);
    inf.hazard[h - 1] = remaining > 1e-15 ? std::min(increment / remaining, 1.0) : 0.0;
  }
  inf.validate();
  return inf;
}

JointExecutionResult evaluate_joint_execution(const ProviderModel& pm, const RecipientModel& rm,
                                              const Commitment& c, LpMethod method) {
  JointExecutionResult out;
  const CommitmentSolveResult provider = commitment_value(pm, c, method);
  out.provider_value = provider.value;
  out.influence = true_influence(pm, provider.occupancy, c.u_c);
  const RecipientSolveResult recipient = commitment_value(rm, c);
  out.recipient_value = evaluate_under_influence(rm, recipient.policy, out.influence);
  out.total = out.provider_value + out.recipient_value;
  return out;
}

}  // namespace commitkit
