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

#include "commitkit/recipient.h"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "commitkit/errors.h"

namespace commitkit {

namespace {

using nlohmann::json;

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

}  // namespace

void Influence::validate() const {
  require(horizon >= 1, "influence horizon must be at least 1");
  require(static_cast<int>(hazard.size()) == horizon, "hazard must have one entry per stage 1..horizon");
  for (const double l : hazard)
    require(l >= 0.0 && l <= 1.0 && std::isfinite(l), "hazard rates must be probabilities");
}

std::string Influence::to_json() const {
  json j;
  j["horizon"] = horizon;
  j["hazard"] = hazard;
  return j.dump();
}

Influence Influence::from_json(const std::string& text) {
  Influence inf;
  try {
    const json j = json::parse(text);
    inf.horizon = j.at("horizon").get<int>();
    inf.hazard = j.at("hazard").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad influence json: ") + e.what());
  }
  inf.validate();
  return inf;
}

Influence single_branch_influence(const Commitment& c, int horizon) {
  require(c.T >= 1 && c.T <= horizon, "commitment stage must be in 1..horizon");
  require(c.p >= 0.0 && c.p <= 1.0, "commitment probability must be in [0,1]");
  Influence inf;
  inf.horizon = horizon;
  inf.hazard.assign(horizon, 0.0);
  inf.hazard[c.T - 1] = c.p;
  return inf;
}

void RecipientModel::validate() const {
  require(horizon >= 1, "horizon must be at least 1");
  require(!local_ids.empty(), "recipient needs at least one local state");
  {
    auto sorted = local_ids;
    std::sort(sorted.begin(), sorted.end());
    require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
            "duplicate local state id");
  }
  require(initial_local >= 0 && initial_local < num_local(), "initial local state out of range");
  require(static_cast<int>(action_ids.size()) == num_local(), "action table shape mismatch");
  require(static_cast<int>(table.size()) == horizon, "transition table must cover stages 0..horizon-1");
  for (int l = 0; l < num_local(); ++l) {
    require(!action_ids[l].empty(), "local state has no actions");
    for (size_t k = 0; k + 1 < action_ids[l].size(); ++k)
      require(action_ids[l][k] < action_ids[l][k + 1], "action ids must be strictly increasing");
  }
  for (int h = 0; h < horizon; ++h) {
    require(static_cast<int>(table[h].size()) == num_local(), "table shape mismatch");
    for (int l = 0; l < num_local(); ++l) {
      for (int u = 0; u < 2; ++u) {
        require(static_cast<int>(table[h][l][u].size()) == num_actions(l), "table row missing");
        for (const LocalAction& a : table[h][l][u]) {
          require(!a.next.empty(), "empty local transition row");
          double sum = 0.0;
          for (const auto& [t, p] : a.next) {
            require(t >= 0 && t < num_local(), "local transition target out of range");
            require(p >= 0.0 && std::isfinite(p), "local transition probabilities must be valid");
            sum += p;
          }
          require(std::abs(sum - 1.0) <= 1e-9, "local transition row does not sum to 1");
          require(std::isfinite(a.reward), "local rewards must be finite");
        }
      }
    }
  }
}

std::string RecipientModel::to_json() const {
  json j;
  j["horizon"] = horizon;
  j["local_states"] = local_ids;
  j["initial_local_state"] = local_ids[initial_local];
  json acts = json::object();
  for (int l = 0; l < num_local(); ++l) acts[std::to_string(local_ids[l])] = action_ids[l];
  j["actions"] = std::move(acts);

  // Rows identical across stages collapse to one h = -1 row.
  auto stationary = [&](int l, int u, int k) {
    for (int h = 1; h < horizon; ++h) {
      const LocalAction& a = table[h][l][u][k];
      const LocalAction& b = table[0][l][u][k];
      if (a.reward != b.reward || a.next != b.next) return false;
    }
    return true;
  };

  json trans = json::array();
  json rewards = json::array();
  auto emit = [&](int h, int l, int u, int k, const LocalAction& a) {
    auto row = a.next;
    std::sort(row.begin(), row.end());
    json pairs = json::array();
    for (const auto& [t, p] : row) pairs.push_back(json::array({local_ids[t], p}));
    trans.push_back(json::array({h, local_ids[l], u, action_ids[l][k], pairs}));
    rewards.push_back(json::array({h, local_ids[l], u, action_ids[l][k], a.reward}));
  };
  for (int l = 0; l < num_local(); ++l) {
    for (int u = 0; u < 2; ++u) {
      for (int k = 0; k < num_actions(l); ++k) {
        if (stationary(l, u, k)) {
          emit(-1, l, u, k, table[0][l][u][k]);
        } else {
          for (int h = 0; h < horizon; ++h) emit(h, l, u, k, table[h][l][u][k]);
        }
      }
    }
  }
  j["transitions"] = std::move(trans);
  j["rewards"] = std::move(rewards);
  return j.dump();
}

RecipientModel RecipientModel::from_json(const std::string& text) {
  RecipientModel rm;
  try {
    const json j = json::parse(text);
    rm.horizon = j.at("horizon").get<int>();
    rm.local_ids = j.at("local_states").get<std::vector<int>>();
    std::unordered_map<int, int> index;
    for (int l = 0; l < rm.num_local(); ++l) index[rm.local_ids[l]] = l;
    const auto it = index.find(j.at("initial_local_state").get<int>());
    require(it != index.end(), "unknown initial local state");
    rm.initial_local = it->second;

    rm.action_ids.resize(rm.num_local());
    const auto& acts = j.at("actions");
    for (int l = 0; l < rm.num_local(); ++l) {
      const std::string key = std::to_string(rm.local_ids[l]);
      require(acts.contains(key), "missing action list for local state " + key);
      rm.action_ids[l] = acts.at(key).get<std::vector<int>>();
      std::sort(rm.action_ids[l].begin(), rm.action_ids[l].end());
    }
    rm.table.resize(rm.horizon);
    for (int h = 0; h < rm.horizon; ++h) {
      rm.table[h].resize(rm.num_local());
      for (int l = 0; l < rm.num_local(); ++l)
        for (int u = 0; u < 2; ++u) rm.table[h][l][u].resize(rm.num_actions(l));
    }

    auto slot = [&](const json& row) -> std::vector<std::pair<int, LocalAction*>> {
      const int h = row.at(0).get<int>();
      const auto lit = index.find(row.at(1).get<int>());
      require(lit != index.end(), "unknown local state id");
      const int l = lit->second;
      const int u = row.at(2).get<int>();
      require(u == 0 || u == 1, "u must be 0 or 1");
      const int aid = row.at(3).get<int>();
      const auto ait = std::find(rm.action_ids[l].begin(), rm.action_ids[l].end(), aid);
      require(ait != rm.action_ids[l].end(), "unknown local action id");
      const int k = static_cast<int>(ait - rm.action_ids[l].begin());
      std::vector<std::pair<int, LocalAction*>> out;
      if (h == -1) {
        for (int hh = 0; hh < rm.horizon; ++hh) out.emplace_back(hh, &rm.table[hh][l][u][k]);
      } else {
        require(h >= 0 && h < rm.horizon, "stage out of range");
        out.emplace_back(h, &rm.table[h][l][u][k]);
      }
      return out;
    };

    for (const auto& row : j.at("transitions")) {
      for (auto& [h, a] : slot(row)) {
        (void)h;
        require(a->next.empty(), "duplicate local transition row");
        for (const auto& pair : row.at(4)) {
          const auto tit = index.find(pair.at(0).get<int>());
          require(tit != index.end(), "unknown local transition target");
          a->next.emplace_back(tit->second, pair.at(1).get<double>());
        }
      }
    }
    for (const auto& row : j.at("rewards")) {
      for (auto& [h, a] : slot(row)) {
        (void)h;
        a->reward = row.at(4).get<double>();
      }
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad recipient json: ") + e.what());
  }
  rm.validate();
  return rm;
}

FiniteHorizonMdp build_approx_model(const RecipientModel& rm, const Influence& inf) {
  inf.validate();
  require(inf.horizon == rm.horizon, "influence horizon mismatch");
  const int L = rm.num_local();
  FiniteHorizonMdp m;
  m.horizon = rm.horizon;
  m.stage_ids.resize(m.horizon + 1);
  m.actions.resize(m.horizon);
  for (int h = 0; h <= m.horizon; ++h) {
    m.stage_ids[h].reserve(2 * L);
    for (int u = 0; u < 2; ++u)
      for (int l = 0; l < L; ++l) m.stage_ids[h].push_back((h * 2 + u) * L + l);
  }
  m.initial_state = rm.initial_local;  // (l0, u = 0) sits first in the minus block
  for (int h = 0; h < m.horizon; ++h) {
    // Flip probability on the step entering stage h+1.
    const double lam = inf.hazard[h];
    m.actions[h].resize(2 * L);
    for (int u = 0; u < 2; ++u) {
      for (int l = 0; l < L; ++l) {
        auto& acts = m.actions[h][u * L + l];
        acts.resize(rm.num_actions(l));
        for (int k = 0; k < rm.num_actions(l); ++k) {
          const LocalAction& la = rm.action(h, l, u, k);
          ActionEntry& a = acts[k];
          a.id = rm.action_ids[l][k];
          a.reward = la.reward;
          for (const auto& [t, p] : la.next) {
            if (u == 1) {
              a.next.emplace_back(L + t, p);
            } else if (lam == 0.0) {
              a.next.emplace_back(t, p);
            } else {
              if (lam < 1.0) a.next.emplace_back(t, p * (1.0 - lam));
              a.next.emplace_back(L + t, p * lam);
            }
          }
        }
      }
    }
  }
  m.validate();
  return m;
}

RecipientSolveResult commitment_value(const RecipientModel& rm, const Commitment& c) {
  const FiniteHorizonMdp m = build_approx_model(rm, single_branch_influence(c, rm.horizon));
  Solution sol = solve(m);
  return {initial_value(m, sol.value), std::move(sol.policy)};
}

double evaluate_under_influence(const RecipientModel& rm, const Policy& pi, const Influence& inf) {
  const FiniteHorizonMdp m = build_approx_model(rm, inf);
  return initial_value(m, evaluate(m, pi));
}

std::pair<double, double> conditional_values(const RecipientModel& rm, const Commitment& c) {
  const RecipientSolveResult sol = commitment_value(rm, c);
  Commitment sure = c;
  sure.p = 1.0;
  const double v1 = evaluate_under_influence(rm, sol.policy, single_branch_influence(sure, rm.horizon));
  sure.p = 0.0;
  const double v0 = evaluate_under_influence(rm, sol.policy, single_branch_influence(sure, rm.horizon));
  return {v1, v0};
}

AssumptionCheck check_assumption_u(const RecipientModel& rm) {
  const int L = rm.num_local();
  // Optimal values with u pinned to each branch.
  std::array<std::vector<std::vector<double>>, 2> v;
  for (int u = 0; u < 2; ++u) {
    v[u].assign(rm.horizon + 1, std::vector<double>(L, 0.0));
    for (int h = rm.horizon - 1; h >= 0; --h) {
      for (int l = 0; l < L; ++l) {
        double best = -std::numeric_limits<double>::infinity();
        for (int k = 0; k < rm.num_actions(l); ++k) {
          const LocalAction& a = rm.action(h, l, u, k);
          double q = a.reward;
          for (const auto& [t, p] : a.next) q += p * v[u][h + 1][t];
          best = std::max(best, q);
        }
        v[u][h][l] = best;
      }
    }
  }
  AssumptionCheck out;
  for (int h = 0; h <= rm.horizon; ++h) {
    for (int l = 0; l < L; ++l) {
      const double gap = v[0][h][l] - v[1][h][l];
      if (gap > 1e-12 && gap > out.gap) {
        out.holds = false;
        out.stage = h;
        out.local = l;
        out.gap = gap;
      }
    }
  }
  return out;
}

const RecipientModel& RecipientCandidate::for_feature(int feature) const {
  auto it = models.find(feature);
  if (it == models.end())
    throw ValidationError("recipient candidate has no model for feature " + std::to_string(feature));
  return it->second;
}

int RecipientCandidate::horizon() const {
  if (models.empty()) throw ValidationError("recipient candidate has no models");
  const int h = models.begin()->second.horizon;
  for (const auto& [f, rm] : models)
    if (rm.horizon != h) throw ValidationError("recipient candidate horizons differ across features");
  return h;
}

double candidate_value(const RecipientCandidate& rc, const Commitment& c) {
  return commitment_value(rc.for_feature(c.u_c), c).value;
}

}  // namespace commitkit
