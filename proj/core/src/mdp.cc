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

#include "commitkit/mdp.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include <json.hpp>

#include "commitkit/errors.h"

namespace commitkit {

namespace {

using nlohmann::json;

constexpr double kRowSumTol = 1e-9;
constexpr double kZeroOccupancy = 1e-14;

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

}  // namespace

int64_t FiniteHorizonMdp::num_occupancy_variables() const {
  int64_t n = 0;
  for (int h = 0; h < horizon; ++h)
    for (int s = 0; s < num_states(h); ++s) n += num_actions(h, s);
  return n + num_states(horizon);
}

void FiniteHorizonMdp::validate() const {
  require(horizon >= 1, "horizon must be at least 1");
  require(static_cast<int>(stage_ids.size()) == horizon + 1, "stage_ids must have horizon+1 stages");
  require(static_cast<int>(actions.size()) == horizon, "actions must cover stages 0..horizon-1");
  std::unordered_map<int, int> seen;
  for (int h = 0; h <= horizon; ++h) {
    require(!stage_ids[h].empty(), "stage " + std::to_string(h) + " has no states");
    for (const int id : stage_ids[h])
      require(seen.emplace(id, h).second, "duplicate state id " + std::to_string(id));
  }
  require(initial_state >= 0 && initial_state < num_states(0), "initial_state out of range");
  for (int h = 0; h < horizon; ++h) {
    require(static_cast<int>(actions[h].size()) == num_states(h),
            "actions table shape mismatch at stage " + std::to_string(h));
    for (int s = 0; s < num_states(h); ++s) {
      const auto& acts = actions[h][s];
      require(!acts.empty(), "state (" + std::to_string(h) + "," + std::to_string(s) + ") has no actions");
      for (size_t k = 0; k + 1 < acts.size(); ++k)
        require(acts[k].id < acts[k + 1].id, "action ids must be strictly increasing per state");
      for (const auto& a : acts) {
        require(!a.next.empty(), "empty transition row");
        double sum = 0.0;
        for (const auto& [t, p] : a.next) {
          require(t >= 0 && t < num_states(h + 1), "transition target out of range");
          require(p >= 0.0 && std::isfinite(p), "transition probabilities must be finite and nonnegative");
          sum += p;
        }
        require(std::abs(sum - 1.0) <= kRowSumTol, "transition row does not sum to 1");
        require(std::isfinite(a.reward), "rewards must be finite");
      }
    }
  }
}

std::unordered_map<int, std::pair<int, int>> FiniteHorizonMdp::id_index() const {
  std::unordered_map<int, std::pair<int, int>> index;
  for (int h = 0; h <= horizon; ++h)
    for (int s = 0; s < num_states(h); ++s) index.emplace(stage_ids[h][s], std::make_pair(h, s));
  return index;
}

std::string FiniteHorizonMdp::to_json() const {
  json j;
  j["horizon"] = horizon;
  j["stages"] = json::array();
  for (int h = 0; h <= horizon; ++h) j["stages"].push_back(stage_ids[h]);
  json acts = json::object();
  json trans = json::array();
  json rewards = json::array();
  for (int h = 0; h < horizon; ++h) {
    for (int s = 0; s < num_states(h); ++s) {
      std::vector<int> ids;
      ids.reserve(actions[h][s].size());
      for (const auto& a : actions[h][s]) ids.push_back(a.id);
      acts[std::to_string(stage_ids[h][s])] = ids;
      for (const auto& a : actions[h][s]) {
        auto row = a.next;
        std::sort(row.begin(), row.end());
        json pairs = json::array();
        for (const auto& [t, p] : row) pairs.push_back(json::array({stage_ids[h + 1][t], p}));
        trans.push_back(json::array({h, stage_ids[h][s], a.id, pairs}));
        rewards.push_back(json::array({h, stage_ids[h][s], a.id, a.reward}));
      }
    }
  }
  j["actions"] = std::move(acts);
  j["transitions"] = std::move(trans);
  j["rewards"] = std::move(rewards);
  j["initial_state"] = stage_ids[0][initial_state];
  return j.dump();
}

FiniteHorizonMdp FiniteHorizonMdp::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad mdp json: ") + e.what());
  }
  FiniteHorizonMdp m;
  try {
    m.horizon = j.at("horizon").get<int>();
    require(m.horizon >= 1, "horizon must be at least 1");
    for (const auto& stage : j.at("stages")) m.stage_ids.push_back(stage.get<std::vector<int>>());
    require(static_cast<int>(m.stage_ids.size()) == m.horizon + 1, "stages must have horizon+1 entries");

    const auto index = m.id_index();
    m.actions.resize(m.horizon);
    for (int h = 0; h < m.horizon; ++h) m.actions[h].resize(m.stage_ids[h].size());

    const auto& acts = j.at("actions");
    for (int h = 0; h < m.horizon; ++h) {
      for (size_t s = 0; s < m.stage_ids[h].size(); ++s) {
        const std::string key = std::to_string(m.stage_ids[h][s]);
        require(acts.contains(key), "missing action list for state " + key);
        auto ids = acts.at(key).get<std::vector<int>>();
        require(!ids.empty(), "state " + key + " has no actions");
        std::sort(ids.begin(), ids.end());
        require(std::adjacent_find(ids.begin(), ids.end()) == ids.end(),
                "duplicate action id for state " + key);
        for (const int id : ids) {
          ActionEntry a;
          a.id = id;
          m.actions[h][s].push_back(std::move(a));
        }
      }
    }

    auto locate = [&](int state_id, int stage) -> std::pair<int, int> {
      const auto it = index.find(state_id);
      require(it != index.end(), "unknown state id " + std::to_string(state_id));
      require(it->second.first == stage, "state id " + std::to_string(state_id) + " listed at wrong stage");
      return it->second;
    };
    auto action_slot = [&](int h, int s, int action_id) -> ActionEntry& {
      for (auto& a : m.actions[h][s])
        if (a.id == action_id) return a;
      throw ValidationError("unknown action id " + std::to_string(action_id));
    };

    for (const auto& row : j.at("transitions")) {
      const int h = row.at(0).get<int>();
      require(h >= 0 && h < m.horizon, "transition stage out of range");
      const auto [hs, s] = locate(row.at(1).get<int>(), h);
      ActionEntry& a = action_slot(hs, s, row.at(2).get<int>());
      require(a.next.empty(), "duplicate transition row");
      for (const auto& pair : row.at(3)) {
        const auto it = index.find(pair.at(0).get<int>());
        require(it != index.end() && it->second.first == h + 1, "transition target not in next stage");
        a.next.emplace_back(it->second.second, pair.at(1).get<double>());
      }
    }
    for (const auto& row : j.at("rewards")) {
      const int h = row.at(0).get<int>();
      require(h >= 0 && h < m.horizon, "reward stage out of range");
      const auto [hs, s] = locate(row.at(1).get<int>(), h);
      action_slot(hs, s, row.at(2).get<int>()).reward = row.at(3).get<double>();
    }

    const auto it = index.find(j.at("initial_state").get<int>());
    require(it != index.end() && it->second.first == 0, "initial_state must be a stage-0 id");
    m.initial_state = it->second.second;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad mdp json: ") + e.what());
  }
  m.validate();
  return m;
}

Solution solve(const FiniteHorizonMdp& m) {
  const int H = m.horizon;
  Solution out;
  out.value.assign(H + 1, {});
  out.policy.assign(H, {});
  out.value[H].assign(m.num_states(H), 0.0);
  for (int h = H - 1; h >= 0; --h) {
    const int n = m.num_states(h);
    out.value[h].assign(n, 0.0);
    out.policy[h].resize(n);
    for (int s = 0; s < n; ++s) {
      const auto& acts = m.actions[h][s];
      int best = 0;
      double best_q = -std::numeric_limits<double>::infinity();
      for (size_t k = 0; k < acts.size(); ++k) {
        double q = acts[k].reward;
        for (const auto& [t, p] : acts[k].next) q += p * out.value[h + 1][t];
        if (q > best_q) {
          best_q = q;
          best = static_cast<int>(k);
        }
      }
      out.value[h][s] = best_q;
      out.policy[h][s].assign(acts.size(), 0.0);
      out.policy[h][s][best] = 1.0;
    }
  }
  return out;
}

void validate_policy(const FiniteHorizonMdp& m, const Policy& pi) {
  require(static_cast<int>(pi.size()) == m.horizon, "policy must cover stages 0..horizon-1");
  for (int h = 0; h < m.horizon; ++h) {
    require(static_cast<int>(pi[h].size()) == m.num_states(h), "policy shape mismatch");
    for (int s = 0; s < m.num_states(h); ++s) {
      require(pi[h][s].size() == m.actions[h][s].size(), "policy row shape mismatch");
      double sum = 0.0;
      for (const double p : pi[h][s]) {
        require(p >= 0.0 && std::isfinite(p), "policy probabilities must be finite and nonnegative");
        sum += p;
      }
      require(std::abs(sum - 1.0) <= kRowSumTol, "policy row does not sum to 1");
    }
  }
}

ValueTable evaluate(const FiniteHorizonMdp& m, const Policy& pi) {
  validate_policy(m, pi);
  const int H = m.horizon;
  ValueTable v(H + 1);
  v[H].assign(m.num_states(H), 0.0);
  for (int h = H - 1; h >= 0; --h) {
    const int n = m.num_states(h);
    v[h].assign(n, 0.0);
    for (int s = 0; s < n; ++s) {
      const auto& acts = m.actions[h][s];
      double val = 0.0;
      for (size_t k = 0; k < acts.size(); ++k) {
        const double w = pi[h][s][k];
        if (w == 0.0) continue;
        double q = acts[k].reward;
        for (const auto& [t, p] : acts[k].next) q += p * v[h + 1][t];
        val += w * q;
      }
      v[h][s] = val;
    }
  }
  return v;
}

OccupancyMeasure occupancy(const FiniteHorizonMdp& m, const Policy& pi) {
  validate_policy(m, pi);
  const int H = m.horizon;
  OccupancyMeasure x(H + 1);
  std::vector<double> mass(m.num_states(0), 0.0);
  mass[m.initial_state] = 1.0;
  for (int h = 0; h < H; ++h) {
    const int n = m.num_states(h);
    x[h].resize(n);
    std::vector<double> next_mass(m.num_states(h + 1), 0.0);
    for (int s = 0; s < n; ++s) {
      const auto& acts = m.actions[h][s];
      x[h][s].assign(acts.size(), 0.0);
      if (mass[s] == 0.0) continue;
      for (size_t k = 0; k < acts.size(); ++k) {
        const double xa = mass[s] * pi[h][s][k];
        x[h][s][k] = xa;
        if (xa == 0.0) continue;
        for (const auto& [t, p] : acts[k].next) next_mass[t] += xa * p;
      }
    }
    mass = std::move(next_mass);
  }
  x[H].resize(m.num_states(H));
  for (int s = 0; s < m.num_states(H); ++s) x[H][s].assign(1, mass[s]);
  return x;
}

Policy policy_from_occupancy(const FiniteHorizonMdp& m, const OccupancyMeasure& x) {
  require(static_cast<int>(x.size()) == m.horizon + 1, "occupancy must cover stages 0..horizon");
  Policy pi(m.horizon);
  for (int h = 0; h < m.horizon; ++h) {
    const int n = m.num_states(h);
    require(static_cast<int>(x[h].size()) == n, "occupancy shape mismatch");
    pi[h].resize(n);
    for (int s = 0; s < n; ++s) {
      const size_t na = m.actions[h][s].size();
      require(x[h][s].size() == na, "occupancy row shape mismatch");
      double sum = 0.0;
      for (const double v : x[h][s]) sum += std::max(v, 0.0);
      if (sum <= kZeroOccupancy) {
        pi[h][s].assign(na, 1.0 / static_cast<double>(na));
      } else {
        pi[h][s].resize(na);
        for (size_t k = 0; k < na; ++k) pi[h][s][k] = std::max(x[h][s][k], 0.0) / sum;
      }
    }
  }
  return pi;
}

double occupancy_reward(const FiniteHorizonMdp& m, const OccupancyMeasure& x) {
  double total = 0.0;
  for (int h = 0; h < m.horizon; ++h)
    for (int s = 0; s < m.num_states(h); ++s)
      for (size_t k = 0; k < m.actions[h][s].size(); ++k)
        total += x[h][s][k] * m.actions[h][s][k].reward;
  return total;
}

Policy uniform_policy(const FiniteHorizonMdp& m) {
  Policy pi(m.horizon);
  for (int h = 0; h < m.horizon; ++h) {
    pi[h].resize(m.num_states(h));
    for (int s = 0; s < m.num_states(h); ++s)
      pi[h][s].assign(m.actions[h][s].size(), 1.0 / static_cast<double>(m.actions[h][s].size()));
  }
  return pi;
}

Policy det_to_policy(const FiniteHorizonMdp& m, const DetPolicy& d) {
  Policy pi(m.horizon);
  for (int h = 0; h < m.horizon; ++h) {
    pi[h].resize(m.num_states(h));
    for (int s = 0; s < m.num_states(h); ++s) {
      pi[h][s].assign(m.actions[h][s].size(), 0.0);
      pi[h][s].at(d[h][s]) = 1.0;
    }
  }
  return pi;
}

uint64_t policy_fingerprint(const Policy& pi) {
  uint64_t h = 14695981039346656037ULL;
  auto feed = [&h](uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xff;
      h *= 1099511628211ULL;
    }
  };
  feed(pi.size());
  for (const auto& stage : pi) {
    feed(stage.size());
    for (const auto& row : stage) {
      feed(row.size());
      for (const double p : row) {
        uint64_t bits;
        std::memcpy(&bits, &p, sizeof(bits));
        feed(bits);
      }
    }
  }
  return h;
}

}  // namespace commitkit
