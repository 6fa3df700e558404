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

// Shared test fixtures and independent reference implementations ("oracles").
// Everything here recomputes results from first principles — plain backward
// induction, exhaustive policy enumeration, convex-hull mixing — so the
// library under test is never used to check itself.

#ifndef COMMITKIT_TESTS_TEST_UTIL_H_
#define COMMITKIT_TESTS_TEST_UTIL_H_

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "commitkit/mdp.h"
#include "commitkit/provider.h"
#include "commitkit/recipient.h"
#include "commitkit/rng.h"

namespace testutil {

// A dense random stage-partitioned MDP with external ids h*100+i.
inline commitkit::FiniteHorizonMdp random_mdp(commitkit::Rng& rng, int horizon, int states,
                                              int num_actions) {
  commitkit::FiniteHorizonMdp m;
  m.horizon = horizon;
  m.stage_ids.assign(horizon + 1, {});
  m.actions.assign(horizon, {});
  for (int h = 0; h <= horizon; ++h)
    for (int i = 0; i < states; ++i) m.stage_ids[h].push_back(h * 100 + i);
  for (int h = 0; h < horizon; ++h) {
    m.actions[h].resize(states);
    for (int s = 0; s < states; ++s) {
      for (int a = 0; a < num_actions; ++a) {
        commitkit::ActionEntry e;
        e.id = a;
        double total = 0.0;
        std::vector<double> w(states);
        for (int t = 0; t < states; ++t) total += w[t] = rng.next_double() + 1e-3;
        for (int t = 0; t < states; ++t) e.next.emplace_back(t, w[t] / total);
        e.reward = rng.next_double();
        m.actions[h][s].push_back(std::move(e));
      }
    }
  }
  m.initial_state = 0;
  return m;
}

// Random dense provider: the last state is absorbing-plus on feature 0 with
// zero reward; base_state stays empty, so deterministic-policy enumeration
// runs per (stage, state).
inline commitkit::ProviderModel random_provider(commitkit::Rng& rng, int horizon, int states,
                                                int actions) {
  commitkit::ProviderModel pm;
  pm.mdp = random_mdp(rng, horizon, states, actions);
  const int plus_idx = states - 1;
  for (int h = 0; h < horizon; ++h)
    for (commitkit::ActionEntry& e : pm.mdp.actions[h][plus_idx]) {
      e.next = {{plus_idx, 1.0}};
      e.reward = 0.0;
    }
  std::vector<std::vector<char>> mask(horizon + 1);
  for (int h = 0; h <= horizon; ++h) {
    mask[h].assign(states, 0);
    mask[h][plus_idx] = 1;
  }
  pm.plus[0] = mask;
  pm.validate();
  return pm;
}

// Enumerates deterministic policies in lexicographic order, calling fn for
// each, up to cap; returns how many were visited.
template <typename Fn>
int64_t for_each_det_policy(const commitkit::FiniteHorizonMdp& m, int64_t cap, Fn&& fn) {
  std::vector<std::pair<int, int>> slots;
  for (int h = 0; h < m.horizon; ++h)
    for (int s = 0; s < m.num_states(h); ++s) slots.emplace_back(h, s);
  commitkit::DetPolicy d(m.horizon);
  for (int h = 0; h < m.horizon; ++h) d[h].assign(m.num_states(h), 0);
  int64_t count = 0;
  for (;;) {
    fn(static_cast<const commitkit::DetPolicy&>(d));
    if (++count >= cap) return count;
    int i = static_cast<int>(slots.size()) - 1;
    for (; i >= 0; --i) {
      const auto [h, s] = slots[i];
      if (++d[h][s] < m.num_actions(h, s)) break;
      d[h][s] = 0;
    }
    if (i < 0) return count;
  }
}

// Value of a deterministic policy by straightforward backward induction.
inline double det_policy_value(const commitkit::FiniteHorizonMdp& m,
                               const commitkit::DetPolicy& d) {
  std::vector<std::vector<double>> v(m.horizon + 1);
  v[m.horizon].assign(m.num_states(m.horizon), 0.0);
  for (int h = m.horizon - 1; h >= 0; --h) {
    v[h].assign(m.num_states(h), 0.0);
    for (int s = 0; s < m.num_states(h); ++s) {
      const commitkit::ActionEntry& a = m.actions[h][s][d[h][s]];
      double q = a.reward;
      for (const auto& [t, pr] : a.next) q += pr * v[h + 1][t];
      v[h][s] = q;
    }
  }
  return v[0][m.initial_state];
}

// Probability mass on plus states at stage T under a deterministic policy.
inline double det_policy_plus_mass(const commitkit::ProviderModel& pm,
                                   const commitkit::DetPolicy& d, int T, int feature) {
  const commitkit::FiniteHorizonMdp& m = pm.mdp;
  const auto& plus = pm.plus_of(feature);
  std::vector<double> mass(m.num_states(0), 0.0);
  mass[m.initial_state] = 1.0;
  for (int h = 0; h < T; ++h) {
    std::vector<double> next(m.num_states(h + 1), 0.0);
    for (int s = 0; s < m.num_states(h); ++s) {
      if (mass[s] == 0.0) continue;
      const commitkit::ActionEntry& a = m.actions[h][s][d[h][s]];
      for (const auto& [t, pr] : a.next) next[t] += mass[s] * pr;
    }
    mass = std::move(next);
  }
  double total = 0.0;
  for (int s = 0; s < m.num_states(T); ++s)
    if (plus[T][s]) total += mass[s];
  return total;
}

// Best value attainable by mixing two achievement points (q_i, V_i) subject
// to the mixed q reaching at least p: the upper concave hull of the point
// cloud, evaluated at p. Returns -inf when no point reaches p.
inline double hull_value(std::vector<std::pair<double, double>> pts, double p) {
  // Keep only frontier points: q strictly increasing, V strictly decreasing.
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second > b.second;
  });
  std::vector<std::pair<double, double>> frontier;
  double best_v = -std::numeric_limits<double>::infinity();
  for (const auto& pt : pts) {
    if (pt.second > best_v + 1e-15) {
      frontier.push_back(pt);
      best_v = pt.second;
    }
  }
  double best = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < frontier.size(); ++i) {
    if (frontier[i].first >= p - 1e-12) best = std::max(best, frontier[i].second);
    for (size_t j = i + 1; j < frontier.size(); ++j) {
      const auto [qh, vh] = frontier[i];  // higher q, lower V
      const auto [ql, vl] = frontier[j];
      if (qh < p || ql > p || qh - ql < 1e-15) continue;
      const double lam = (p - ql) / (qh - ql);  // weight on the high-q point
      best = std::max(best, lam * vh + (1.0 - lam) * vl);
    }
  }
  return best;
}

// v^p(T, p) recomputed from scratch: enumerate all deterministic policies,
// collect (plus mass at T, value), and evaluate the hull at p.
inline double provider_value_oracle(const commitkit::ProviderModel& pm, int T, int feature,
                                    double p, int64_t cap = 1 << 22) {
  std::vector<std::pair<double, double>> pts;
  for_each_det_policy(pm.mdp, cap, [&](const commitkit::DetPolicy& d) {
    pts.emplace_back(det_policy_plus_mass(pm, d, T, feature), det_policy_value(pm.mdp, d));
  });
  return hull_value(std::move(pts), p);
}

// v^r(T, p) recomputed from scratch: backward induction over (local, u) with
// the flip landing on the step entering stage T.
inline double recipient_value_oracle(const commitkit::RecipientModel& rm,
                                     const commitkit::Commitment& c) {
  const int L = rm.num_local();
  const int H = rm.horizon;
  // v[u][l] at the current stage; u = 1 is absorbing plus.
  std::vector<std::vector<double>> v(2, std::vector<double>(L, 0.0));
  for (int h = H - 1; h >= 0; --h) {
    std::vector<std::vector<double>> cur(2, std::vector<double>(L, 0.0));
    for (int u = 0; u < 2; ++u) {
      for (int l = 0; l < L; ++l) {
        double best = -std::numeric_limits<double>::infinity();
        for (int k = 0; k < rm.num_actions(l); ++k) {
          const commitkit::LocalAction& a = rm.action(h, l, u, k);
          double q = a.reward;
          for (const auto& [t, pr] : a.next) {
            if (u == 1) {
              q += pr * v[1][t];
            } else if (h + 1 == c.T) {
              q += pr * (c.p * v[1][t] + (1.0 - c.p) * v[0][t]);
            } else {
              q += pr * v[0][t];
            }
          }
          best = std::max(best, q);
        }
        cur[u][l] = best;
      }
    }
    v = std::move(cur);
  }
  return v[0][rm.initial_local];
}

}  // namespace testutil

#endif  // COMMITKIT_TESTS_TEST_UTIL_H_
