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

#include "commitkit/breakpoints.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>

#include <json.hpp>

#include "commitkit/errors.h"
#include "commitkit/parallel.h"

namespace commitkit {

namespace {

using nlohmann::json;

constexpr double kDedupResolution = 1e-12;

// Sort ascending and drop values within kDedupResolution of the previous one.
std::vector<double> sorted_dedup(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  out.reserve(v.size());
  for (double p : v) {
    if (out.empty() || p - out.back() > kDedupResolution) out.push_back(p);
  }
  return out;
}

json per_t_to_json(const Discretization& d, int feature) {
  json obj = json::object();
  for (const auto& [key, probs] : d.per_T) {
    if (key.first != feature) continue;
    obj[std::to_string(key.second)] = probs;
  }
  return obj;
}

}  // namespace

std::string DiscretizationSpec::kind_name() const {
  switch (kind) {
    case Kind::kBreakpoints:
      return "breakpoints";
    case Kind::kEven:
      return "even";
    case Kind::kDetPolicy:
      return "dp";
  }
  throw ValidationError("unknown discretization kind");
}

DiscretizationSpec::Kind DiscretizationSpec::kind_from_name(const std::string& name) {
  if (name == "breakpoints") return Kind::kBreakpoints;
  if (name == "even") return Kind::kEven;
  if (name == "dp") return Kind::kDetPolicy;
  throw ValidationError("unknown discretization kind: " + name);
}

std::vector<Commitment> Discretization::commitments() const {
  std::vector<Commitment> out;
  for (const auto& [key, probs] : per_T)
    for (double p : probs) out.push_back(Commitment{key.second, p, key.first});
  std::sort(out.begin(), out.end());
  return out;
}

int64_t Discretization::total_size() const {
  int64_t n = 0;
  for (const auto& [key, probs] : per_T) n += static_cast<int64_t>(probs.size());
  return n;
}

double Discretization::mean_size_per_T() const {
  if (per_T.empty()) return 0.0;
  return static_cast<double>(total_size()) / static_cast<double>(per_T.size());
}

std::string Discretization::to_json() const {
  json j;
  j["kind"] = kind;
  std::vector<int> features;
  for (const auto& [key, probs] : per_T)
    if (features.empty() || features.back() != key.first) features.push_back(key.first);
  if (features.size() <= 1) {
    j["per_T"] = per_t_to_json(*this, features.empty() ? 0 : features[0]);
  } else {
    json by_feature = json::object();
    for (int f : features) by_feature[std::to_string(f)] = per_t_to_json(*this, f);
    j["per_feature"] = by_feature;
  }
  if (truncated) j["truncated"] = true;
  return j.dump();
}

Discretization Discretization::from_json(const std::string& text) {
  try {
    json j = json::parse(text);
    Discretization d;
    d.kind = j.at("kind").get<std::string>();
    d.truncated = j.value("truncated", false);
    auto read_per_t = [&d](int feature, const json& obj) {
      for (const auto& [key, probs] : obj.items())
        d.per_T[{feature, std::stoi(key)}] = probs.get<std::vector<double>>();
    };
    if (j.contains("per_feature")) {
      for (const auto& [key, obj] : j.at("per_feature").items()) read_per_t(std::stoi(key), obj);
    } else {
      read_per_t(0, j.at("per_T"));
    }
    return d;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad discretization json: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw ValidationError("bad discretization json: non-integer key");
  }
}

std::vector<double> find_breakpoints(const ProviderModel& pm, int T, int feature, double tol,
                                     double min_width, LpMethod method) {
  if (tol <= 0) throw ValidationError("find_breakpoints: tol must be positive");
  ProviderCommitmentOracle oracle(pm, T, feature, method);
  const double pbar = oracle.max_probability();
  if (pbar <= 0.0) return {0.0};
  if (min_width <= 0) min_width = pbar / static_cast<double>(1 << 20);

  struct Interval {
    double pl, vl, pu, vu;
  };
  std::deque<Interval> queue;
  queue.push_back({0.0, oracle.value(0.0), pbar, oracle.value(pbar)});

  std::vector<double> points;
  while (!queue.empty()) {
    const Interval iv = queue.front();
    queue.pop_front();
    points.push_back(iv.pl);
    points.push_back(iv.pu);
    if (iv.pu - iv.pl < min_width) continue;
    const double pm_mid = 0.5 * (iv.pl + iv.pu);
    const double vm = oracle.value(pm_mid);
    const double deviation = std::abs(vm - 0.5 * (iv.vl + iv.vu));
    if (deviation <= tol * std::max(1.0, std::abs(iv.vl))) continue;  // linear
    queue.push_back({iv.pl, iv.vl, pm_mid, vm});
    queue.push_back({pm_mid, vm, iv.pu, iv.vu});
  }
  return sorted_dedup(std::move(points));
}

namespace {

// Deterministic-policy enumeration for the dp(n) discretization. Policies are
// enumerated in lexicographic order over decision cells; each policy's
// plus-mass at every stage (per feature) is computed with one forward pass.
struct DpEnumerator {
  const ProviderModel& pm;
  std::vector<int> features;
  // Attained plus-masses, keyed like Discretization::per_T.
  std::map<std::pair<int, int>, std::vector<double>> attained;
  bool truncated = false;

  // Decision cells. Stationary mode (base_state present): one cell per base
  // state, applied at every stage. Otherwise one cell per (h, s).
  bool stationary = false;
  std::vector<int> cell_actions;               // action count per cell
  std::vector<std::vector<int>> cell_of;       // [h][s] -> cell index

  explicit DpEnumerator(const ProviderModel& model) : pm(model), features(model.feature_ids()) {
    const int H = pm.mdp.horizon;
    stationary = !pm.base_state.empty();
    cell_of.assign(H, {});
    if (stationary) {
      int n_base = 0;
      for (int h = 0; h < H; ++h)
        for (int b : pm.base_state[h]) n_base = std::max(n_base, b + 1);
      cell_actions.assign(n_base, -1);
      for (int h = 0; h < H; ++h) {
        const int S = static_cast<int>(pm.mdp.stage_ids[h].size());
        cell_of[h].resize(S);
        for (int s = 0; s < S; ++s) {
          const int b = pm.base_state[h][s];
          const int count = static_cast<int>(pm.mdp.actions[h][s].size());
          if (cell_actions[b] == -1) {
            cell_actions[b] = count;
          } else if (cell_actions[b] != count) {
            throw ValidationError("dp discretization: base state " + std::to_string(b) +
                                  " has inconsistent action counts across stages");
          }
          cell_of[h][s] = b;
        }
      }
      for (int b = 0; b < n_base; ++b)
        if (cell_actions[b] == -1) cell_actions[b] = 1;  // never visited
    } else {
      for (int h = 0; h < H; ++h) {
        const int S = static_cast<int>(pm.mdp.stage_ids[h].size());
        cell_of[h].resize(S);
        for (int s = 0; s < S; ++s) {
          cell_of[h][s] = static_cast<int>(cell_actions.size());
          cell_actions.push_back(static_cast<int>(pm.mdp.actions[h][s].size()));
        }
      }
    }
  }

  int64_t total_policies(int64_t cap) const {
    int64_t total = 1;
    for (int count : cell_actions) {
      if (total > (cap + 1) / std::max(count, 1)) return cap + 1;  // saturate
      total *= count;
    }
    return total;
  }

  // Forward pass computing the plus-mass at every stage for one assignment.
  void record(const std::vector<int>& assign) {
    const int H = pm.mdp.horizon;
    std::vector<std::vector<double>> mass(H + 1);
    for (int h = 0; h <= H; ++h) mass[h].assign(pm.mdp.stage_ids[h].size(), 0.0);
    mass[0][pm.mdp.initial_state] = 1.0;
    for (int h = 0; h < H; ++h) {
      const int S = static_cast<int>(mass[h].size());
      for (int s = 0; s < S; ++s) {
        const double m = mass[h][s];
        if (m <= 0.0) continue;
        const ActionEntry& a = pm.mdp.actions[h][s][assign[cell_of[h][s]]];
        for (const auto& [t, prob] : a.next) mass[h + 1][t] += m * prob;
      }
    }
    for (int f : features) {
      const auto& plus = pm.plus_of(f);
      for (int T = 1; T <= H; ++T) {
        double q = 0.0;
        const int S = static_cast<int>(mass[T].size());
        for (int s = 0; s < S; ++s)
          if (plus[T][s]) q += mass[T][s];
        attained[{f, T}].push_back(std::min(q, 1.0));
      }
    }
  }

  void run(int64_t cap) {
    const int64_t total = total_policies(cap);
    truncated = total > cap;
    std::vector<int> assign(cell_actions.size(), 0);
    const int64_t limit = std::min(total, cap);
    for (int64_t i = 0; i < limit; ++i) {
      record(assign);
      // Lexicographic odometer: the last cell varies fastest.
      for (int c = static_cast<int>(assign.size()) - 1; c >= 0; --c) {
        if (++assign[c] < cell_actions[c]) break;
        assign[c] = 0;
      }
    }
  }
};

std::vector<double> group_within(std::vector<double> values, double spacing) {
  std::sort(values.begin(), values.end());
  std::vector<double> out;
  for (double v : values) {
    if (out.empty() || v - out.back() > spacing) out.push_back(v);
  }
  return sorted_dedup(std::move(out));
}

}  // namespace

Discretization build_commitment_set(const ProviderModel& pm, const DiscretizationSpec& spec) {
  pm.validate();
  Discretization d;
  d.kind = spec.kind_name();
  const int H = pm.mdp.horizon;

  if (spec.kind == DiscretizationSpec::Kind::kDetPolicy) {
    if (spec.n <= 0) throw ValidationError("dp discretization: n must be positive");
    DpEnumerator enumerator(pm);
    enumerator.run(spec.dp_cap);
    const double spacing = 1.0 / static_cast<double>(spec.n);
    for (auto& [key, values] : enumerator.attained)
      d.per_T[key] = group_within(std::move(values), spacing);
    d.truncated = enumerator.truncated;
    if (d.truncated && !spec.allow_partial) {
      throw CapExceededError("dp discretization: policy count exceeds cap " +
                                 std::to_string(spec.dp_cap),
                             d);
    }
    return d;
  }

  if (spec.kind == DiscretizationSpec::Kind::kEven && spec.n <= 0)
    throw ValidationError("even discretization: n must be positive");

  // The (feature, stage) cells are independent; fill index-addressed slots on
  // the worker pool, then move them into the map.
  std::vector<std::pair<int, int>> keys;
  for (int f : pm.feature_ids())
    for (int T = 1; T <= H; ++T) keys.emplace_back(f, T);
  std::vector<std::vector<double>> slots(keys.size());
  parallel_for(keys.size(), [&](size_t i) {
    const auto [f, T] = keys[i];
    if (spec.kind == DiscretizationSpec::Kind::kEven) {
      const double pbar = max_feasible_probability(pm, T, f);
      for (int g = 0;; ++g) {
        const double p = static_cast<double>(g) / static_cast<double>(spec.n);
        if (p > pbar + 1e-9) break;
        slots[i].push_back(p);
      }
    } else {
      slots[i] = find_breakpoints(pm, T, f, spec.tol, spec.min_width, spec.method);
    }
  });
  for (size_t i = 0; i < keys.size(); ++i) d.per_T[keys[i]] = std::move(slots[i]);
  return d;
}

EvaluatedCommitmentSet evaluate_commitments(const ProviderModel& pm,
                                            const std::vector<RecipientCandidate>& candidates,
                                            const std::vector<Commitment>& commitments,
                                            LpMethod method) {
  EvaluatedCommitmentSet es;
  es.commitments = commitments;
  std::sort(es.commitments.begin(), es.commitments.end());
  es.commitments.erase(std::unique(es.commitments.begin(), es.commitments.end()),
                       es.commitments.end());
  const int n = es.size();
  es.provider_value.assign(n, 0.0);

  // Group by (feature, stage): each group walks its probabilities in
  // ascending order against one warm-started oracle; groups are independent,
  // so they solve on the worker pool. Slots are index-addressed, which keeps
  // the result identical for any worker count.
  std::map<std::pair<int, int>, std::vector<int>> groups;
  for (int j = 0; j < n; ++j) {
    const Commitment& c = es.commitments[j];
    groups[{c.u_c, c.T}].push_back(j);
  }
  std::vector<const std::vector<int>*> group_list;
  group_list.reserve(groups.size());
  for (const auto& [key, js] : groups) group_list.push_back(&js);
  parallel_for(group_list.size(), [&](size_t g) {
    const std::vector<int>& js = *group_list[g];
    const Commitment& first = es.commitments[js[0]];
    ProviderCommitmentOracle oracle(pm, first.T, first.u_c, method);
    for (int j : js) es.provider_value[j] = oracle.value(es.commitments[j].p);
  });

  es.recipient_value.assign(candidates.size(), std::vector<double>(n, 0.0));
  parallel_for(candidates.size() * static_cast<size_t>(n), [&](size_t idx) {
    const size_t i = idx / static_cast<size_t>(n);
    const int j = static_cast<int>(idx % static_cast<size_t>(n));
    es.recipient_value[i][j] = candidate_value(candidates[i], es.commitments[j]);
  });
  return es;
}

CentralizedResult centralized_optimal_commitment(const ProviderModel& pm,
                                                 const RecipientCandidate& recipient,
                                                 const DiscretizationSpec& spec) {
  for (const auto& [f, rm] : recipient.models) {
    if (!check_assumption_u(rm)) {
      std::fprintf(stderr,
                   "warning: recipient model for feature %d prefers the minus branch somewhere; "
                   "centralized search may be inexact\n",
                   f);
    }
  }
  const Discretization d = build_commitment_set(pm, spec);
  const EvaluatedCommitmentSet es = evaluate_commitments(pm, {recipient}, d.commitments(), spec.method);
  if (es.size() == 0) throw ValidationError("centralized search: empty commitment set");
  int best = 0;
  for (int j = 1; j < es.size(); ++j)
    if (es.joint_value(0, j) > es.joint_value(0, best)) best = j;
  CentralizedResult result;
  result.commitment = es.commitments[best];
  result.provider_value = es.provider_value[best];
  result.recipient_value = es.recipient_value[0][best];
  result.joint_value = es.joint_value(0, best);
  return result;
}

CentralizedResult centralized_optimal_commitment(const ProviderModel& pm,
                                                 const RecipientModel& recipient,
                                                 const DiscretizationSpec& spec) {
  RecipientCandidate rc;
  rc.models.emplace(pm.sole_feature(), recipient);
  return centralized_optimal_commitment(pm, rc, spec);
}

}  // namespace commitkit
