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

#include "commitkit/query.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "commitkit/errors.h"

namespace commitkit {

namespace {

using nlohmann::json;

constexpr double kWeightTol = 1e-9;

void check_candidate(const EvaluatedCommitmentSet& es, const Belief& mu) {
  if (es.recipient_value.size() != static_cast<size_t>(mu.size()))
    throw ValidationError("belief size does not match the evaluated candidate count");
}

void check_query(const EvaluatedCommitmentSet& es, const Query& q) {
  if (q.empty()) throw ValidationError("query must be nonempty");
  for (int j : q)
    if (j < 0 || j >= es.size()) throw ValidationError("query index out of range");
}

}  // namespace

void Belief::validate() const {
  if (weights.empty()) throw ValidationError("belief has no candidates");
  if (!candidate_ids.empty() && candidate_ids.size() != weights.size())
    throw ValidationError("belief candidate ids do not match weights");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw ValidationError("belief weights must be nonnegative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > kWeightTol) throw ValidationError("belief weights must sum to 1");
}

Belief Belief::uniform(int n) {
  if (n <= 0) throw ValidationError("belief needs at least one candidate");
  Belief b;
  b.weights.assign(n, 1.0 / n);
  b.candidate_ids.resize(n);
  std::iota(b.candidate_ids.begin(), b.candidate_ids.end(), 0);
  return b;
}

std::string Belief::to_json() const {
  json j;
  j["weights"] = weights;
  if (candidate_ids.empty()) {
    std::vector<int> ids(weights.size());
    std::iota(ids.begin(), ids.end(), 0);
    j["candidates"] = ids;
  } else {
    j["candidates"] = candidate_ids;
  }
  return j.dump();
}

Belief Belief::from_json(const std::string& text) {
  try {
    json j = json::parse(text);
    Belief b;
    b.weights = j.at("weights").get<std::vector<double>>();
    if (j.contains("candidates")) b.candidate_ids = j.at("candidates").get<std::vector<int>>();
    b.validate();
    return b;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad belief json: ") + e.what());
  }
}

double expected_utility(const EvaluatedCommitmentSet& es, const Belief& mu, int commitment) {
  check_candidate(es, mu);
  if (commitment < 0 || commitment >= es.size())
    throw ValidationError("commitment index out of range");
  double total = 0.0;
  for (int i = 0; i < mu.size(); ++i) total += mu.weights[i] * es.joint_value(i, commitment);
  return total;
}

int optimal_commitment_under_belief(const EvaluatedCommitmentSet& es, const Belief& mu) {
  check_candidate(es, mu);
  if (es.size() == 0) throw ValidationError("empty commitment set");
  int best = 0;
  double best_value = expected_utility(es, mu, 0);
  for (int j = 1; j < es.size(); ++j) {
    const double v = expected_utility(es, mu, j);
    if (v > best_value) {
      best = j;
      best_value = v;
    }
  }
  return best;
}

int selected_index(const EvaluatedCommitmentSet& es, int candidate, const Query& q) {
  check_query(es, q);
  if (candidate < 0 || candidate >= static_cast<int>(es.recipient_value.size()))
    throw ValidationError("candidate index out of range");
  int best = 0;
  double best_value = es.joint_value(candidate, q[0]);
  for (int r = 1; r < static_cast<int>(q.size()); ++r) {
    const double v = es.joint_value(candidate, q[r]);
    if (v > best_value) {
      best = r;
      best_value = v;
    }
  }
  return best;
}

double eus(const EvaluatedCommitmentSet& es, const Belief& mu, const Query& q) {
  check_candidate(es, mu);
  check_query(es, q);
  double total = 0.0;
  for (int i = 0; i < mu.size(); ++i) {
    double best = -std::numeric_limits<double>::infinity();
    for (int j : q) best = std::max(best, es.joint_value(i, j));
    total += mu.weights[i] * best;
  }
  return total;
}

double eus_upper_bound(const EvaluatedCommitmentSet& es, const Belief& mu) {
  check_candidate(es, mu);
  if (es.size() == 0) throw ValidationError("empty commitment set");
  double total = 0.0;
  for (int i = 0; i < mu.size(); ++i) {
    double best = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < es.size(); ++j) best = std::max(best, es.joint_value(i, j));
    total += mu.weights[i] * best;
  }
  return total;
}

Belief posterior(const EvaluatedCommitmentSet& es, const Belief& mu, const Query& q,
                 int response) {
  check_candidate(es, mu);
  check_query(es, q);
  if (response < 0 || response >= static_cast<int>(q.size()))
    throw ValidationError("response index out of range");
  Belief out = mu;
  double sum = 0.0;
  for (int i = 0; i < mu.size(); ++i) {
    const bool matches = mu.weights[i] > 0.0 && selected_index(es, i, q) == response;
    out.weights[i] = matches ? mu.weights[i] : 0.0;
    sum += out.weights[i];
  }
  if (sum <= 0.0)
    throw InconsistentResponseError("no candidate with positive weight selects entry " +
                                    std::to_string(response));
  for (double& w : out.weights) w /= sum;
  return out;
}

Query greedy_query(const EvaluatedCommitmentSet& es, const Belief& mu, int k) {
  check_candidate(es, mu);
  if (k <= 0) throw ValidationError("query size must be positive");
  if (es.size() == 0) throw ValidationError("empty commitment set");
  const int n = es.size();
  const int N = mu.size();
  std::vector<double> best_per_candidate(N, -std::numeric_limits<double>::infinity());
  std::vector<char> taken(n, 0);
  Query q;
  const int rounds = std::min(k, n);
  for (int t = 0; t < rounds; ++t) {
    int pick = -1;
    double pick_value = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
      if (taken[j]) continue;
      double value = 0.0;
      for (int i = 0; i < N; ++i)
        value += mu.weights[i] * std::max(best_per_candidate[i], es.joint_value(i, j));
      if (value > pick_value) {
        pick = j;
        pick_value = value;
      }
    }
    taken[pick] = 1;
    q.push_back(pick);
    for (int i = 0; i < N; ++i)
      best_per_candidate[i] = std::max(best_per_candidate[i], es.joint_value(i, pick));
  }
  return q;
}

Query exhaustive_query(const EvaluatedCommitmentSet& es, const Belief& mu, int k, int64_t budget) {
  check_candidate(es, mu);
  if (k <= 0) throw ValidationError("query size must be positive");
  const int n = es.size();
  if (n == 0) throw ValidationError("empty commitment set");
  if (k > n) k = n;

  // C(n, k), saturating at budget + 1.
  int64_t count = 1;
  for (int i = 1; i <= k; ++i) {
    count = count * (n - k + i);
    count /= i;
    if (count > budget) {
      throw BudgetExceededError("exhaustive query: subset count exceeds budget", count, budget);
    }
  }

  std::vector<int> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  Query best;
  double best_value = -std::numeric_limits<double>::infinity();
  while (true) {
    double value = eus(es, mu, idx);
    if (value > best_value) {
      best = idx;
      best_value = value;
    }
    // Next combination in lexicographic order.
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int r = i + 1; r < k; ++r) idx[r] = idx[r - 1] + 1;
  }
  return best;
}

Query random_query(const EvaluatedCommitmentSet& es, int k, Rng& rng) {
  if (k <= 0) throw ValidationError("query size must be positive");
  const int n = es.size();
  if (n == 0) throw ValidationError("empty commitment set");
  if (k > n) k = n;
  std::vector<int> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  for (int t = 0; t < k; ++t) {
    const int r = t + static_cast<int>(rng.next_below(static_cast<uint64_t>(n - t)));
    std::swap(pool[t], pool[r]);
  }
  Query q(pool.begin(), pool.begin() + k);
  std::sort(q.begin(), q.end());
  return q;
}

PriorKind prior_kind_from_name(const std::string& name) {
  if (name == "uniform") return PriorKind::kUniform;
  if (name == "random") return PriorKind::kRandom;
  if (name == "gaussian") return PriorKind::kGaussian;
  throw ValidationError("unknown prior kind: " + name);
}

std::string prior_kind_name(PriorKind kind) {
  switch (kind) {
    case PriorKind::kUniform:
      return "uniform";
    case PriorKind::kRandom:
      return "random";
    case PriorKind::kGaussian:
      return "gaussian";
  }
  throw ValidationError("unknown prior kind");
}

Belief make_prior(PriorKind kind, int n, Rng& rng) {
  if (n <= 0) throw ValidationError("belief needs at least one candidate");
  Belief b = Belief::uniform(n);
  if (kind == PriorKind::kUniform) return b;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    double w = 0.0;
    if (kind == PriorKind::kRandom) {
      w = rng.next_double();
    } else {
      const double z = rng.next_double(-3.0, 3.0);
      w = std::exp(-0.5 * z * z);
    }
    b.weights[i] = w;
    sum += w;
  }
  if (sum <= 0.0) return Belief::uniform(n);
  for (double& w : b.weights) w /= sum;
  return b;
}

MultiRoundResult multi_round(const EvaluatedCommitmentSet& es, const Belief& mu0, int k0, int k,
                             int true_candidate) {
  MultiRoundResult out;
  out.q1 = greedy_query(es, mu0, k0);
  out.response1 = selected_index(es, true_candidate, out.q1);
  out.mu1 = posterior(es, mu0, out.q1, out.response1);
  out.q2 = greedy_query(es, out.mu1, k);
  out.response2 = selected_index(es, true_candidate, out.q2);
  out.mu2 = posterior(es, out.mu1, out.q2, out.response2);
  return out;
}

}  // namespace commitkit
