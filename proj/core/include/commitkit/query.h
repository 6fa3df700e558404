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

// Query selection under recipient uncertainty. The provider holds a belief
// over candidate recipient models, offers a query (a small set of evaluated
// commitments), and the recipient picks the entry maximizing the annotated
// provider value plus its own. All utilities here are noiseless closed forms
// over an EvaluatedCommitmentSet, so selection, posterior updates, and the
// expected utility of selection (EUS) are exact.

#ifndef COMMITKIT_QUERY_H_
#define COMMITKIT_QUERY_H_

#include <cstdint>
#include <string>
#include <vector>

#include "commitkit/breakpoints.h"
#include "commitkit/rng.h"

namespace commitkit {

// Weighted finite set of candidate recipient models. Weights are indexed by
// candidate position; ids label the candidates for serialization and default
// to 0..N-1.
struct Belief {
  std::vector<double> weights;
  std::vector<int> candidate_ids;

  int size() const { return static_cast<int>(weights.size()); }
  void validate() const;  // nonnegative, sum 1 within 1e-9, ids parallel
  static Belief uniform(int n);

  std::string to_json() const;  // {"candidates": [...], "weights": [...]}
  static Belief from_json(const std::string& text);
};

// Ordered list of indices into an EvaluatedCommitmentSet. The order defines
// response indexing, so it is part of the query's identity.
using Query = std::vector<int>;

// EU(c; mu) = sum_i mu_i (v^p(c) + v^r_i(c)).
double expected_utility(const EvaluatedCommitmentSet& es, const Belief& mu, int commitment);

// argmax_c EU(c; mu); ties prefer the lowest commitment index, i.e. the
// lexicographically smallest (T, p, u_c).
int optimal_commitment_under_belief(const EvaluatedCommitmentSet& es, const Belief& mu);

// The entry of q that candidate i selects: argmax over q of
// v^p(c) + v^r_i(c), ties preferring the earliest entry.
int selected_index(const EvaluatedCommitmentSet& es, int candidate, const Query& q);

// EUS(q; mu) = sum_i mu_i max_{c in q} (v^p(c) + v^r_i(c)).
double eus(const EvaluatedCommitmentSet& es, const Belief& mu, const Query& q);

// Ubar = sum_i mu_i max over all commitments of (v^p + v^r_i); the value of
// resolving the uncertainty completely. EUS(q) <= Ubar for every q.
double eus_upper_bound(const EvaluatedCommitmentSet& es, const Belief& mu);

// Bayes update after observing that the recipient selected entry `response`
// of q: keeps exactly the candidates whose selection matches. Throws
// InconsistentResponseError when no candidate does.
Belief posterior(const EvaluatedCommitmentSet& es, const Belief& mu, const Query& q, int response);

// Greedy EUS maximization: k rounds of adding the commitment with the best
// marginal gain. Achieves at least a (1 - ((k-1)/k)^k) fraction of the
// optimal size-k EUS. Ties prefer the lowest commitment index. The result is
// in picking order.
Query greedy_query(const EvaluatedCommitmentSet& es, const Belief& mu, int k);

// Exact maximization by enumerating all size-k subsets (ascending index
// order; ties prefer the first subset enumerated). Throws
// BudgetExceededError when C(n, k) exceeds `budget`.
Query exhaustive_query(const EvaluatedCommitmentSet& es, const Belief& mu, int k,
                       int64_t budget = 20000000);

// k distinct commitments sampled uniformly, returned in ascending index order.
Query random_query(const EvaluatedCommitmentSet& es, int k, Rng& rng);

enum class PriorKind {
  kUniform,   // 1/n each
  kRandom,    // weights proportional to independent U[0,1] draws
  kGaussian,  // weights proportional to the normal density at z_i ~ U[-3,3]
};

PriorKind prior_kind_from_name(const std::string& name);
std::string prior_kind_name(PriorKind kind);
Belief make_prior(PriorKind kind, int n, Rng& rng);

// Two-round exchange: greedy query of size k0, true recipient's response,
// posterior, then a greedy query of size k under the posterior. The second
// round's EUS under the posterior is never worse than committing to the
// first response.
struct MultiRoundResult {
  Query q1;
  int response1 = 0;
  Belief mu1;
  Query q2;
  int response2 = 0;
  Belief mu2;
};

MultiRoundResult multi_round(const EvaluatedCommitmentSet& es, const Belief& mu0, int k0, int k,
                             int true_candidate);

}  // namespace commitkit

#endif  // COMMITKIT_QUERY_H_
