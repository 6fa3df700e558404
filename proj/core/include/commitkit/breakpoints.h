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

// Discretizing the commitment space. The provider's value v^p(T, .) is a
// piecewise-linear concave function of the commitment probability, so a small
// set of probabilities per stage T — ideally the breakpoints of that function —
// captures it exactly. This module builds such sets three ways (adaptive
// breakpoint search, even grids, deterministic-policy enumeration) and
// evaluates the resulting commitments against provider and candidate models.

#ifndef COMMITKIT_BREAKPOINTS_H_
#define COMMITKIT_BREAKPOINTS_H_

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "commitkit/commitment.h"
#include "commitkit/provider.h"
#include "commitkit/recipient.h"

namespace commitkit {

// How to build the per-stage probability sets.
struct DiscretizationSpec {
  enum class Kind {
    kBreakpoints,  // adaptive bisection on v^p(T, .)
    kEven,         // {i/n : i/n feasible}
    kDetPolicy,    // probabilities attained by deterministic policies
  };

  Kind kind = Kind::kBreakpoints;

  // kEven / kDetPolicy: grid resolution. kDetPolicy groups attained
  // probabilities so that representatives are at least 1/n apart.
  int n = 10;

  // kBreakpoints: midpoint linearity tolerance, relative to max(1, |v(p_l)|).
  // The default keeps only kinks that matter at study scale; exactness tests
  // pass a much tighter value.
  double tol = 1.5e-2;

  // kBreakpoints: intervals narrower than min_width are kept without
  // splitting. Non-positive means the default max_probability(T) / 2^20.
  double min_width = -1.0;

  // kDetPolicy: maximum number of deterministic policies to enumerate.
  int64_t dp_cap = 1000000;

  // kDetPolicy: when the cap is hit, return the truncated result instead of
  // throwing CapExceededError.
  bool allow_partial = false;

  LpMethod method = LpMethod::kAuto;

  std::string kind_name() const;
  static Kind kind_from_name(const std::string& name);
};

// Sorted feasible commitment probabilities per (feature, stage T).
struct Discretization {
  std::string kind;  // "breakpoints" | "even" | "dp"
  // Key: (feature id, commitment stage T), T in 1..horizon. Values sorted
  // ascending, deduplicated at resolution 1e-12, all <= max feasible + 1e-9.
  std::map<std::pair<int, int>, std::vector<double>> per_T;
  // Deterministic-policy enumeration hit its cap before finishing.
  bool truncated = false;

  // All (T, p, u_c) commitments, sorted lexicographically by (T, p, u_c).
  std::vector<Commitment> commitments() const;
  int64_t total_size() const;
  double mean_size_per_T() const;

  // Single feature: {"kind": ..., "per_T": {"<T>": [...]}}. Multiple
  // features: "per_T" is replaced by "per_feature" keyed by feature id.
  // "truncated": true is added when set.
  std::string to_json() const;
  static Discretization from_json(const std::string& text);
};

// Deterministic-policy enumeration passed the configured cap. Carries the
// discretization built from the policies enumerated up to the cap.
class CapExceededError : public std::runtime_error {
 public:
  CapExceededError(const std::string& what, Discretization partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const Discretization& partial() const { return partial_; }

 private:
  Discretization partial_;
};

// Adaptive search for the breakpoints of v^p(T, .) on feature `feature`.
// Maintains a FIFO queue of intervals starting from [0, max_probability];
// both endpoints of every interval taken from the queue enter the result,
// and the interval is split at its midpoint p_m unless it is narrower than
// min_width or the midpoint test
//   |v(p_m) - (v(p_l) + v(p_u)) / 2| <= tol * max(1, |v(p_l)|)
// declares it linear. The result is sorted and deduplicated at 1e-12.
std::vector<double> find_breakpoints(const ProviderModel& pm, int T, int feature = -1,
                                     double tol = 1.5e-2, double min_width = -1.0,
                                     LpMethod method = LpMethod::kAuto);

// Builds the probability sets for every feature and every T in 1..horizon.
Discretization build_commitment_set(const ProviderModel& pm, const DiscretizationSpec& spec);

// Commitments with the provider's and every candidate's value attached.
struct EvaluatedCommitmentSet {
  // Sorted lexicographically by (T, p, u_c); operations that break ties by
  // commitment prefer the lowest index.
  std::vector<Commitment> commitments;
  std::vector<double> provider_value;                 // per commitment
  std::vector<std::vector<double>> recipient_value;   // [candidate][commitment]

  int size() const { return static_cast<int>(commitments.size()); }
  // v^p + v^r_i for candidate i and commitment j.
  double joint_value(int candidate, int commitment) const {
    return provider_value[commitment] + recipient_value[candidate][commitment];
  }
};

EvaluatedCommitmentSet evaluate_commitments(const ProviderModel& pm,
                                            const std::vector<RecipientCandidate>& candidates,
                                            const std::vector<Commitment>& commitments,
                                            LpMethod method = LpMethod::kAuto);

// The commitment maximizing v^p + v^r against a known recipient, searching
// breakpoint sets for every feature and stage. Ties prefer the
// lexicographically smallest (T, p, u_c). Warns once on stderr if the
// recipient violates the plus-dominance assumption.
struct CentralizedResult {
  Commitment commitment;
  double joint_value = 0.0;
  double provider_value = 0.0;
  double recipient_value = 0.0;
};

CentralizedResult centralized_optimal_commitment(const ProviderModel& pm,
                                                 const RecipientCandidate& recipient,
                                                 const DiscretizationSpec& spec = {});

// Single-feature convenience: the recipient model is paired with the
// provider's sole feature.
CentralizedResult centralized_optimal_commitment(const ProviderModel& pm,
                                                 const RecipientModel& recipient,
                                                 const DiscretizationSpec& spec = {});

}  // namespace commitkit

#endif  // COMMITKIT_BREAKPOINTS_H_
