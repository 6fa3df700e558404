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

// Microbenchmarks for the planning and elicitation hot paths. All fixtures
// are seeded, so numbers are comparable across runs and machines.

#include <benchmark/benchmark.h>

#include <vector>

#include "commitkit/breakpoints.h"
#include "commitkit/domains.h"
#include "commitkit/mdp.h"
#include "commitkit/provider.h"
#include "commitkit/query.h"
#include "commitkit/recipient.h"

namespace commitkit {
namespace {

ProviderModel synthetic_provider(int horizon) {
  SyntheticSpec spec;
  spec.horizon = horizon;
  return gen_synthetic_provider(42, spec);
}

std::vector<RecipientCandidate> walk_candidates(int horizon, int n) {
  WalkSpec spec;
  spec.horizon = horizon;
  std::vector<RecipientCandidate> out;
  for (int j = 0; j < n; ++j) {
    WalkRecipient wr = gen_walk_recipient(100 + static_cast<uint64_t>(j), spec);
    RecipientCandidate rc;
    rc.models.emplace(0, std::move(wr.model));
    out.push_back(std::move(rc));
  }
  return out;
}

// Backward-induction solve of the unconstrained provider MDP.
void bm_solve(benchmark::State& state) {
  const ProviderModel pm = synthetic_provider(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    Solution sol = solve(pm.mdp);
    benchmark::DoNotOptimize(sol);
  }
}
BENCHMARK(bm_solve)->Arg(10)->Arg(20)->Arg(40)->Unit(benchmark::kMicrosecond);

// One commitment-constrained LP solve, dense tableau vs. column generation.
void bm_commitment_value(benchmark::State& state) {
  const ProviderModel pm = synthetic_provider(20);
  const int T = 10;
  const double p = 0.5 * max_feasible_probability(pm, T);
  const LpMethod method =
      state.range(0) == 0 ? LpMethod::kDenseTableau : LpMethod::kColumnGeneration;
  for (auto _ : state) {
    CommitmentSolveResult r = commitment_value(pm, {T, p, 0}, method);
    benchmark::DoNotOptimize(r.value);
  }
}
BENCHMARK(bm_commitment_value)
    ->Arg(0)
    ->Arg(1)
    ->ArgName("method")
    ->Unit(benchmark::kMillisecond);

// Repeated solves at one stage through the warm-started oracle, as done by
// breakpoint bisection and set evaluation.
void bm_oracle_sweep(benchmark::State& state) {
  const ProviderModel pm = synthetic_provider(20);
  const int T = 10;
  for (auto _ : state) {
    ProviderCommitmentOracle oracle(pm, T);
    const double pbar = oracle.max_probability();
    double acc = 0.0;
    for (int i = 0; i <= 32; ++i) acc += oracle.value(pbar * i / 32.0);
    benchmark::DoNotOptimize(acc);
  }
}
BENCHMARK(bm_oracle_sweep)->Unit(benchmark::kMillisecond);

// Breakpoint detection for a single stage.
void bm_find_breakpoints(benchmark::State& state) {
  const ProviderModel pm = synthetic_provider(static_cast<int>(state.range(0)));
  const int T = static_cast<int>(state.range(0)) / 2;
  for (auto _ : state) {
    std::vector<double> bps = find_breakpoints(pm, T);
    benchmark::DoNotOptimize(bps);
  }
}
BENCHMARK(bm_find_breakpoints)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

// Full commitment-set construction across all stages.
void bm_build_commitment_set(benchmark::State& state) {
  const ProviderModel pm = synthetic_provider(20);
  DiscretizationSpec spec;
  if (state.range(0) == 1) {
    spec.kind = DiscretizationSpec::Kind::kEven;
    spec.n = 10;
  }
  for (auto _ : state) {
    Discretization d = build_commitment_set(pm, spec);
    benchmark::DoNotOptimize(d);
  }
}
BENCHMARK(bm_build_commitment_set)
    ->Arg(0)
    ->Arg(1)
    ->ArgName("kind")
    ->Unit(benchmark::kMillisecond);

// Evaluating a breakpoint set against ten candidate recipients.
void bm_evaluate_commitments(benchmark::State& state) {
  const ProviderModel pm = synthetic_provider(20);
  const std::vector<RecipientCandidate> cands = walk_candidates(20, 10);
  const std::vector<Commitment> cs = build_commitment_set(pm, {}).commitments();
  for (auto _ : state) {
    EvaluatedCommitmentSet es = evaluate_commitments(pm, cands, cs);
    benchmark::DoNotOptimize(es);
  }
}
BENCHMARK(bm_evaluate_commitments)->Unit(benchmark::kMillisecond);

// Recipient-side constrained solve for one commitment.
void bm_recipient_value(benchmark::State& state) {
  const RecipientModel rm = gen_walk_recipient(7, {}).model;
  const Commitment c{10, 0.5, 0};
  for (auto _ : state) {
    RecipientSolveResult r = commitment_value(rm, c);
    benchmark::DoNotOptimize(r.value);
  }
}
BENCHMARK(bm_recipient_value)->Unit(benchmark::kMicrosecond);

// Greedy query selection over an evaluated breakpoint set.
void bm_greedy_query(benchmark::State& state) {
  const ProviderModel pm = synthetic_provider(20);
  const std::vector<RecipientCandidate> cands = walk_candidates(20, 10);
  const EvaluatedCommitmentSet es =
      evaluate_commitments(pm, cands, build_commitment_set(pm, {}).commitments());
  const Belief mu = Belief::uniform(10);
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state) {
    Query q = greedy_query(es, mu, k);
    benchmark::DoNotOptimize(q);
  }
  state.counters["set_size"] = es.size();
}
BENCHMARK(bm_greedy_query)->Arg(2)->Arg(5)->ArgName("k")->Unit(benchmark::kMillisecond);

// Exhaustive query search at k = 2 over the same set.
void bm_exhaustive_query(benchmark::State& state) {
  const ProviderModel pm = synthetic_provider(20);
  const std::vector<RecipientCandidate> cands = walk_candidates(20, 10);
  const EvaluatedCommitmentSet es =
      evaluate_commitments(pm, cands, build_commitment_set(pm, {}).commitments());
  const Belief mu = Belief::uniform(10);
  for (auto _ : state) {
    Query q = exhaustive_query(es, mu, 2, 100000000);
    benchmark::DoNotOptimize(q);
  }
  state.counters["set_size"] = es.size();
}
BENCHMARK(bm_exhaustive_query)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace commitkit

BENCHMARK_MAIN();
