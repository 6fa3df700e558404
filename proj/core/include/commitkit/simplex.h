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

#ifndef COMMITKIT_SIMPLEX_H_
#define COMMITKIT_SIMPLEX_H_

#include <cstdint>
#include <vector>

namespace commitkit {

// Equality-form linear program: maximize c.x subject to A x = b, x >= 0.
struct LpProblem {
  int m = 0;              // rows
  int n = 0;              // columns
  std::vector<double> a;  // row-major, m * n
  std::vector<double> b;  // m
  std::vector<double> c;  // n

  double& at(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
  double at(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  double objective = 0.0;
  std::vector<double> x;      // n, primal solution
  std::vector<double> duals;  // m, y = c_B B^-1
  std::vector<int> basis;     // basic column per row
  int64_t pivots = 0;
};

// Dense-tableau simplex with Bland's rule (lowest eligible index enters;
// ratio ties leave by lowest basic index), which makes every pivot sequence
// deterministic and cycling impossible. Phase 1 uses artificial variables
// unless `warm_basis` names a feasible starting basis (one column per row,
// in row order). Intended for the small, well-scaled programs produced by
// the occupancy formulations; exactness and reproducibility over speed.
LpResult simplex_solve(const LpProblem& lp, const std::vector<int>* warm_basis = nullptr,
                       int64_t max_pivots = -1);

}  // namespace commitkit

#endif  // COMMITKIT_SIMPLEX_H_
