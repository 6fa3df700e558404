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

#include "commitkit/simplex.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "commitkit/errors.h"

namespace commitkit {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kCostTol = 1e-9;
constexpr double kFeasTol = 1e-7;

// Full tableau over columns [0, n) real, [n, n+m) artificial (these double as
// B^-1 for dual extraction), slot n+m holds b.
class Tableau {
 public:
  Tableau(const LpProblem& lp) : m_(lp.m), n_(lp.n), width_(lp.n + lp.m + 1) {
    rows_.assign(static_cast<size_t>(m_) * width_, 0.0);
    basis_.resize(m_);
    for (int i = 0; i < m_; ++i) {
      const double sign = lp.b[i] < 0.0 ? -1.0 : 1.0;
      double* r = row(i);
      for (int j = 0; j < n_; ++j) r[j] = sign * lp.at(i, j);
      r[n_ + i] = sign;  // artificial / inverse column
      r[n_ + m_] = sign * lp.b[i];
      basis_[i] = n_ + i;
    }
  }

  int m() const { return m_; }
  int n() const { return n_; }
  double* row(int i) { return rows_.data() + static_cast<size_t>(i) * width_; }
  const double* row(int i) const { return rows_.data() + static_cast<size_t>(i) * width_; }
  double rhs(int i) const { return row(i)[n_ + m_]; }
  const std::vector<int>& basis() const { return basis_; }

  void pivot(int r, int q) {
    double* pr = row(r);
    const double inv = 1.0 / pr[q];
    for (int j = 0; j < width_; ++j) pr[j] *= inv;
    pr[q] = 1.0;
    for (int i = 0; i < m_; ++i) {
      if (i == r) continue;
      double* ri = row(i);
      const double f = ri[q];
      if (f == 0.0) continue;
      for (int j = 0; j < width_; ++j) ri[j] -= f * pr[j];
      ri[q] = 0.0;
    }
    basis_[r] = q;
  }

  // Bland leaving rule for entering column q: smallest ratio rhs/coef over
  // coef > tol, ties by lowest basic column index. Rows holding an artificial
  // at zero may also leave at ratio zero on a negative coefficient, which
  // drives redundant-row artificials out without ever making them positive.
  int choose_leaving(int q) const {
    int best = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m_; ++i) {
      const double coef = row(i)[q];
      double ratio;
      if (coef > kPivotTol) {
        ratio = rhs(i) / coef;
      } else if (basis_[i] >= n_ && coef < -kPivotTol && rhs(i) <= kFeasTol) {
        ratio = 0.0;
      } else {
        continue;
      }
      if (ratio < 0.0) ratio = 0.0;  // clamp degenerate dust
      if (best == -1 || ratio < best_ratio ||
          (ratio == best_ratio && basis_[i] < basis_[best])) {
        best = i;
        best_ratio = ratio;
      }
    }
    return best;
  }

 private:
  int m_, n_, width_;
  std::vector<double> rows_;
  std::vector<int> basis_;
};

struct CostRow {
  std::vector<double> d;  // reduced costs over real+artificial columns
  double neg_obj = 0.0;

  void pivot_with(const Tableau& t, int r, int q, int width) {
    const double f = d[q];
    if (f == 0.0) return;
    const double* pr = t.row(r);
    for (int j = 0; j < width; ++j) d[j] -= f * pr[j];
    d[q] = 0.0;
    neg_obj -= f * pr[width];
  }
};

// Builds reduced costs for objective `c` (size n real columns; artificials
// cost `art_cost`) under the current basis.
CostRow make_cost_row(const Tableau& t, const std::vector<double>& c, double art_cost) {
  const int m = t.m(), n = t.n();
  CostRow cr;
  cr.d.assign(n + m, 0.0);
  auto cost_of = [&](int j) { return j < n ? c[j] : art_cost; };
  for (int j = 0; j < n + m; ++j) cr.d[j] = cost_of(j);
  cr.neg_obj = 0.0;
  for (int i = 0; i < m; ++i) {
    const double cb = cost_of(t.basis()[i]);
    if (cb == 0.0) continue;
    const double* r = t.row(i);
    for (int j = 0; j < n + m; ++j) cr.d[j] -= cb * r[j];
    cr.neg_obj -= cb * r[n + m];
  }
  return cr;
}

// Runs Bland pivots until no eligible entering column. `allow_artificial`
// permits artificial columns to enter (phase 1 re-entry is never useful, so
// it is always false; the flag documents the exclusion).
LpStatus run_phase(Tableau& t, CostRow& cr, bool allow_artificial, int64_t max_pivots,
                   int64_t& pivots) {
  const int n = t.n(), m = t.m();
  const int limit = n + (allow_artificial ? m : 0);
  for (;;) {
    int q = -1;
    for (int j = 0; j < limit; ++j) {
      if (cr.d[j] > kCostTol) {
        q = j;
        break;
      }
    }
    if (q == -1) return LpStatus::kOptimal;
    const int r = t.choose_leaving(q);
    if (r == -1) return LpStatus::kUnbounded;
    t.pivot(r, q);
    cr.pivot_with(t, r, q, n + m);
    if (++pivots >= max_pivots) return LpStatus::kIterationLimit;
  }
}

}  // namespace

LpResult simplex_solve(const LpProblem& lp, const std::vector<int>* warm_basis,
                       int64_t max_pivots) {
  if (lp.m <= 0 || lp.n <= 0 || static_cast<int64_t>(lp.a.size()) != int64_t(lp.m) * lp.n ||
      static_cast<int>(lp.b.size()) != lp.m || static_cast<int>(lp.c.size()) != lp.n)
    throw ValidationError("malformed linear program");
  if (max_pivots < 0) max_pivots = 200LL * (lp.m + lp.n) + 10000;

  Tableau t(lp);
  LpResult out;
  out.pivots = 0;

  if (warm_basis != nullptr) {
    if (static_cast<int>(warm_basis->size()) != lp.m)
      throw ValidationError("warm basis must have one column per row");
    for (int i = 0; i < lp.m; ++i) {
      const int q = (*warm_basis)[i];
      if (q < 0 || q >= lp.n) throw ValidationError("warm basis column out of range");
      if (std::abs(t.row(i)[q]) < kPivotTol)
        throw ValidationError("warm basis is singular under row ordering");
      t.pivot(i, q);
    }
    for (int i = 0; i < lp.m; ++i) {
      if (t.rhs(i) < -kFeasTol) throw ValidationError("warm basis is primal infeasible");
    }
  } else {
    CostRow phase1 = make_cost_row(t, std::vector<double>(lp.n, 0.0), -1.0);
    const LpStatus st = run_phase(t, phase1, false, max_pivots, out.pivots);
    if (st == LpStatus::kIterationLimit) {
      out.status = st;
      return out;
    }
    // max of -(sum artificials); feasible iff it reaches ~0.
    if (-phase1.neg_obj < -1e-7) {
      out.status = LpStatus::kInfeasible;
      return out;
    }
  }

  CostRow phase2 = make_cost_row(t, lp.c, 0.0);
  // Artificial columns keep cost 0 but are barred from entering; a leftover
  // basic artificial sits at value ~0 on a redundant row.
  const LpStatus st = run_phase(t, phase2, false, max_pivots, out.pivots);
  out.status = st;
  if (st != LpStatus::kOptimal) return out;

  out.objective = -phase2.neg_obj;
  out.x.assign(lp.n, 0.0);
  for (int i = 0; i < lp.m; ++i) {
    if (t.basis()[i] < lp.n) out.x[t.basis()[i]] = t.rhs(i);
  }
  // y_i = -reduced cost of the i-th artificial column (its original cost is 0
  // in phase 2 and its tableau column is B^-1 e_i, possibly sign-flipped when
  // the row was normalized to b >= 0).
  out.duals.assign(lp.m, 0.0);
  for (int i = 0; i < lp.m; ++i) {
    const double sign = lp.b[i] < 0.0 ? -1.0 : 1.0;
    out.duals[i] = -phase2.d[lp.n + i] * sign;
  }
  out.basis = t.basis();
  return out;
}

}  // namespace commitkit
