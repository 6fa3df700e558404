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

#include <doctest.h>

#include <cmath>

#include "commitkit/simplex.h"

using namespace commitkit;

namespace {

LpProblem make_lp(int m, int n, std::initializer_list<double> a, std::initializer_list<double> b,
                  std::initializer_list<double> c) {
  LpProblem lp;
  lp.m = m;
  lp.n = n;
  lp.a = a;
  lp.b = b;
  lp.c = c;
  return lp;
}

}  // namespace

TEST_SUITE("simplex") {

TEST_CASE("two-constraint maximization reaches the right vertex") {
  // max 3x + 2y st x + y <= 4, x + 3y <= 6 (slacks s1, s2).
  const LpProblem lp = make_lp(2, 4,
                               {1, 1, 1, 0,  //
                                1, 3, 0, 1},
                               {4, 6}, {3, 2, 0, 0});
  const LpResult r = simplex_solve(lp);
  REQUIRE(r.status == LpStatus::kOptimal);
  CHECK(r.objective == doctest::Approx(12.0).epsilon(1e-12));
  CHECK(r.x[0] == doctest::Approx(4.0));
  CHECK(r.x[1] == doctest::Approx(0.0));

  SUBCASE("solution satisfies Ax = b and x >= 0") {
    for (int i = 0; i < lp.m; ++i) {
      double lhs = 0.0;
      for (int j = 0; j < lp.n; ++j) lhs += lp.at(i, j) * r.x[j];
      CHECK(lhs == doctest::Approx(lp.b[i]).epsilon(1e-10));
    }
    for (double v : r.x) CHECK(v >= -1e-12);
  }

  SUBCASE("duals certify optimality") {
    // Strong duality: y . b == objective.
    double yb = 0.0;
    for (int i = 0; i < lp.m; ++i) yb += r.duals[i] * lp.b[i];
    CHECK(yb == doctest::Approx(r.objective).epsilon(1e-10));
    // All reduced costs nonpositive at an optimum (maximization).
    for (int j = 0; j < lp.n; ++j) {
      double ya = 0.0;
      for (int i = 0; i < lp.m; ++i) ya += r.duals[i] * lp.at(i, j);
      CHECK(lp.c[j] - ya <= 1e-9);
    }
  }

  SUBCASE("warm start from the optimal basis stays optimal") {
    const LpResult warm = simplex_solve(lp, &r.basis);
    REQUIRE(warm.status == LpStatus::kOptimal);
    CHECK(warm.objective == doctest::Approx(12.0).epsilon(1e-12));
    CHECK(warm.pivots <= r.pivots);
  }
}

TEST_CASE("negative right-hand sides are handled by row scaling") {
  // max -x st -x <= -2  (i.e. x >= 2): optimum x = 2, objective -2.
  const LpProblem lp = make_lp(1, 2, {-1, 1}, {-2}, {-1, 0});
  const LpResult r = simplex_solve(lp);
  REQUIRE(r.status == LpStatus::kOptimal);
  CHECK(r.objective == doctest::Approx(-2.0));
  CHECK(r.x[0] == doctest::Approx(2.0));
}

TEST_CASE("infeasible systems are detected") {
  // x = 1 and x = 2 simultaneously.
  const LpProblem lp = make_lp(2, 1, {1, 1}, {1, 2}, {1});
  CHECK(simplex_solve(lp).status == LpStatus::kInfeasible);
}

TEST_CASE("unbounded rays are detected") {
  // max x st x - y = 0: x = y can grow without bound.
  const LpProblem lp = make_lp(1, 2, {1, -1}, {0}, {1, 0});
  CHECK(simplex_solve(lp).status == LpStatus::kUnbounded);
}

TEST_CASE("degenerate cycling example terminates at the optimum") {
  // The classic cycling instance (equality form with slack columns);
  // Bland's rule must terminate with value 1/20.
  const LpProblem lp = make_lp(3, 7,
                               {0.25, -60, -0.04, 9, 1, 0, 0,  //
                                0.50, -90, -0.02, 3, 0, 1, 0,  //
                                0.00, 0, 1.00, 0, 0, 0, 1},
                               {0, 0, 1}, {0.75, -150, 0.02, -6, 0, 0, 0});
  const LpResult r = simplex_solve(lp);
  REQUIRE(r.status == LpStatus::kOptimal);
  CHECK(r.objective == doctest::Approx(0.05).epsilon(1e-10));
  CHECK(r.x[2] == doctest::Approx(1.0));
}

TEST_CASE("equality-only system with a unique point") {
  // x + y = 1, x - y = 0 -> x = y = 0.5.
  const LpProblem lp = make_lp(2, 2, {1, 1, 1, -1}, {1, 0}, {5, 1});
  const LpResult r = simplex_solve(lp);
  REQUIRE(r.status == LpStatus::kOptimal);
  CHECK(r.x[0] == doctest::Approx(0.5));
  CHECK(r.x[1] == doctest::Approx(0.5));
  CHECK(r.objective == doctest::Approx(3.0));
}

}  // TEST_SUITE
