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

#ifndef COMMITKIT_COMMITMENT_H_
#define COMMITKIT_COMMITMENT_H_

#include <tuple>

namespace commitkit {

// A probabilistic commitment: the provider promises that the shared binary
// feature u_c has flipped to its plus value by stage T with probability at
// least p. Feature id 0 is the convention for single-feature models.
struct Commitment {
  int T = 1;
  double p = 0.0;
  int u_c = 0;

  friend bool operator==(const Commitment& a, const Commitment& b) {
    return a.T == b.T && a.p == b.p && a.u_c == b.u_c;
  }
  // Lexicographic (T, p, u_c); the deterministic tie-break order everywhere.
  friend bool operator<(const Commitment& a, const Commitment& b) {
    return std::tie(a.T, a.p, a.u_c) < std::tie(b.T, b.p, b.u_c);
  }
};

}  // namespace commitkit

#endif  // COMMITKIT_COMMITMENT_H_
