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

#ifndef COMMITKIT_ERRORS_H_
#define COMMITKIT_ERRORS_H_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace commitkit {

// Malformed model, policy, belief, or serialized input.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Requested commitment probability exceeds the maximum the provider can
// guarantee at the requested time; carries that maximum.
class InfeasibleCommitmentError : public std::runtime_error {
 public:
  InfeasibleCommitmentError(const std::string& what, double max_feasible)
      : std::runtime_error(what), max_feasible_(max_feasible) {}
  double max_feasible() const { return max_feasible_; }

 private:
  double max_feasible_;
};

// A response index that no belief candidate would have chosen (zero posterior
// mass under the noiseless response model).
class InconsistentResponseError : public std::runtime_error {
 public:
  explicit InconsistentResponseError(const std::string& what) : std::runtime_error(what) {}
};

// Exhaustive query search would exceed its configured subset budget.
class BudgetExceededError : public std::runtime_error {
 public:
  BudgetExceededError(const std::string& what, uint64_t required, uint64_t budget)
      : std::runtime_error(what), required_(required), budget_(budget) {}
  uint64_t required() const { return required_; }
  uint64_t budget() const { return budget_; }

 private:
  uint64_t required_;
  uint64_t budget_;
};

}  // namespace commitkit

#endif  // COMMITKIT_ERRORS_H_
