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

// Decentralized commitment negotiation. The provider formulates a query of
// annotated commitments and sends it as a serialized message; the recipient
// re-solves its own models per entry, responds with the index maximizing the
// annotated provider value plus its own, and both sides adopt the agreed
// commitment. Provider and recipient touch shared state only through the
// serialized messages, so either side can be hosted out of process.

#ifndef COMMITKIT_PROTOCOL_H_
#define COMMITKIT_PROTOCOL_H_

#include <cstdint>
#include <string>
#include <vector>

#include "commitkit/breakpoints.h"
#include "commitkit/query.h"

namespace commitkit {

// One query entry: a commitment with the provider's value annotation.
struct AnnotatedEntry {
  Commitment c;
  double provider_value = 0.0;
};

// Ordered, annotated commitments. Wire format (version 1):
//   {"entries": [{"T": .., "p": .., "u_c": .., "v_p": ..}, ...],
//    "type": "query", "v": 1}
struct AnnotatedQuery {
  std::vector<AnnotatedEntry> entries;

  std::string to_wire() const;
  static AnnotatedQuery from_wire(const std::string& text);
};

// Wire format (version 1): {"index": .., "type": "response", "v": 1}
struct ResponseMessage {
  int index = 0;

  std::string to_wire() const;
  static ResponseMessage from_wire(const std::string& text);
};

// Builds the provider's message for query q over an evaluated set.
AnnotatedQuery annotate_query(const EvaluatedCommitmentSet& es, const Query& q);

// The recipient's side of one round: solves its own model per entry and picks
// argmax of annotation + own value, ties preferring the earliest entry.
struct RespondResult {
  int index = 0;
  std::vector<double> recipient_values;  // per entry
};

RespondResult respond(const AnnotatedQuery& query, const RecipientCandidate& true_recipient);
RespondResult respond(const AnnotatedQuery& query, const RecipientModel& true_recipient);

// Record of one round: the exact bytes exchanged plus the recipient's
// per-entry values and choice.
struct Transcript {
  std::string query_message;
  std::string response_message;
  std::vector<double> recipient_values;
  int response_index = 0;

  size_t query_bytes() const { return query_message.size(); }
  size_t response_bytes() const { return response_message.size(); }
};

struct ExchangeResult {
  std::vector<Transcript> rounds;
  Commitment agreed;
  double provider_value = 0.0;   // v^p(agreed)
  double recipient_value = 0.0;  // true recipient's v^r(agreed)
  Policy provider_policy;        // provider's policy honoring the agreement
  Policy recipient_policy;       // true recipient's policy for the agreement
  uint64_t provider_policy_id = 0;
  uint64_t recipient_policy_id = 0;
  Belief final_belief;           // provider's posterior after all rounds
};

// Full exchange: builds the commitment set, runs `rounds` (1 or 2) rounds of
// greedy query / response / posterior update against the true recipient, and
// derives both policies for the last response. In a two-round exchange the
// first query has size k0 (defaulting to k when k0 <= 0) and the second size
// k. Throws InconsistentResponseError if the true recipient's choices match
// no candidate with positive weight.
ExchangeResult run_exchange(const ProviderModel& pm,
                            const std::vector<RecipientCandidate>& candidates,
                            const Belief& prior, const RecipientCandidate& true_recipient, int k,
                            int rounds = 1, int k0 = -1, const DiscretizationSpec& spec = {});

}  // namespace commitkit

#endif  // COMMITKIT_PROTOCOL_H_
