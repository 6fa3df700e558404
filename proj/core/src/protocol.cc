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

#include "commitkit/protocol.h"

#include <cstdio>

#include <json.hpp>

#include "commitkit/errors.h"

namespace commitkit {

namespace {

using nlohmann::json;

constexpr int kWireVersion = 1;

json check_envelope(const std::string& text, const char* expected_type) {
  try {
    json j = json::parse(text);
    if (j.value("v", -1) != kWireVersion)
      throw ValidationError("unsupported message version");
    if (j.value("type", "") != expected_type)
      throw ValidationError(std::string("expected message type ") + expected_type);
    return j;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad message: ") + e.what());
  }
}

}  // namespace

std::string AnnotatedQuery::to_wire() const {
  json entries_json = json::array();
  for (const AnnotatedEntry& e : entries) {
    json obj;
    obj["T"] = e.c.T;
    obj["p"] = e.c.p;
    obj["u_c"] = e.c.u_c;
    obj["v_p"] = e.provider_value;
    entries_json.push_back(obj);
  }
  json j;
  j["entries"] = entries_json;
  j["type"] = "query";
  j["v"] = kWireVersion;
  return j.dump();
}

AnnotatedQuery AnnotatedQuery::from_wire(const std::string& text) {
  json j = check_envelope(text, "query");
  try {
    AnnotatedQuery q;
    for (const json& obj : j.at("entries")) {
      AnnotatedEntry e;
      e.c.T = obj.at("T").get<int>();
      e.c.p = obj.at("p").get<double>();
      e.c.u_c = obj.at("u_c").get<int>();
      e.provider_value = obj.at("v_p").get<double>();
      q.entries.push_back(e);
    }
    if (q.entries.empty()) throw ValidationError("query message has no entries");
    return q;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad query message: ") + e.what());
  }
}

std::string ResponseMessage::to_wire() const {
  json j;
  j["index"] = index;
  j["type"] = "response";
  j["v"] = kWireVersion;
  return j.dump();
}

ResponseMessage ResponseMessage::from_wire(const std::string& text) {
  json j = check_envelope(text, "response");
  try {
    ResponseMessage r;
    r.index = j.at("index").get<int>();
    return r;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad response message: ") + e.what());
  }
}

AnnotatedQuery annotate_query(const EvaluatedCommitmentSet& es, const Query& q) {
  if (q.empty()) throw ValidationError("query must be nonempty");
  AnnotatedQuery aq;
  for (int j : q) {
    if (j < 0 || j >= es.size()) throw ValidationError("query index out of range");
    aq.entries.push_back({es.commitments[j], es.provider_value[j]});
  }
  return aq;
}

RespondResult respond(const AnnotatedQuery& query, const RecipientCandidate& true_recipient) {
  if (query.entries.empty()) throw ValidationError("query must be nonempty");
  RespondResult out;
  out.recipient_values.reserve(query.entries.size());
  for (const AnnotatedEntry& e : query.entries)
    out.recipient_values.push_back(candidate_value(true_recipient, e.c));
  out.index = 0;
  double best = query.entries[0].provider_value + out.recipient_values[0];
  for (size_t r = 1; r < query.entries.size(); ++r) {
    const double v = query.entries[r].provider_value + out.recipient_values[r];
    if (v > best) {
      best = v;
      out.index = static_cast<int>(r);
    }
  }
  return out;
}

RespondResult respond(const AnnotatedQuery& query, const RecipientModel& true_recipient) {
  RecipientCandidate rc;
  int feature = 0;
  if (!query.entries.empty()) feature = query.entries[0].c.u_c;
  rc.models.emplace(feature, true_recipient);
  return respond(query, rc);
}

ExchangeResult run_exchange(const ProviderModel& pm,
                            const std::vector<RecipientCandidate>& candidates,
                            const Belief& prior, const RecipientCandidate& true_recipient, int k,
                            int rounds, int k0, const DiscretizationSpec& spec) {
  prior.validate();
  if (static_cast<int>(candidates.size()) != prior.size())
    throw ValidationError("belief size does not match candidate count");
  if (rounds != 1 && rounds != 2) throw ValidationError("rounds must be 1 or 2");
  if (k <= 0) throw ValidationError("query size must be positive");
  for (const auto& [f, rm] : true_recipient.models) {
    if (!check_assumption_u(rm)) {
      std::fprintf(stderr,
                   "warning: true recipient model for feature %d prefers the minus branch "
                   "somewhere; exchange guarantees may not hold\n",
                   f);
    }
  }

  const Discretization d = build_commitment_set(pm, spec);
  const EvaluatedCommitmentSet es =
      evaluate_commitments(pm, candidates, d.commitments(), spec.method);

  ExchangeResult out;
  Belief mu = prior;
  Commitment agreed;
  for (int r = 0; r < rounds; ++r) {
    const int size = (rounds == 2 && r == 0 && k0 > 0) ? k0 : k;
    const Query q = greedy_query(es, mu, size);
    const AnnotatedQuery aq = annotate_query(es, q);
    const std::string query_message = aq.to_wire();

    // Recipient side: parse the message bytes and re-solve locally.
    const AnnotatedQuery received = AnnotatedQuery::from_wire(query_message);
    const RespondResult response = respond(received, true_recipient);
    const std::string response_message = ResponseMessage{response.index}.to_wire();

    // Provider side: parse the response and update the belief.
    const int index = ResponseMessage::from_wire(response_message).index;
    if (index < 0 || index >= static_cast<int>(q.size()))
      throw InconsistentResponseError("response index out of range");
    mu = posterior(es, mu, q, index);
    agreed = es.commitments[q[index]];

    Transcript t;
    t.query_message = query_message;
    t.response_message = response_message;
    t.recipient_values = response.recipient_values;
    t.response_index = index;
    out.rounds.push_back(std::move(t));
  }

  out.agreed = agreed;
  out.final_belief = mu;
  const CommitmentSolveResult provider_side = commitment_value(pm, agreed, spec.method);
  out.provider_value = provider_side.value;
  out.provider_policy = provider_side.policy;
  out.provider_policy_id = policy_fingerprint(out.provider_policy);
  const RecipientSolveResult recipient_side =
      commitment_value(true_recipient.for_feature(agreed.u_c), agreed);
  out.recipient_value = recipient_side.value;
  out.recipient_policy = recipient_side.policy;
  out.recipient_policy_id = policy_fingerprint(out.recipient_policy);
  return out;
}

}  // namespace commitkit
