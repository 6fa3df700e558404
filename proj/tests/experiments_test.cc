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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "commitkit/breakpoints.h"
#include "commitkit/errors.h"
#include "commitkit/experiments.h"
#include "commitkit/parallel.h"
#include "commitkit/protocol.h"
#include "commitkit/rng.h"
#include "test_util.h"

namespace commitkit {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Scratch directory under the system temp dir, removed on scope exit.
struct TempDir {
  fs::path path;

  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("commitkit_test_" + tag);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string str() const { return path.string(); }
};

// Sets an environment variable for the current scope, restoring on exit.
struct EnvGuard {
  std::string name;
  std::string old;
  bool had = false;

  EnvGuard(const char* n, const char* value) : name(n) {
    if (const char* p = std::getenv(n)) {
      had = true;
      old = p;
    }
    ::setenv(n, value, 1);
  }
  ~EnvGuard() {
    if (had)
      ::setenv(name.c_str(), old.c_str(), 1);
    else
      ::unsetenv(name.c_str());
  }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "missing file: ", path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE(out.good());
  out << content;
}

const std::string& cell(const CsvTable& t, const std::vector<std::string>& row,
                        const std::string& name) {
  const int c = t.column(name);
  REQUIRE_MESSAGE(c >= 0, "missing column: ", name);
  REQUIRE(static_cast<size_t>(c) < row.size());
  return row[static_cast<size_t>(c)];
}

double num(const CsvTable& t, const std::vector<std::string>& row, const std::string& name) {
  const std::string& s = cell(t, row, name);
  REQUIRE_MESSAGE(!s.empty(), "empty numeric cell: ", name);
  return std::stod(s);
}

// A configuration small enough that every study finishes in well under a
// second but still exercises both discretization kinds and both query sizes.
ExperimentConfig tiny_cfg() {
  ExperimentConfig cfg;
  cfg.n_instances = 2;
  cfg.n_candidates = 2;
  cfg.horizon = 4;
  cfg.ks = {1, 2};
  cfg.exhaustive_max_k = 2;
  cfg.random_repeats = 2;
  DiscretizationSpec bp;
  DiscretizationSpec even;
  even.kind = DiscretizationSpec::Kind::kEven;
  even.n = 4;
  cfg.discretizations = {bp, even};
  return cfg;
}

TEST_SUITE_BEGIN("experiments");

TEST_CASE("config defaults, json roundtrip, and rejection of bad input") {
  SUBCASE("empty object yields the documented defaults") {
    const ExperimentConfig cfg = ExperimentConfig::from_json("{}");
    CHECK(cfg.domain == "synthetic");
    CHECK(cfg.n_instances == 20);
    CHECK(cfg.n_candidates == 10);
    CHECK(cfg.m == 1);
    CHECK(cfg.horizon == 20);
    CHECK(cfg.ks == std::vector<int>{1, 2, 3, 5});
    CHECK(cfg.rounds == 1);
    CHECK(cfg.k0 == 2);
    CHECK(cfg.priors == std::vector<std::string>{"uniform"});
    CHECK(cfg.exhaustive_budget == 20000000);
    CHECK(cfg.exhaustive_max_k == 3);
    CHECK(cfg.random_repeats == 5);
    CHECK(cfg.joint_state_budget == 2000000);
    CHECK(cfg.method == LpMethod::kAuto);
    // Default sweep: breakpoints plus even/dp grids at 10, 20, 50.
    REQUIRE(cfg.discretizations.size() == 7);
    CHECK(cfg.discretizations[0].kind == DiscretizationSpec::Kind::kBreakpoints);
    for (int i = 0; i < 3; ++i) {
      CHECK(cfg.discretizations[1 + i].kind == DiscretizationSpec::Kind::kEven);
      CHECK(cfg.discretizations[4 + i].kind == DiscretizationSpec::Kind::kDetPolicy);
      CHECK(cfg.discretizations[4 + i].allow_partial);
    }
    CHECK(cfg.discretizations[1].n == 10);
    CHECK(cfg.discretizations[2].n == 20);
    CHECK(cfg.discretizations[3].n == 50);
  }

  SUBCASE("to_json / from_json is a byte-stable fixed point") {
    ExperimentConfig cfg = tiny_cfg();
    cfg.rounds = 2;
    cfg.k0 = 1;
    cfg.priors = {"uniform", "gaussian"};
    cfg.method = LpMethod::kColumnGeneration;
    for (auto& s : cfg.discretizations) s.method = cfg.method;
    const std::string text = cfg.to_json();
    const ExperimentConfig back = ExperimentConfig::from_json(text);
    CHECK(back.to_json() == text);
    CHECK(back.domain == cfg.domain);
    CHECK(back.n_instances == cfg.n_instances);
    CHECK(back.ks == cfg.ks);
    CHECK(back.rounds == 2);
    CHECK(back.k0 == 1);
    CHECK(back.priors == cfg.priors);
    CHECK(back.method == LpMethod::kColumnGeneration);
    REQUIRE(back.discretizations.size() == 2);
    CHECK(back.discretizations[0].kind == DiscretizationSpec::Kind::kBreakpoints);
    CHECK(back.discretizations[0].tol == doctest::Approx(0.015).epsilon(1e-15));
    CHECK(back.discretizations[0].method == LpMethod::kColumnGeneration);
    CHECK(back.discretizations[1].kind == DiscretizationSpec::Kind::kEven);
    CHECK(back.discretizations[1].n == 4);
  }

  SUBCASE("unknown keys and invalid values are rejected") {
    CHECK_THROWS_AS((void)ExperimentConfig::from_json(R"({"n_instance": 3})"), ValidationError);
    CHECK_THROWS_AS((void)ExperimentConfig::from_json(R"({"domain": "gridworld"})"),
                    ValidationError);
    CHECK_THROWS_AS((void)ExperimentConfig::from_json(R"({"rounds": 3})"), ValidationError);
    CHECK_THROWS_AS((void)ExperimentConfig::from_json(R"({"ks": []})"), ValidationError);
    CHECK_THROWS_AS((void)ExperimentConfig::from_json(R"({"ks": [2, 0]})"), ValidationError);
    CHECK_THROWS_AS((void)ExperimentConfig::from_json(R"({"priors": ["zipf"]})"),
                    ValidationError);
    CHECK_THROWS_AS((void)ExperimentConfig::from_json(R"({"m": 2})"), ValidationError);
    CHECK_THROWS_AS((void)ExperimentConfig::from_json(R"({"lp_method": "simplex"})"),
                    ValidationError);
    CHECK_THROWS_AS((void)ExperimentConfig::from_json("not json"), ValidationError);
  }

  SUBCASE("from_file reads a config and reports missing paths") {
    TempDir tmp("config");
    const std::string path = tmp.str() + "/config.json";
    write_text(path, tiny_cfg().to_json());
    const ExperimentConfig cfg = ExperimentConfig::from_file(path);
    CHECK(cfg.n_instances == 2);
    CHECK(cfg.horizon == 4);
    CHECK_THROWS_AS((void)ExperimentConfig::from_file(tmp.str() + "/absent.json"),
                    ValidationError);
  }
}

TEST_CASE("csv formatting and parsing") {
  SUBCASE("doubles print with twelve significant digits") {
    CHECK(csv_double(2.5) == "2.5");
    CHECK(csv_double(0.0) == "0");
    CHECK(csv_double(100.0) == "100");
    CHECK(csv_double(-7.25) == "-7.25");
    CHECK(csv_double(1.0 / 3.0) == "0.333333333333");
    CHECK(csv_double(1e-13) == "1e-13");
    // Equal doubles must produce equal bytes so result files diff cleanly.
    CHECK(csv_double(0.1 + 0.2) == csv_double(0.30000000000000004));
  }

  SUBCASE("read_csv handles CRLF, blank lines, and empty cells") {
    TempDir tmp("csv");
    const std::string path = tmp.str() + "/t.csv";
    write_text(path, "a,b,c\n1,2,3\r\n4,,6\n\n7,8,\n");
    const CsvTable t = read_csv(path);
    REQUIRE(t.header == std::vector<std::string>{"a", "b", "c"});
    REQUIRE(t.rows.size() == 3);
    CHECK(t.rows[0] == std::vector<std::string>{"1", "2", "3"});
    CHECK(t.rows[1] == std::vector<std::string>{"4", "", "6"});
    CHECK(t.rows[2] == std::vector<std::string>{"7", "8", ""});
    CHECK(t.column("b") == 1);
    CHECK(t.column("missing") == -1);
    CHECK_THROWS_AS((void)read_csv(tmp.str() + "/absent.csv"), ValidationError);
  }
}

TEST_CASE("instances derive deterministically from the run seed") {
  const ExperimentConfig cfg = tiny_cfg();

  SUBCASE("same (config, seed, index) reproduces the instance bit for bit") {
    const Instance a = make_instance(cfg, 999, 0);
    const Instance b = make_instance(cfg, 999, 0);
    CHECK(a.seed == b.seed);
    CHECK(a.seed == Rng(999).fork("instance", 0).seed());
    CHECK(a.true_index == b.true_index);
    CHECK(a.provider.to_json() == b.provider.to_json());
    REQUIRE(a.candidates.size() == 2);
    for (size_t j = 0; j < a.candidates.size(); ++j)
      CHECK(a.candidates[j].for_feature(0).to_json() ==
            b.candidates[j].for_feature(0).to_json());
    CHECK(a.true_index >= 0);
    CHECK(a.true_index < cfg.n_candidates);
    REQUIRE(a.walk_params.size() == 2);
    for (const WalkParams& w : a.walk_params) {
      CHECK(w.L0 >= 1);
      CHECK(w.L0 <= 8);
      CHECK(w.r0 >= 0.0);
      CHECK(w.r0 < 10.0);
    }
  }

  SUBCASE("different indices and different run seeds give different instances") {
    const Instance a = make_instance(cfg, 999, 0);
    const Instance b = make_instance(cfg, 999, 1);
    const Instance c = make_instance(cfg, 1000, 0);
    CHECK(a.seed != b.seed);
    CHECK(a.provider.to_json() != b.provider.to_json());
    CHECK(a.provider.to_json() != c.provider.to_json());
  }

  SUBCASE("study knobs that do not shape the world leave instances unchanged") {
    ExperimentConfig other = cfg;
    other.priors = {"gaussian"};
    other.ks = {5};
    other.random_repeats = 9;
    other.n_instances = 7;
    const Instance a = make_instance(cfg, 321, 1);
    const Instance b = make_instance(other, 321, 1);
    CHECK(a.provider.to_json() == b.provider.to_json());
    CHECK(a.true_index == b.true_index);
    CHECK(a.candidates[0].for_feature(0).to_json() == b.candidates[0].for_feature(0).to_json());
  }

  SUBCASE("overcooked instances carry chef and waiter parameters") {
    ExperimentConfig oc = cfg;
    oc.domain = "overcooked";
    oc.horizon = 3;
    const Instance inst = make_instance(oc, 5, 0);
    CHECK(inst.domain == "overcooked");
    CHECK(inst.provider.feature_ids() == std::vector<int>{1});
    REQUIRE(inst.candidates.size() == 2);
    CHECK(inst.candidates[0].for_feature(1).horizon == 3);
    REQUIRE(inst.waiter_params.size() == 2);
    CHECK(inst.chef_params.p_boiling >= 0.0);
    CHECK(inst.chef_params.p_boiling <= 0.1);
  }
}

TEST_CASE("gen writes the instance corpus layout") {
  TempDir tmp("gen");
  const ExperimentConfig cfg = tiny_cfg();
  run_gen(cfg, 7, tmp.str());

  for (int i = 0; i < cfg.n_instances; ++i) {
    const Instance inst = make_instance(cfg, 7, i);
    const std::string dir =
        tmp.str() + "/instances/synthetic/" + std::to_string(inst.seed);

    const std::string provider_text = read_file(dir + "/provider.json");
    CHECK(provider_text == inst.provider.to_json() + "\n");
    const ProviderModel parsed = ProviderModel::from_json(provider_text);
    CHECK(parsed.to_json() == inst.provider.to_json());

    for (int j = 0; j < cfg.n_candidates; ++j) {
      const json wrapper =
          json::parse(read_file(dir + "/recipient_" + std::to_string(j) + ".json"));
      REQUIRE(wrapper.contains("models"));
      REQUIRE(wrapper["models"].contains("0"));
      const RecipientModel rm = RecipientModel::from_json(wrapper["models"]["0"].dump());
      CHECK(rm.to_json() == inst.candidates[static_cast<size_t>(j)].for_feature(0).to_json());
    }

    const json params = json::parse(read_file(dir + "/params.json"));
    CHECK(params.at("domain") == "synthetic");
    CHECK(params.at("seed").get<uint64_t>() == inst.seed);
    CHECK(params.at("instance_index").get<int>() == i);
    CHECK(params.at("m").get<int>() == 1);
    CHECK(params.at("horizon").get<int>() == cfg.horizon);
    CHECK(params.at("n_candidates").get<int>() == cfg.n_candidates);
    CHECK(params.at("true_index").get<int>() == inst.true_index);
    REQUIRE(params.at("candidates").size() == static_cast<size_t>(cfg.n_candidates));
    for (int j = 0; j < cfg.n_candidates; ++j) {
      const json& c = params.at("candidates")[static_cast<size_t>(j)];
      CHECK(c.at("L0").get<int>() == inst.walk_params[static_cast<size_t>(j)].L0);
      CHECK(c.at("r0").get<double>() ==
            doctest::Approx(inst.walk_params[static_cast<size_t>(j)].r0).epsilon(1e-15));
    }
  }

  SUBCASE("overcooked corpus records chef and waiter geometry") {
    TempDir tmp2("gen_oc");
    ExperimentConfig oc = tiny_cfg();
    oc.domain = "overcooked";
    oc.horizon = 3;
    oc.n_instances = 1;
    run_gen(oc, 9, tmp2.str());
    const Instance inst = make_instance(oc, 9, 0);
    const std::string dir =
        tmp2.str() + "/instances/overcooked/" + std::to_string(inst.seed);
    const json params = json::parse(read_file(dir + "/params.json"));
    CHECK(params.at("domain") == "overcooked");
    const json& chef = params.at("chef");
    CHECK(chef.contains("chef"));
    CHECK(chef.at("tomatoes").size() == 1);
    CHECK(chef.contains("pot"));
    CHECK(chef.contains("knife"));
    CHECK(chef.at("p_boiling").get<double>() ==
          doctest::Approx(inst.chef_params.p_boiling).epsilon(1e-15));
    REQUIRE(params.at("waiters").size() == 2);
    for (const json& w : params.at("waiters")) {
      CHECK(w.contains("waiter"));
      CHECK(w.contains("delivery"));
      CHECK(w.contains("customer"));
      REQUIRE(w.at("r_delivery").size() == 1);  // one reward per food item
      CHECK(w.at("r_delivery")[0].get<double>() >= 5.0);
      CHECK(w.at("r_distance").get<double>() >= 0.0);
    }
  }
}

TEST_CASE("discretization study is reproducible and internally consistent") {
  TempDir tmp1("disc1");
  TempDir tmp2("disc2");
  const ExperimentConfig cfg = tiny_cfg();
  run_discretize(cfg, 11, tmp1.str());
  run_discretize(cfg, 11, tmp2.str());

  // Value outputs are bit-for-bit reproducible; timings are wall clock and
  // only need to exist.
  CHECK(read_file(tmp1.str() + "/results.csv") == read_file(tmp2.str() + "/results.csv"));

  const CsvTable results = read_csv(tmp1.str() + "/results.csv");
  CHECK(results.header ==
        std::vector<std::string>{"instance", "seed", "prior", "disc", "n", "k", "method",
                                 "size_mean", "truncated", "eus", "eus_norm", "single_best",
                                 "upper_bound"});
  // 2 instances x 1 prior x 2 discretizations x 2 query sizes x {greedy,
  // exhaustive} (both ks are within exhaustive_max_k).
  CHECK(results.rows.size() == 16);

  std::map<std::string, double> greedy_eus;
  for (const auto& row : results.rows) {
    const std::string disc = cell(results, row, "disc");
    const std::string n = cell(results, row, "n");
    if (disc == "breakpoints")
      CHECK(n.empty());
    else {
      CHECK(disc == "even");
      CHECK(n == "4");
    }
    CHECK(cell(results, row, "truncated") == "0");
    CHECK(num(results, row, "size_mean") > 0.0);

    const double upper = num(results, row, "upper_bound");
    const double single = num(results, row, "single_best");
    CHECK(single <= upper + 1e-9);
    const std::string method = cell(results, row, "method");
    const std::string key = cell(results, row, "instance") + "|" +
                            cell(results, row, "prior") + "|" + disc + "|" + n + "|" +
                            cell(results, row, "k");
    const std::string eus_str = cell(results, row, "eus");
    REQUIRE(!eus_str.empty());  // tiny sets never blow the exhaustive budget
    const double v = std::stod(eus_str);
    CHECK(v <= upper + 1e-9);
    if (method == "greedy") {
      greedy_eus[key] = v;
    } else {
      REQUIRE(method == "exhaustive");
      REQUIRE(greedy_eus.count(key) == 1);  // greedy row precedes exhaustive
      CHECK(v >= greedy_eus[key] - 1e-9);
    }
    // Normalization is affine, so it must order identically with eus.
    const std::string norm = cell(results, row, "eus_norm");
    if (!norm.empty()) {
      const double denom = upper - single;
      CHECK(std::stod(norm) == doctest::Approx((v - single) / denom).epsilon(1e-6));
    }
  }

  const CsvTable timings = read_csv(tmp1.str() + "/timings.csv");
  CHECK(timings.header == std::vector<std::string>{"instance", "seed", "disc", "n", "phase",
                                                   "k", "ms"});
  std::set<std::string> phases;
  for (const auto& row : timings.rows) {
    phases.insert(cell(timings, row, "phase"));
    CHECK(num(timings, row, "ms") >= 0.0);
  }
  CHECK(phases == std::set<std::string>{"build", "evaluate", "greedy", "exhaustive"});
}

TEST_CASE("query study emits sane normalized values") {
  TempDir tmp("query");
  ExperimentConfig cfg = tiny_cfg();
  cfg.rounds = 2;
  cfg.k0 = 1;
  cfg.priors = {"uniform", "gaussian"};
  run_query_study(cfg, 13, tmp.str());

  const CsvTable results = read_csv(tmp.str() + "/results.csv");
  CHECK(results.header ==
        std::vector<std::string>{"instance", "seed", "prior", "k", "method", "repeat", "rounds",
                                 "k0", "eus", "eus_norm", "eu_star", "upper_bound"});
  // Per instance x prior x k: one greedy, one exhaustive, two random repeats,
  // one two-round row.
  CHECK(results.rows.size() == 2 * 2 * 2 * 5);

  std::map<std::string, double> greedy_eus;
  int n_tworound = 0;
  for (const auto& row : results.rows) {
    const std::string method = cell(results, row, "method");
    const double upper = num(results, row, "upper_bound");
    const double eu_star = num(results, row, "eu_star");
    CHECK(eu_star <= upper + 1e-9);
    const std::string key = cell(results, row, "instance") + "|" +
                            cell(results, row, "prior") + "|" + cell(results, row, "k");
    const std::string eus_str = cell(results, row, "eus");
    REQUIRE(!eus_str.empty());
    const double v = std::stod(eus_str);
    CHECK(v <= upper + 1e-9);

    if (method == "random") {
      CHECK(!cell(results, row, "repeat").empty());
    } else {
      CHECK(cell(results, row, "repeat").empty());
    }
    if (method == "tworound") {
      ++n_tworound;
      CHECK(cell(results, row, "rounds") == "2");
      CHECK(cell(results, row, "k0") == "1");
      // Expected two-round yield can only improve on committing to the best
      // single commitment up front.
      CHECK(v >= eu_star - 1e-9);
    } else {
      CHECK(cell(results, row, "rounds") == "1");
      CHECK(cell(results, row, "k0").empty());
    }
    if (method == "greedy") {
      // Greedy's first pick is the best single commitment, and adding
      // entries never hurts.
      CHECK(v >= eu_star - 1e-9);
      greedy_eus[key] = v;
    }
    if (method == "exhaustive") {
      REQUIRE(greedy_eus.count(key) == 1);
      CHECK(v >= greedy_eus[key] - 1e-9);
    }
  }
  CHECK(n_tworound == 2 * 2 * 2);

  const CsvTable timings = read_csv(tmp.str() + "/timings.csv");
  CHECK(timings.header ==
        std::vector<std::string>{"instance", "seed", "prior", "k", "method", "ms"});
  CHECK(!timings.rows.empty());
}

TEST_CASE("joint study reports a dominating centralized ceiling") {
  TempDir tmp("joint");
  ExperimentConfig cfg = tiny_cfg();
  cfg.ks = {1};
  run_joint_value(cfg, 17, tmp.str());

  const CsvTable results = read_csv(tmp.str() + "/results.csv");
  CHECK(results.header ==
        std::vector<std::string>{"instance", "seed", "kind", "k", "repeat", "T", "p", "u_c",
                                 "provider_value", "recipient_value", "total", "norm_affine",
                                 "norm_ratio"});

  std::map<std::string, double> mmdp_total;
  std::map<std::string, std::map<std::string, int>> kind_counts;
  for (const auto& row : results.rows) {
    const std::string inst = cell(results, row, "instance");
    const std::string kind = cell(results, row, "kind");
    ++kind_counts[inst][kind];
    if (kind == "mmdp") {
      mmdp_total[inst] = num(results, row, "total");
      const std::string norm = cell(results, row, "norm_affine");
      if (!norm.empty()) CHECK(norm == csv_double(100.0));
      const std::string ratio = cell(results, row, "norm_ratio");
      if (!ratio.empty()) CHECK(ratio == csv_double(1.0));
    }
  }
  REQUIRE(mmdp_total.size() == 2);
  for (const auto& [inst, counts] : kind_counts) {
    CHECK(counts.at("mmdp") == 1);
    CHECK(counts.at("null") == 1);
    CHECK(counts.at("optimal") == 1);
    CHECK(counts.at("query") == 1);
    CHECK(counts.at("random") == 2);
  }

  for (const auto& row : results.rows) {
    const std::string kind = cell(results, row, "kind");
    if (kind == "mmdp") continue;
    const std::string inst = cell(results, row, "instance");
    const double pv = num(results, row, "provider_value");
    const double rv = num(results, row, "recipient_value");
    const double total = num(results, row, "total");
    CHECK(total == doctest::Approx(pv + rv).epsilon(1e-9));
    // No decentralized execution beats the joint planner's ceiling.
    CHECK(total <= mmdp_total.at(inst) + 1e-6);
    const int T = static_cast<int>(num(results, row, "T"));
    CHECK(T >= 1);
    CHECK(T <= cfg.horizon);
    const double p = num(results, row, "p");
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
    if (kind == "query")
      CHECK(cell(results, row, "k") == "1");
    else
      CHECK(cell(results, row, "k").empty());
    if (kind == "random")
      CHECK(!cell(results, row, "repeat").empty());
    else
      CHECK(cell(results, row, "repeat").empty());
  }
}

TEST_CASE("protocol study writes parseable transcripts") {
  TempDir tmp("proto");
  const ExperimentConfig cfg = tiny_cfg();
  run_protocol_sim(cfg, 19, tmp.str());

  const CsvTable results = read_csv(tmp.str() + "/results.csv");
  CHECK(results.header ==
        std::vector<std::string>{"instance", "seed", "k", "round", "response_index", "agreed_T",
                                 "agreed_p", "agreed_u", "provider_value", "recipient_value",
                                 "query_bytes", "response_bytes", "provider_policy_id",
                                 "recipient_policy_id", "n_rounds"});
  // One round per (instance, k) in a single-round exchange.
  REQUIRE(results.rows.size() == 4);

  for (const auto& row : results.rows) {
    CHECK(cell(results, row, "round") == "0");
    CHECK(cell(results, row, "n_rounds") == "1");
    const std::string i = cell(results, row, "instance");
    const std::string k = cell(results, row, "k");
    const std::string stem =
        tmp.str() + "/transcripts/instance_" + i + "_k" + k + "_round0";

    std::string query_text = read_file(stem + "_query.json");
    REQUIRE(!query_text.empty());
    REQUIRE(query_text.back() == '\n');
    query_text.pop_back();
    CHECK(static_cast<size_t>(num(results, row, "query_bytes")) == query_text.size());
    const AnnotatedQuery q = AnnotatedQuery::from_wire(query_text);
    CHECK(q.entries.size() >= 1);
    CHECK(q.entries.size() <= static_cast<size_t>(std::stoi(k)));

    std::string response_text = read_file(stem + "_response.json");
    REQUIRE(!response_text.empty());
    REQUIRE(response_text.back() == '\n');
    response_text.pop_back();
    CHECK(static_cast<size_t>(num(results, row, "response_bytes")) == response_text.size());
    const ResponseMessage r = ResponseMessage::from_wire(response_text);
    CHECK(std::to_string(r.index) == cell(results, row, "response_index"));
    CHECK(r.index >= 0);
    CHECK(r.index < static_cast<int>(q.entries.size()));

    // The agreed commitment is the entry the recipient picked in the last
    // (here: only) round.
    const Commitment& picked = q.entries[static_cast<size_t>(r.index)].c;
    CHECK(std::to_string(picked.T) == cell(results, row, "agreed_T"));
    CHECK(csv_double(picked.p) == cell(results, row, "agreed_p"));
    CHECK(std::to_string(picked.u_c) == cell(results, row, "agreed_u"));
    CHECK(num(results, row, "provider_value") ==
          doctest::Approx(q.entries[static_cast<size_t>(r.index)].provider_value)
              .epsilon(1e-9));
  }
}

TEST_CASE("worker count honors the thread cap without changing results") {
  SUBCASE("environment variable overrides hardware concurrency") {
    {
      EnvGuard guard("COMMITKIT_THREADS", "3");
      CHECK(worker_count() == 3);
    }
    {
      EnvGuard guard("COMMITKIT_THREADS", "0");
      CHECK(worker_count() >= 1);  // non-positive values fall back
    }
    CHECK(worker_count() >= 1);
  }

  SUBCASE("evaluation output is identical for any worker count") {
    const Instance inst = make_instance(tiny_cfg(), 23, 0);
    DiscretizationSpec spec;
    spec.kind = DiscretizationSpec::Kind::kEven;
    spec.n = 6;

    Discretization d1, d3;
    EvaluatedCommitmentSet es1, es3;
    {
      EnvGuard guard("COMMITKIT_THREADS", "1");
      d1 = build_commitment_set(inst.provider, spec);
      es1 = evaluate_commitments(inst.provider, inst.candidates, d1.commitments(),
                                 LpMethod::kAuto);
    }
    {
      EnvGuard guard("COMMITKIT_THREADS", "3");
      d3 = build_commitment_set(inst.provider, spec);
      es3 = evaluate_commitments(inst.provider, inst.candidates, d3.commitments(),
                                 LpMethod::kAuto);
    }
    CHECK(d1.to_json() == d3.to_json());
    REQUIRE(es1.commitments.size() == es3.commitments.size());
    CHECK(es1.provider_value == es3.provider_value);  // exact: same arithmetic
    REQUIRE(es1.recipient_value.size() == es3.recipient_value.size());
    for (size_t c = 0; c < es1.recipient_value.size(); ++c)
      CHECK(es1.recipient_value[c] == es3.recipient_value[c]);
  }
}

TEST_SUITE_END();

}  // namespace
}  // namespace commitkit
