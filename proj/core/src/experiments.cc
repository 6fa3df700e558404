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

#include "commitkit/experiments.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "commitkit/errors.h"
#include "commitkit/protocol.h"

namespace commitkit {

namespace {

using nlohmann::json;

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

void ensure_dir(const std::string& path) { std::filesystem::create_directories(path); }

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path);
  out << content;
}

// Rows are assembled in memory and written at once; fields never contain
// commas or quotes, so no escaping is needed.
class CsvFile {
 public:
  explicit CsvFile(std::vector<std::string> header) : header_(std::move(header)) {}

  void add(std::vector<std::string> row) {
    if (row.size() != header_.size()) throw ValidationError("csv row width mismatch");
    rows_.push_back(std::move(row));
  }

  void append(CsvFile&& other) {
    for (auto& row : other.rows_) rows_.push_back(std::move(row));
    other.rows_.clear();
  }

  void save(const std::string& path) const {
    std::string text;
    auto join = [&text](const std::vector<std::string>& fields) {
      for (size_t i = 0; i < fields.size(); ++i) {
        if (i) text += ',';
        text += fields[i];
      }
      text += '\n';
    };
    join(header_);
    for (const auto& row : rows_) join(row);
    write_file(path, text);
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

std::string csv_int(int64_t v) { return std::to_string(v); }
std::string csv_u64(uint64_t v) { return std::to_string(v); }
std::string csv_ms(double ms) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", ms);
  return buf;
}

std::string lp_method_name(LpMethod m) {
  switch (m) {
    case LpMethod::kAuto:
      return "auto";
    case LpMethod::kDenseTableau:
      return "tableau";
    case LpMethod::kColumnGeneration:
      return "column_generation";
  }
  throw ValidationError("unknown lp method");
}

LpMethod lp_method_from_name(const std::string& name) {
  if (name == "auto") return LpMethod::kAuto;
  if (name == "tableau") return LpMethod::kDenseTableau;
  if (name == "column_generation") return LpMethod::kColumnGeneration;
  throw ValidationError("unknown lp method: " + name);
}

std::vector<DiscretizationSpec> default_discretizations() {
  std::vector<DiscretizationSpec> out;
  DiscretizationSpec bp;
  out.push_back(bp);
  for (int n : {10, 20, 50}) {
    DiscretizationSpec even;
    even.kind = DiscretizationSpec::Kind::kEven;
    even.n = n;
    out.push_back(even);
  }
  for (int n : {10, 20, 50}) {
    DiscretizationSpec dp;
    dp.kind = DiscretizationSpec::Kind::kDetPolicy;
    dp.n = n;
    dp.allow_partial = true;
    out.push_back(dp);
  }
  return out;
}

json spec_to_json(const DiscretizationSpec& s) {
  json j;
  j["kind"] = s.kind_name();
  if (s.kind != DiscretizationSpec::Kind::kBreakpoints) j["n"] = s.n;
  if (s.kind == DiscretizationSpec::Kind::kBreakpoints) {
    j["tol"] = s.tol;
    if (s.min_width > 0) j["min_width"] = s.min_width;
  }
  if (s.kind == DiscretizationSpec::Kind::kDetPolicy) {
    j["dp_cap"] = s.dp_cap;
    j["allow_partial"] = s.allow_partial;
  }
  return j;
}

DiscretizationSpec spec_from_json(const json& j, LpMethod method) {
  DiscretizationSpec s;
  s.kind = DiscretizationSpec::kind_from_name(j.at("kind").get<std::string>());
  s.n = j.value("n", s.n);
  s.tol = j.value("tol", s.tol);
  s.min_width = j.value("min_width", s.min_width);
  s.dp_cap = j.value("dp_cap", s.dp_cap);
  s.allow_partial = j.value("allow_partial", s.allow_partial);
  s.method = method;
  return s;
}

// The breakpoints spec used wherever a study needs "the" commitment set:
// the first configured breakpoints entry, or the default one.
DiscretizationSpec breakpoint_spec(const ExperimentConfig& cfg) {
  for (const auto& s : cfg.discretizations)
    if (s.kind == DiscretizationSpec::Kind::kBreakpoints) return s;
  DiscretizationSpec s;
  s.method = cfg.method;
  return s;
}

json cell_json(int cell) {
  return json::array({overcooked_cell_row(cell), overcooked_cell_col(cell)});
}

json chef_params_json(const OvercookedChefParams& p) {
  json j;
  j["chef"] = cell_json(p.chef_cell);
  json tomatoes = json::array();
  for (int cell : p.tomato_cells) tomatoes.push_back(cell_json(cell));
  j["tomatoes"] = tomatoes;
  j["pot"] = cell_json(p.pot_cell);
  j["knife"] = cell_json(p.knife_cell);
  j["p_boiling"] = p.p_boiling;
  return j;
}

json waiter_params_json(const OvercookedWaiterParams& p) {
  json j;
  j["waiter"] = cell_json(p.waiter_cell);
  j["delivery"] = cell_json(p.delivery_cell);
  j["customer"] = cell_json(p.customer_cell);
  j["r_delivery"] = p.r_delivery;
  j["r_distance"] = p.r_distance;
  return j;
}

Belief study_prior(const std::string& kind, int n, uint64_t instance_seed) {
  Rng rng = Rng(instance_seed).fork("prior_" + kind);
  return make_prior(prior_kind_from_name(kind), n, rng);
}

// Exact expected EUS of the adaptive two-round scheme: first a greedy query
// of size k0, then, per response branch, a greedy query of size k under the
// branch posterior.
double two_round_expected_eus(const EvaluatedCommitmentSet& es, const Belief& mu0, int k0,
                              int k) {
  const Query q1 = greedy_query(es, mu0, k0);
  std::vector<double> mass(q1.size(), 0.0);
  for (int i = 0; i < mu0.size(); ++i)
    if (mu0.weights[i] > 0.0) mass[selected_index(es, i, q1)] += mu0.weights[i];
  double total = 0.0;
  for (size_t r = 0; r < q1.size(); ++r) {
    if (mass[r] <= 0.0) continue;
    const Belief mu1 = posterior(es, mu0, q1, static_cast<int>(r));
    const Query q2 = greedy_query(es, mu1, k);
    total += mass[r] * eus(es, mu1, q2);
  }
  return total;
}

// Runs fn(i) for every instance index, collecting exceptions.
template <typename Fn>
void for_each_instance(int n, Fn&& fn) {
  for (int i = 0; i < n; ++i) fn(i);
}

struct BuiltDisc {
  DiscretizationSpec spec;
  Discretization d;
  EvaluatedCommitmentSet es;
  double build_ms = 0.0;
  double eval_ms = 0.0;
};

BuiltDisc build_and_evaluate(const Instance& inst, const DiscretizationSpec& spec,
                             LpMethod method) {
  BuiltDisc out;
  out.spec = spec;
  const double t0 = now_ms();
  out.d = build_commitment_set(inst.provider, spec);
  const double t1 = now_ms();
  out.es = evaluate_commitments(inst.provider, inst.candidates, out.d.commitments(), method);
  out.build_ms = t1 - t0;
  out.eval_ms = now_ms() - t1;
  return out;
}

const BuiltDisc* find_disc(const std::vector<BuiltDisc>& built, DiscretizationSpec::Kind kind,
                           int n) {
  for (const auto& b : built)
    if (b.spec.kind == kind && (kind == DiscretizationSpec::Kind::kBreakpoints || b.spec.n == n))
      return &b;
  return nullptr;
}

}  // namespace

std::string csv_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

int CsvTable::column(const std::string& name) const {
  for (size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + path);
  CsvTable table;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (line.back() == ',') fields.push_back("");
    if (first) {
      table.header = std::move(fields);
      first = false;
    } else {
      table.rows.push_back(std::move(fields));
    }
  }
  return table;
}

void ExperimentConfig::validate() const {
  if (domain != "synthetic" && domain != "overcooked")
    throw ValidationError("config: unknown domain " + domain);
  if (domain == "synthetic" && m != 1)
    throw ValidationError("config: synthetic domain has a single feature (m = 1)");
  if (n_instances < 1 || n_candidates < 1 || m < 1 || horizon < 1)
    throw ValidationError("config: counts must be positive");
  if (ks.empty()) throw ValidationError("config: ks must be nonempty");
  for (int k : ks)
    if (k < 1) throw ValidationError("config: query sizes must be positive");
  if (rounds != 1 && rounds != 2) throw ValidationError("config: rounds must be 1 or 2");
  if (k0 < 1) throw ValidationError("config: k0 must be positive");
  if (priors.empty()) throw ValidationError("config: priors must be nonempty");
  for (const auto& p : priors) prior_kind_from_name(p);
  if (discretizations.empty()) throw ValidationError("config: discretizations must be nonempty");
  if (exhaustive_budget < 1 || random_repeats < 1 || joint_state_budget < 1)
    throw ValidationError("config: budgets must be positive");
}

std::string ExperimentConfig::to_json() const {
  json j;
  j["domain"] = domain;
  j["n_instances"] = n_instances;
  j["n_candidates"] = n_candidates;
  j["m"] = m;
  j["horizon"] = horizon;
  j["ks"] = ks;
  j["rounds"] = rounds;
  j["k0"] = k0;
  j["priors"] = priors;
  json discs = json::array();
  for (const auto& s : discretizations) discs.push_back(spec_to_json(s));
  j["discretizations"] = discs;
  j["exhaustive_budget"] = exhaustive_budget;
  j["exhaustive_max_k"] = exhaustive_max_k;
  j["random_repeats"] = random_repeats;
  j["joint_state_budget"] = joint_state_budget;
  j["lp_method"] = lp_method_name(method);
  return j.dump(2);
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
  static const char* const kKnownKeys[] = {
      "domain",           "n_instances",      "n_candidates",  "m",
      "horizon",          "ks",               "rounds",        "k0",
      "priors",           "discretizations",  "exhaustive_budget",
      "exhaustive_max_k", "random_repeats",   "joint_state_budget",
      "lp_method"};
  try {
    json j = json::parse(text);
    for (const auto& [key, value] : j.items()) {
      (void)value;
      if (std::find(std::begin(kKnownKeys), std::end(kKnownKeys), key) == std::end(kKnownKeys))
        throw ValidationError("config: unknown key " + key);
    }
    ExperimentConfig cfg;
    cfg.domain = j.value("domain", cfg.domain);
    cfg.n_instances = j.value("n_instances", cfg.n_instances);
    cfg.n_candidates = j.value("n_candidates", cfg.n_candidates);
    cfg.m = j.value("m", cfg.m);
    cfg.horizon = j.value("horizon", cfg.horizon);
    if (j.contains("ks")) cfg.ks = j.at("ks").get<std::vector<int>>();
    cfg.rounds = j.value("rounds", cfg.rounds);
    cfg.k0 = j.value("k0", cfg.k0);
    if (j.contains("priors")) cfg.priors = j.at("priors").get<std::vector<std::string>>();
    cfg.exhaustive_budget = j.value("exhaustive_budget", cfg.exhaustive_budget);
    cfg.exhaustive_max_k = j.value("exhaustive_max_k", cfg.exhaustive_max_k);
    cfg.random_repeats = j.value("random_repeats", cfg.random_repeats);
    cfg.joint_state_budget = j.value("joint_state_budget", cfg.joint_state_budget);
    cfg.method = lp_method_from_name(j.value("lp_method", std::string("auto")));
    if (j.contains("discretizations")) {
      cfg.discretizations.clear();
      for (const json& d : j.at("discretizations"))
        cfg.discretizations.push_back(spec_from_json(d, cfg.method));
    } else {
      cfg.discretizations = default_discretizations();
      for (auto& s : cfg.discretizations) s.method = cfg.method;
    }
    cfg.validate();
    return cfg;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad config json: ") + e.what());
  }
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

Instance make_instance(const ExperimentConfig& cfg, uint64_t run_seed, int index) {
  Rng inst_rng = Rng(run_seed).fork("instance", static_cast<uint64_t>(index));
  Instance inst;
  inst.seed = inst_rng.seed();
  inst.domain = cfg.domain;
  if (cfg.domain == "synthetic") {
    SyntheticSpec sp;
    sp.horizon = cfg.horizon;
    inst.provider = gen_synthetic_provider(inst_rng.fork("provider").seed(), sp);
    WalkSpec ws;
    ws.horizon = cfg.horizon;
    for (int j = 0; j < cfg.n_candidates; ++j) {
      WalkRecipient wr =
          gen_walk_recipient(inst_rng.fork("candidate", static_cast<uint64_t>(j)).seed(), ws);
      RecipientCandidate rc;
      rc.models.emplace(0, std::move(wr.model));
      inst.candidates.push_back(std::move(rc));
      inst.walk_params.push_back(wr.params);
    }
  } else {
    OvercookedSpec os;
    os.m = cfg.m;
    os.horizon = cfg.horizon;
    OvercookedChef chef = gen_overcooked_chef(inst_rng.fork("provider").seed(), os);
    inst.provider = std::move(chef.model);
    inst.chef_params = std::move(chef.params);
    for (int j = 0; j < cfg.n_candidates; ++j) {
      OvercookedWaiter w =
          gen_overcooked_waiter(inst_rng.fork("candidate", static_cast<uint64_t>(j)).seed(), os);
      inst.candidates.push_back(std::move(w.candidate));
      inst.waiter_params.push_back(std::move(w.params));
    }
  }
  inst.true_index =
      static_cast<int>(inst_rng.fork("true").next_below(static_cast<uint64_t>(cfg.n_candidates)));
  return inst;
}

void run_gen(const ExperimentConfig& cfg, uint64_t seed, const std::string& out_dir) {
  cfg.validate();
  for_each_instance(cfg.n_instances, [&](int i) {
    const Instance inst = make_instance(cfg, seed, i);
    const std::string dir =
        out_dir + "/instances/" + cfg.domain + "/" + std::to_string(inst.seed);
    ensure_dir(dir);
    write_file(dir + "/provider.json", inst.provider.to_json() + "\n");
    for (size_t j = 0; j < inst.candidates.size(); ++j) {
      json models = json::object();
      for (const auto& [f, rm] : inst.candidates[j].models)
        models[std::to_string(f)] = json::parse(rm.to_json());
      json wrapper;
      wrapper["models"] = models;
      write_file(dir + "/recipient_" + std::to_string(j) + ".json", wrapper.dump() + "\n");
    }
    json params;
    params["domain"] = cfg.domain;
    params["seed"] = inst.seed;
    params["instance_index"] = i;
    params["m"] = cfg.m;
    params["horizon"] = cfg.horizon;
    params["n_candidates"] = cfg.n_candidates;
    params["true_index"] = inst.true_index;
    if (cfg.domain == "synthetic") {
      json cands = json::array();
      for (const WalkParams& w : inst.walk_params) {
        json c;
        c["L0"] = w.L0;
        c["r0"] = w.r0;
        cands.push_back(c);
      }
      params["candidates"] = cands;
    } else {
      params["chef"] = chef_params_json(inst.chef_params);
      json waiters = json::array();
      for (const OvercookedWaiterParams& w : inst.waiter_params)
        waiters.push_back(waiter_params_json(w));
      params["waiters"] = waiters;
    }
    write_file(dir + "/params.json", params.dump(2) + "\n");
  });
}

void run_discretize(const ExperimentConfig& cfg, uint64_t seed, const std::string& out_dir) {
  cfg.validate();
  ensure_dir(out_dir);
  CsvFile results({"instance", "seed", "prior", "disc", "n", "k", "method", "size_mean",
                   "truncated", "eus", "eus_norm", "single_best", "upper_bound"});
  CsvFile timings({"instance", "seed", "disc", "n", "phase", "k", "ms"});

  for_each_instance(cfg.n_instances, [&](int i) {
    const Instance inst = make_instance(cfg, seed, i);
    std::vector<BuiltDisc> built;
    for (const DiscretizationSpec& spec : cfg.discretizations)
      built.push_back(build_and_evaluate(inst, spec, cfg.method));

    // Normalization constants: 0 = the best single commitment on the even(10)
    // grid, 1 = the upper bound over the breakpoint set.
    const BuiltDisc* even10 = find_disc(built, DiscretizationSpec::Kind::kEven, 10);
    BuiltDisc even10_local;
    if (!even10) {
      DiscretizationSpec s;
      s.kind = DiscretizationSpec::Kind::kEven;
      s.n = 10;
      s.method = cfg.method;
      even10_local = build_and_evaluate(inst, s, cfg.method);
      even10 = &even10_local;
    }
    const BuiltDisc* bp = find_disc(built, DiscretizationSpec::Kind::kBreakpoints, 0);
    BuiltDisc bp_local;
    if (!bp) {
      bp_local = build_and_evaluate(inst, breakpoint_spec(cfg), cfg.method);
      bp = &bp_local;
    }

    for (const BuiltDisc& b : built) {
      const std::string disc = b.spec.kind_name();
      const std::string n_str =
          b.spec.kind == DiscretizationSpec::Kind::kBreakpoints ? "" : csv_int(b.spec.n);
      timings.add({csv_int(i), csv_u64(inst.seed), disc, n_str, "build", "", csv_ms(b.build_ms)});
      timings.add(
          {csv_int(i), csv_u64(inst.seed), disc, n_str, "evaluate", "", csv_ms(b.eval_ms)});
    }

    for (const std::string& prior_kind : cfg.priors) {
      const Belief mu = study_prior(prior_kind, cfg.n_candidates, inst.seed);
      const double single_best =
          expected_utility(even10->es, mu, optimal_commitment_under_belief(even10->es, mu));
      const double upper = eus_upper_bound(bp->es, mu);
      const double denom = upper - single_best;

      for (const BuiltDisc& b : built) {
        const std::string disc = b.spec.kind_name();
        const std::string n_str =
            b.spec.kind == DiscretizationSpec::Kind::kBreakpoints ? "" : csv_int(b.spec.n);
        for (int k : cfg.ks) {
          const double t0 = now_ms();
          const Query greedy = greedy_query(b.es, mu, k);
          const double greedy_ms = now_ms() - t0;
          const double eus_greedy = eus(b.es, mu, greedy);
          const std::string norm =
              std::abs(denom) > 1e-12 ? csv_double((eus_greedy - single_best) / denom) : "";
          results.add({csv_int(i), csv_u64(inst.seed), prior_kind, disc, n_str, csv_int(k),
                       "greedy", csv_double(b.d.mean_size_per_T()),
                       b.d.truncated ? "1" : "0", csv_double(eus_greedy), norm,
                       csv_double(single_best), csv_double(upper)});
          timings.add({csv_int(i), csv_u64(inst.seed), disc, n_str, "greedy", csv_int(k),
                       csv_ms(greedy_ms)});

          if (k <= cfg.exhaustive_max_k) {
            std::string eus_str, norm_str, ms_str;
            const double t1 = now_ms();
            try {
              const Query exact = exhaustive_query(b.es, mu, k, cfg.exhaustive_budget);
              const double eus_exact = eus(b.es, mu, exact);
              eus_str = csv_double(eus_exact);
              if (std::abs(denom) > 1e-12)
                norm_str = csv_double((eus_exact - single_best) / denom);
            } catch (const BudgetExceededError&) {
              // Reported as an absent cell.
            }
            ms_str = csv_ms(now_ms() - t1);
            results.add({csv_int(i), csv_u64(inst.seed), prior_kind, disc, n_str, csv_int(k),
                         "exhaustive", csv_double(b.d.mean_size_per_T()),
                         b.d.truncated ? "1" : "0", eus_str, norm_str,
                         csv_double(single_best), csv_double(upper)});
            timings.add({csv_int(i), csv_u64(inst.seed), disc, n_str, "exhaustive", csv_int(k),
                         ms_str});
          }
        }
      }
    }
  });

  results.save(out_dir + "/results.csv");
  timings.save(out_dir + "/timings.csv");
}

void run_query_study(const ExperimentConfig& cfg, uint64_t seed, const std::string& out_dir) {
  cfg.validate();
  ensure_dir(out_dir);
  CsvFile results({"instance", "seed", "prior", "k", "method", "repeat", "rounds", "k0", "eus",
                   "eus_norm", "eu_star", "upper_bound"});
  CsvFile timings({"instance", "seed", "prior", "k", "method", "ms"});

  for_each_instance(cfg.n_instances, [&](int i) {
    const Instance inst = make_instance(cfg, seed, i);
    const BuiltDisc bp = build_and_evaluate(inst, breakpoint_spec(cfg), cfg.method);

    for (const std::string& prior_kind : cfg.priors) {
      const Belief mu = study_prior(prior_kind, cfg.n_candidates, inst.seed);
      const double eu_star =
          expected_utility(bp.es, mu, optimal_commitment_under_belief(bp.es, mu));
      const double upper = eus_upper_bound(bp.es, mu);
      const double denom = upper - eu_star;
      auto norm_of = [&](double v) {
        return std::abs(denom) > 1e-12 ? csv_double((v - eu_star) / denom) : std::string();
      };
      auto emit = [&](int k, const std::string& method, int repeat, int rounds_used, int k0_used,
                      const std::string& eus_str, const std::string& norm_str) {
        results.add({csv_int(i), csv_u64(inst.seed), prior_kind, csv_int(k), method,
                     repeat >= 0 ? csv_int(repeat) : "", csv_int(rounds_used),
                     rounds_used == 2 ? csv_int(k0_used) : "", eus_str, norm_str,
                     csv_double(eu_star), csv_double(upper)});
      };

      for (int k : cfg.ks) {
        double t0 = now_ms();
        const Query greedy = greedy_query(bp.es, mu, k);
        timings.add({csv_int(i), csv_u64(inst.seed), prior_kind, csv_int(k), "greedy",
                     csv_ms(now_ms() - t0)});
        const double eus_greedy = eus(bp.es, mu, greedy);
        emit(k, "greedy", -1, 1, 0, csv_double(eus_greedy), norm_of(eus_greedy));

        if (k <= cfg.exhaustive_max_k) {
          std::string eus_str, norm_str;
          t0 = now_ms();
          try {
            const Query exact = exhaustive_query(bp.es, mu, k, cfg.exhaustive_budget);
            const double v = eus(bp.es, mu, exact);
            eus_str = csv_double(v);
            norm_str = norm_of(v);
          } catch (const BudgetExceededError&) {
          }
          timings.add({csv_int(i), csv_u64(inst.seed), prior_kind, csv_int(k), "exhaustive",
                       csv_ms(now_ms() - t0)});
          emit(k, "exhaustive", -1, 1, 0, eus_str, norm_str);
        }

        for (int rep = 0; rep < cfg.random_repeats; ++rep) {
          Rng rng = Rng(inst.seed).fork("random_query", static_cast<uint64_t>(rep));
          const Query q = random_query(bp.es, k, rng);
          const double v = eus(bp.es, mu, q);
          emit(k, "random", rep, 1, 0, csv_double(v), norm_of(v));
        }

        if (cfg.rounds == 2) {
          t0 = now_ms();
          const double v = two_round_expected_eus(bp.es, mu, cfg.k0, k);
          timings.add({csv_int(i), csv_u64(inst.seed), prior_kind, csv_int(k), "tworound",
                       csv_ms(now_ms() - t0)});
          emit(k, "tworound", -1, 2, cfg.k0, csv_double(v), norm_of(v));
        }
      }
    }
  });

  results.save(out_dir + "/results.csv");
  timings.save(out_dir + "/timings.csv");
}

void run_joint_value(const ExperimentConfig& cfg, uint64_t seed, const std::string& out_dir) {
  cfg.validate();
  ensure_dir(out_dir);
  CsvFile results({"instance", "seed", "kind", "k", "repeat", "T", "p", "u_c", "provider_value",
                   "recipient_value", "total", "norm_affine", "norm_ratio"});
  CsvFile timings({"instance", "seed", "kind", "k", "ms"});

  for_each_instance(cfg.n_instances, [&](int i) {
    const Instance inst = make_instance(cfg, seed, i);
    const RecipientCandidate& truth = inst.candidates[inst.true_index];
    const std::vector<int> features = inst.provider.feature_ids();
    const int first_feature = features.front();
    const int H = inst.provider.mdp.horizon;

    // Centralized ceiling.
    double t0 = now_ms();
    double mmdp = 0.0;
    if (cfg.domain == "overcooked") {
      OvercookedSpec os;
      os.m = cfg.m;
      os.horizon = cfg.horizon;
      mmdp = overcooked_joint_value(inst.chef_params, inst.waiter_params[inst.true_index], os);
    } else {
      FiniteHorizonMdp joint;
      try {
        joint = build_joint_mmdp(inst.provider, truth.for_feature(first_feature), first_feature,
                                 cfg.joint_state_budget);
      } catch (const ValidationError& e) {
        std::fprintf(stderr, "note: skipping instance %d: %s\n", i, e.what());
        return;
      }
      mmdp = initial_value(joint, solve(joint).value);
    }
    timings.add({csv_int(i), csv_u64(inst.seed), "mmdp", "", csv_ms(now_ms() - t0)});

    // Null commitment: both agents locally optimal, no promise.
    t0 = now_ms();
    const Commitment null_c{H, 0.0, first_feature};
    const JointExecutionResult null_exec =
        evaluate_joint_execution(inst.provider, truth.for_feature(first_feature), null_c,
                                 cfg.method);
    timings.add({csv_int(i), csv_u64(inst.seed), "null", "", csv_ms(now_ms() - t0)});

    const double null_total = null_exec.total;
    const double affine_denom = mmdp - null_total;
    auto norm_affine = [&](double total) {
      return std::abs(affine_denom) > 1e-12
                 ? csv_double(100.0 * (total - null_total) / affine_denom)
                 : std::string();
    };
    auto norm_ratio = [&](double total) {
      return std::abs(mmdp) > 1e-12 ? csv_double(total / mmdp) : std::string();
    };
    auto emit = [&](const std::string& kind, int k, int repeat, const Commitment& c,
                    double pv, double rv) {
      const double total = pv + rv;
      results.add({csv_int(i), csv_u64(inst.seed), kind, k > 0 ? csv_int(k) : "",
                   repeat >= 0 ? csv_int(repeat) : "", csv_int(c.T), csv_double(c.p),
                   csv_int(c.u_c), csv_double(pv), csv_double(rv), csv_double(total),
                   norm_affine(total), norm_ratio(total)});
    };

    results.add({csv_int(i), csv_u64(inst.seed), "mmdp", "", "", "", "", "", "", "",
                 csv_double(mmdp), norm_affine(mmdp), norm_ratio(mmdp)});
    emit("null", 0, -1, null_c, null_exec.provider_value, null_exec.recipient_value);

    // Centralized-optimal commitment, executed decentrally.
    t0 = now_ms();
    const CentralizedResult opt =
        centralized_optimal_commitment(inst.provider, truth, breakpoint_spec(cfg));
    const JointExecutionResult opt_exec = evaluate_joint_execution(
        inst.provider, truth.for_feature(opt.commitment.u_c), opt.commitment, cfg.method);
    timings.add({csv_int(i), csv_u64(inst.seed), "optimal", "", csv_ms(now_ms() - t0)});
    emit("optimal", 0, -1, opt.commitment, opt_exec.provider_value, opt_exec.recipient_value);

    // Query-agreed commitments.
    const Belief mu = study_prior(cfg.priors.front(), cfg.n_candidates, inst.seed);
    for (int k : cfg.ks) {
      t0 = now_ms();
      const ExchangeResult ex = run_exchange(inst.provider, inst.candidates, mu, truth, k,
                                             cfg.rounds, cfg.k0, breakpoint_spec(cfg));
      const JointExecutionResult ex_exec = evaluate_joint_execution(
          inst.provider, truth.for_feature(ex.agreed.u_c), ex.agreed, cfg.method);
      timings.add({csv_int(i), csv_u64(inst.seed), "query", csv_int(k), csv_ms(now_ms() - t0)});
      emit("query", k, -1, ex.agreed, ex_exec.provider_value, ex_exec.recipient_value);
    }

    // Random commitments.
    for (int rep = 0; rep < cfg.random_repeats; ++rep) {
      Rng rng = Rng(inst.seed).fork("random_c", static_cast<uint64_t>(rep));
      Commitment c;
      c.T = 1 + static_cast<int>(rng.next_below(static_cast<uint64_t>(H)));
      c.u_c = features[rng.next_below(features.size())];
      const double pbar = max_feasible_probability(inst.provider, c.T, c.u_c);
      c.p = pbar > 0.0 ? rng.next_double(0.0, pbar) : 0.0;
      const JointExecutionResult rnd =
          evaluate_joint_execution(inst.provider, truth.for_feature(c.u_c), c, cfg.method);
      emit("random", 0, rep, c, rnd.provider_value, rnd.recipient_value);
    }
  });

  results.save(out_dir + "/results.csv");
  timings.save(out_dir + "/timings.csv");
}

void run_protocol_sim(const ExperimentConfig& cfg, uint64_t seed, const std::string& out_dir) {
  cfg.validate();
  ensure_dir(out_dir);
  ensure_dir(out_dir + "/transcripts");
  CsvFile results({"instance", "seed", "k", "round", "response_index", "agreed_T", "agreed_p",
                   "agreed_u", "provider_value", "recipient_value", "query_bytes",
                   "response_bytes", "provider_policy_id", "recipient_policy_id", "n_rounds"});
  CsvFile timings({"instance", "seed", "k", "ms"});

  for_each_instance(cfg.n_instances, [&](int i) {
    const Instance inst = make_instance(cfg, seed, i);
    const Belief mu = study_prior(cfg.priors.front(), cfg.n_candidates, inst.seed);
    const RecipientCandidate& truth = inst.candidates[inst.true_index];
    for (int k : cfg.ks) {
      const double t0 = now_ms();
      const ExchangeResult ex = run_exchange(inst.provider, inst.candidates, mu, truth, k,
                                             cfg.rounds, cfg.k0, breakpoint_spec(cfg));
      timings.add({csv_int(i), csv_u64(inst.seed), csv_int(k), csv_ms(now_ms() - t0)});
      for (size_t r = 0; r < ex.rounds.size(); ++r) {
        const Transcript& t = ex.rounds[r];
        const std::string stem = out_dir + "/transcripts/instance_" + std::to_string(i) + "_k" +
                                 std::to_string(k) + "_round" + std::to_string(r);
        write_file(stem + "_query.json", t.query_message + "\n");
        write_file(stem + "_response.json", t.response_message + "\n");
        results.add({csv_int(i), csv_u64(inst.seed), csv_int(k), csv_int(static_cast<int>(r)),
                     csv_int(t.response_index), csv_int(ex.agreed.T), csv_double(ex.agreed.p),
                     csv_int(ex.agreed.u_c), csv_double(ex.provider_value),
                     csv_double(ex.recipient_value), csv_int(static_cast<int64_t>(t.query_bytes())),
                     csv_int(static_cast<int64_t>(t.response_bytes())),
                     csv_u64(ex.provider_policy_id), csv_u64(ex.recipient_policy_id),
                     csv_int(static_cast<int>(ex.rounds.size()))});
      }
    }
  });

  results.save(out_dir + "/results.csv");
  timings.save(out_dir + "/timings.csv");
}

}  // namespace commitkit
