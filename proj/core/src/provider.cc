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

#include "commitkit/provider.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "commitkit/errors.h"
#include "commitkit/simplex.h"

namespace commitkit {

namespace {

using nlohmann::json;

// Programs at most this large go through the dense tableau under kAuto;
// bigger ones use column generation, whose per-solve cost scales with the
// model instead of with the full occupancy polytope.
constexpr int64_t kAutoTableauMaxVars = 256;

constexpr double kFeasSlack = 1e-9;

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

void check_commitment(const ProviderModel& pm, const Commitment& c, int feature) {
  require(c.T >= 1 && c.T <= pm.mdp.horizon, "commitment stage must be in 1..horizon");
  require(c.p >= 0.0 && c.p <= 1.0 && std::isfinite(c.p), "commitment probability must be in [0,1]");
  pm.plus_of(feature);  // throws on unknown feature
}

// ---------------------------------------------------------------------------
// Deterministic-policy machinery shared by both LP paths.

// Backward induction on rewards plus `bonus` for sitting in a plus state at
// stage T (entering the terminal values when T == horizon). Ties toward the
// lowest action index.
DetPolicy best_policy_with_bonus(const ProviderModel& pm, int feature, int T, double bonus) {
  const FiniteHorizonMdp& m = pm.mdp;
  const auto& plus = pm.plus_of(feature);
  const int H = m.horizon;
  std::vector<std::vector<double>> v(H + 1);
  DetPolicy det(H);
  v[H].assign(m.num_states(H), 0.0);
  if (T == H && bonus != 0.0)
    for (int s = 0; s < m.num_states(H); ++s)
      if (plus[H][s]) v[H][s] = bonus;
  for (int h = H - 1; h >= 0; --h) {
    const int n = m.num_states(h);
    v[h].assign(n, 0.0);
    det[h].assign(n, 0);
    for (int s = 0; s < n; ++s) {
      const auto& acts = m.actions[h][s];
      double best = -std::numeric_limits<double>::infinity();
      int arg = 0;
      for (size_t k = 0; k < acts.size(); ++k) {
        double q = acts[k].reward;
        for (const auto& [t, pr] : acts[k].next) q += pr * v[h + 1][t];
        if (q > best) {
          best = q;
          arg = static_cast<int>(k);
        }
      }
      if (h == T && plus[h][s]) best += bonus;
      v[h][s] = best;
      det[h][s] = arg;
    }
  }
  return det;
}

// One forward pass: expected reward and plus mass at stage T of a
// deterministic policy.
std::pair<double, double> evaluate_det(const ProviderModel& pm, int feature, int T,
                                       const DetPolicy& det) {
  const FiniteHorizonMdp& m = pm.mdp;
  const auto& plus = pm.plus_of(feature);
  std::vector<double> mass(m.num_states(0), 0.0);
  mass[m.initial_state] = 1.0;
  double value = 0.0, prob = 0.0;
  for (int h = 0; h <= m.horizon; ++h) {
    if (h == T)
      for (int s = 0; s < m.num_states(h); ++s)
        if (plus[h][s]) prob += mass[s];
    if (h == m.horizon) break;
    std::vector<double> next(m.num_states(h + 1), 0.0);
    for (int s = 0; s < m.num_states(h); ++s) {
      if (mass[s] == 0.0) continue;
      const ActionEntry& a = m.actions[h][s][det[h][s]];
      value += mass[s] * a.reward;
      for (const auto& [t, pr] : a.next) next[t] += mass[s] * pr;
    }
    mass = std::move(next);
  }
  return {value, prob};
}

// ---------------------------------------------------------------------------
// Column generation: Dantzig-Wolfe over deterministic-policy columns with a
// two-row master (plus-mass row with slack, convexity row) solved exactly by
// enumeration of its basic solutions.

struct Column {
  double value = 0.0;
  double prob = 0.0;
  DetPolicy det;
};

struct MasterSolution {
  double value = -std::numeric_limits<double>::infinity();
  int i = -1;          // primary column
  int j = -1;          // mixing partner, -1 for a pure column
  double w = 1.0;      // weight on column i
  double y1 = 0.0;     // dual of the plus-mass row (slope dv/dp, <= 0)
  double y2 = 0.0;     // dual of the convexity row
};

MasterSolution solve_master(const std::vector<Column>& cols, double p) {
  MasterSolution best;
  for (size_t i = 0; i < cols.size(); ++i) {
    if (cols[i].prob >= p - 1e-12 && cols[i].value > best.value) {
      best.value = cols[i].value;
      best.i = static_cast<int>(i);
      best.j = -1;
      best.w = 1.0;
      best.y1 = 0.0;
      best.y2 = cols[i].value;
    }
  }
  for (size_t i = 0; i < cols.size(); ++i) {
    for (size_t j = 0; j < cols.size(); ++j) {
      const double qi = cols[i].prob, qj = cols[j].prob;
      if (!(qi > p && p > qj) || qi - qj <= 1e-14) continue;
      const double w = (p - qj) / (qi - qj);
      const double v = w * cols[i].value + (1.0 - w) * cols[j].value;
      if (v > best.value) {
        best.value = v;
        best.i = static_cast<int>(i);
        best.j = static_cast<int>(j);
        best.w = w;
        best.y1 = (cols[i].value - cols[j].value) / (qi - qj);
        best.y2 = cols[i].value - best.y1 * qi;
      }
    }
  }
  return best;
}

class ColumnGenSolver {
 public:
  ColumnGenSolver(const ProviderModel& pm, int feature, int T)
      : pm_(pm), feature_(feature), T_(T) {
    add_priced(0.0);  // unconstrained optimum
    // Max-probability policy: bonus large enough to dominate any reward gap.
    double span = 1.0;
    for (int h = 0; h < pm.mdp.horizon; ++h)
      for (int s = 0; s < pm.mdp.num_states(h); ++s)
        for (const auto& a : pm.mdp.actions[h][s]) span += std::abs(a.reward);
    reach_bonus_ = 4.0 * span * (pm.mdp.horizon + 1);
    add_priced(reach_bonus_);
    qmax_ = 0.0;
    for (const Column& c : cols_) qmax_ = std::max(qmax_, c.prob);
  }

  double qmax() const { return qmax_; }
  int64_t solves() const { return solves_; }

  // Exact LP optimum at plus-mass >= p; p must be <= qmax().
  MasterSolution solve(double p) {
    ++solves_;
    for (int iter = 0; iter < 10000; ++iter) {
      MasterSolution ms = solve_master(cols_, p);
      if (ms.i == -1) throw std::runtime_error("column generation master infeasible");
      const double bonus = -ms.y1;  // >= 0
      const int before = static_cast<int>(cols_.size());
      const double scale = std::max(1.0, std::abs(ms.value));
      const Column& cand = add_priced(bonus);
      const double reduced = cand.value + bonus * cand.prob - ms.y2;
      if (reduced <= 1e-10 * scale || static_cast<int>(cols_.size()) == before) return ms;
    }
    throw std::runtime_error("column generation failed to converge");
  }

  const std::vector<Column>& columns() const { return cols_; }

 private:
  // Prices one column at the given bonus; dedups on (value, prob).
  const Column& add_priced(double bonus) {
    Column c;
    c.det = best_policy_with_bonus(pm_, feature_, T_, bonus);
    const auto [v, q] = evaluate_det(pm_, feature_, T_, c.det);
    c.value = v;
    c.prob = q;
    for (const Column& old : cols_) {
      if (std::abs(old.value - c.value) <= 1e-13 * std::max(1.0, std::abs(old.value)) &&
          std::abs(old.prob - c.prob) <= 1e-13)
        return old;
    }
    qmax_ = std::max(qmax_, c.prob);
    cols_.push_back(std::move(c));
    return cols_.back();
  }

  const ProviderModel& pm_;
  int feature_;
  int T_;
  double reach_bonus_ = 0.0;
  double qmax_ = 0.0;
  int64_t solves_ = 0;
  std::vector<Column> cols_;
};

// ---------------------------------------------------------------------------
// Dense tableau path: the full occupancy LP.

struct OccupancyLp {
  LpProblem lp;
  std::vector<int> var_offset;   // per stage h < H: first column of (h, s=0, k=0)
  std::vector<int> row_offset;   // per stage: first flow row
  int term_offset = 0;           // first terminate column
  int xi = 0;                    // slack column
  int commit_row = 0;
};

OccupancyLp build_occupancy_lp(const ProviderModel& pm, int feature, int T, double p) {
  const FiniteHorizonMdp& m = pm.mdp;
  const auto& plus = pm.plus_of(feature);
  const int H = m.horizon;
  OccupancyLp o;

  o.var_offset.resize(H);
  int nvars = 0;
  for (int h = 0; h < H; ++h) {
    o.var_offset[h] = nvars;
    for (int s = 0; s < m.num_states(h); ++s) nvars += m.num_actions(h, s);
  }
  o.term_offset = nvars;
  nvars += m.num_states(H);
  o.xi = nvars++;

  o.row_offset.resize(H + 1);
  int nrows = 0;
  for (int h = 0; h <= H; ++h) {
    o.row_offset[h] = nrows;
    nrows += m.num_states(h);
  }
  o.commit_row = nrows++;

  LpProblem& lp = o.lp;
  lp.m = nrows;
  lp.n = nvars;
  lp.a.assign(static_cast<size_t>(nrows) * nvars, 0.0);
  lp.b.assign(nrows, 0.0);
  lp.c.assign(nvars, 0.0);
  lp.b[o.row_offset[0] + m.initial_state] = 1.0;
  lp.b[o.commit_row] = p;

  int col = 0;
  for (int h = 0; h < H; ++h) {
    for (int s = 0; s < m.num_states(h); ++s) {
      for (const auto& a : m.actions[h][s]) {
        lp.at(o.row_offset[h] + s, col) += 1.0;
        for (const auto& [t, pr] : a.next) lp.at(o.row_offset[h + 1] + t, col) -= pr;
        if (h == T && plus[h][s]) lp.at(o.commit_row, col) += 1.0;
        lp.c[col] = a.reward;
        ++col;
      }
    }
  }
  for (int s = 0; s < m.num_states(H); ++s) {
    lp.at(o.row_offset[H] + s, o.term_offset + s) += 1.0;
    if (T == H && plus[H][s]) lp.at(o.commit_row, o.term_offset + s) += 1.0;
  }
  lp.at(o.commit_row, o.xi) = -1.0;
  return o;
}

std::vector<int> warm_basis_from(const OccupancyLp& o, const FiniteHorizonMdp& m,
                                 const DetPolicy& det) {
  std::vector<int> basis(o.lp.m, 0);
  for (int h = 0; h < m.horizon; ++h) {
    int col = o.var_offset[h];
    for (int s = 0; s < m.num_states(h); ++s) {
      basis[o.row_offset[h] + s] = col + det[h][s];
      col += m.num_actions(h, s);
    }
  }
  for (int s = 0; s < m.num_states(m.horizon); ++s)
    basis[o.row_offset[m.horizon] + s] = o.term_offset + s;
  basis[o.commit_row] = o.xi;
  return basis;
}

CommitmentSolveResult result_from_occupancy(const ProviderModel& pm, int feature, int T,
                                            OccupancyMeasure x, double value) {
  const auto& plus = pm.plus_of(feature);
  CommitmentSolveResult out;
  out.value = value;
  double achieved = 0.0;
  for (int s = 0; s < pm.mdp.num_states(T); ++s) {
    if (!plus[T][s]) continue;
    for (const double v : x[T][s]) achieved += v;
  }
  out.achieved_probability = achieved;
  out.policy = policy_from_occupancy(pm.mdp, x);
  out.occupancy = std::move(x);
  return out;
}

OccupancyMeasure occupancy_of_det(const ProviderModel& pm, const DetPolicy& det) {
  return occupancy(pm.mdp, det_to_policy(pm.mdp, det));
}

}  // namespace

// ---------------------------------------------------------------------------
// ProviderModel

void ProviderModel::validate() const {
  mdp.validate();
  require(!plus.empty(), "provider model needs at least one feature");
  for (const auto& [feature, mask] : plus) {
    require(static_cast<int>(mask.size()) == mdp.horizon + 1,
            "plus mask must cover every stage (feature " + std::to_string(feature) + ")");
    for (int h = 0; h <= mdp.horizon; ++h)
      require(static_cast<int>(mask[h].size()) == mdp.num_states(h), "plus mask shape mismatch");
    for (int h = 0; h < mdp.horizon; ++h) {
      for (int s = 0; s < mdp.num_states(h); ++s) {
        if (!mask[h][s]) continue;
        for (const auto& a : mdp.actions[h][s])
          for (const auto& [t, pr] : a.next)
            require(pr == 0.0 || mask[h + 1][t],
                    "feature " + std::to_string(feature) + " is not permanent");
      }
    }
  }
  if (!base_state.empty()) {
    require(static_cast<int>(base_state.size()) == mdp.horizon + 1, "base_state shape mismatch");
    for (int h = 0; h <= mdp.horizon; ++h)
      require(static_cast<int>(base_state[h].size()) == mdp.num_states(h),
              "base_state shape mismatch");
  }
}

std::vector<int> ProviderModel::feature_ids() const {
  std::vector<int> ids;
  ids.reserve(plus.size());
  for (const auto& [feature, mask] : plus) ids.push_back(feature);
  return ids;
}

int ProviderModel::sole_feature() const {
  require(plus.size() == 1, "model has multiple features; specify one");
  return plus.begin()->first;
}

const std::vector<std::vector<char>>& ProviderModel::plus_of(int feature) const {
  const auto it = plus.find(feature == -1 ? sole_feature() : feature);
  require(it != plus.end(), "unknown feature id " + std::to_string(feature));
  return it->second;
}

std::string ProviderModel::to_json() const {
  json j = json::parse(mdp.to_json());
  json ps = json::object();
  for (const auto& [feature, mask] : plus) {
    std::vector<int> ids;
    for (int h = 0; h <= mdp.horizon; ++h)
      for (int s = 0; s < mdp.num_states(h); ++s)
        if (mask[h][s]) ids.push_back(mdp.stage_ids[h][s]);
    std::sort(ids.begin(), ids.end());
    ps[std::to_string(feature)] = ids;
  }
  j["plus_states"] = std::move(ps);
  if (!base_state.empty()) {
    json bs = json::object();
    for (int h = 0; h <= mdp.horizon; ++h)
      for (int s = 0; s < mdp.num_states(h); ++s)
        bs[std::to_string(mdp.stage_ids[h][s])] = base_state[h][s];
    j["base_states"] = std::move(bs);
  }
  return j.dump();
}

ProviderModel ProviderModel::from_json(const std::string& text) {
  ProviderModel pm;
  pm.mdp = FiniteHorizonMdp::from_json(text);
  const auto index = pm.mdp.id_index();
  json j;
  try {
    j = json::parse(text);
    for (const auto& [key, ids] : j.at("plus_states").items()) {
      std::vector<std::vector<char>> mask(pm.mdp.horizon + 1);
      for (int h = 0; h <= pm.mdp.horizon; ++h) mask[h].assign(pm.mdp.num_states(h), 0);
      for (const auto& id : ids) {
        const auto it = index.find(id.get<int>());
        require(it != index.end(), "plus state id unknown");
        mask[it->second.first][it->second.second] = 1;
      }
      pm.plus[std::stoi(key)] = std::move(mask);
    }
    if (j.contains("base_states")) {
      pm.base_state.resize(pm.mdp.horizon + 1);
      for (int h = 0; h <= pm.mdp.horizon; ++h) pm.base_state[h].assign(pm.mdp.num_states(h), -1);
      for (const auto& [key, base] : j.at("base_states").items()) {
        const auto it = index.find(std::stoi(key));
        require(it != index.end(), "base state id unknown");
        pm.base_state[it->second.first][it->second.second] = base.get<int>();
      }
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad provider json: ") + e.what());
  }
  pm.validate();
  return pm;
}

// ---------------------------------------------------------------------------
// Operations

double max_feasible_probability(const ProviderModel& pm, int T, int feature) {
  const FiniteHorizonMdp& m = pm.mdp;
  require(T >= 1 && T <= m.horizon, "commitment stage must be in 1..horizon");
  const auto& plus = pm.plus_of(feature);
  std::vector<double> v(m.num_states(T));
  for (int s = 0; s < m.num_states(T); ++s) v[s] = plus[T][s] ? 1.0 : 0.0;
  for (int h = T - 1; h >= 0; --h) {
    std::vector<double> prev(m.num_states(h), 0.0);
    for (int s = 0; s < m.num_states(h); ++s) {
      double best = 0.0;
      for (const auto& a : m.actions[h][s]) {
        double q = 0.0;
        for (const auto& [t, pr] : a.next) q += pr * v[t];
        best = std::max(best, q);
      }
      prev[s] = best;
    }
    v = std::move(prev);
  }
  return std::clamp(v[m.initial_state], 0.0, 1.0);
}

double verify_commitment_policy(const ProviderModel& pm, const Policy& pi, const Commitment& c) {
  check_commitment(pm, c, c.u_c);
  const OccupancyMeasure x = occupancy(pm.mdp, pi);
  const auto& plus = pm.plus_of(c.u_c);
  double mass = 0.0;
  for (int s = 0; s < pm.mdp.num_states(c.T); ++s) {
    if (!plus[c.T][s]) continue;
    for (const double v : x[c.T][s]) mass += v;
  }
  return mass;
}

// ---------------------------------------------------------------------------
// Oracle

struct ProviderCommitmentOracle::Impl {
  const ProviderModel& pm;
  int feature;
  int T;
  bool use_tableau;
  double pbar;

  // column generation state
  std::unique_ptr<ColumnGenSolver> cg;

  // tableau state
  std::unique_ptr<OccupancyLp> occ;
  std::vector<int> warm;
  int64_t tableau_solves = 0;

  Impl(const ProviderModel& model, int feat, int stage, LpMethod method)
      : pm(model), feature(feat == -1 ? model.sole_feature() : feat), T(stage) {
    require(T >= 1 && T <= pm.mdp.horizon, "commitment stage must be in 1..horizon");
    pm.plus_of(feature);
    pbar = max_feasible_probability(pm, T, feature);
    use_tableau = method == LpMethod::kDenseTableau ||
                  (method == LpMethod::kAuto &&
                   pm.mdp.num_occupancy_variables() + 1 <= kAutoTableauMaxVars);
    if (use_tableau) {
      occ = std::make_unique<OccupancyLp>(build_occupancy_lp(pm, feature, T, 0.0));
      warm = warm_basis_from(*occ, pm.mdp, best_policy_with_bonus(pm, feature, T, reach_bonus()));
    } else {
      cg = std::make_unique<ColumnGenSolver>(pm, feature, T);
    }
  }

  double reach_bonus() const {
    double span = 1.0;
    for (int h = 0; h < pm.mdp.horizon; ++h)
      for (int s = 0; s < pm.mdp.num_states(h); ++s)
        for (const auto& a : pm.mdp.actions[h][s]) span += std::abs(a.reward);
    return 4.0 * span * (pm.mdp.horizon + 1);
  }

  double clamp_p(double p) const {
    if (p > pbar + kFeasSlack)
      throw InfeasibleCommitmentError(
          "commitment probability " + std::to_string(p) + " exceeds maximum feasible " +
              std::to_string(pbar) + " at stage " + std::to_string(T),
          pbar);
    const double cap = cg ? cg->qmax() : pbar;
    return std::clamp(p, 0.0, cap);
  }

  LpResult run_tableau(double p) {
    ++tableau_solves;
    occ->lp.b[occ->commit_row] = p;
    LpResult res = simplex_solve(occ->lp, &warm);
    if (res.status != LpStatus::kOptimal)
      throw std::runtime_error("occupancy LP did not reach optimality");
    return res;
  }

  double value(double p) {
    const double pe = clamp_p(p);
    if (use_tableau) return run_tableau(pe).objective;
    return cg->solve(pe).value;
  }

  CommitmentSolveResult solve(double p) {
    const double pe = clamp_p(p);
    if (use_tableau) {
      LpResult res = run_tableau(pe);
      const FiniteHorizonMdp& m = pm.mdp;
      OccupancyMeasure x(m.horizon + 1);
      int col = 0;
      for (int h = 0; h < m.horizon; ++h) {
        x[h].resize(m.num_states(h));
        for (int s = 0; s < m.num_states(h); ++s) {
          x[h][s].resize(m.num_actions(h, s));
          for (int k = 0; k < m.num_actions(h, s); ++k) x[h][s][k] = std::max(res.x[col++], 0.0);
        }
      }
      x[m.horizon].resize(m.num_states(m.horizon));
      for (int s = 0; s < m.num_states(m.horizon); ++s)
        x[m.horizon][s].assign(1, std::max(res.x[occ->term_offset + s], 0.0));
      return result_from_occupancy(pm, feature, T, std::move(x), res.objective);
    }
    const MasterSolution ms = cg->solve(pe);
    const auto& cols = cg->columns();
    OccupancyMeasure x = occupancy_of_det(pm, cols[ms.i].det);
    if (ms.j >= 0) {
      const OccupancyMeasure xj = occupancy_of_det(pm, cols[ms.j].det);
      for (size_t h = 0; h < x.size(); ++h)
        for (size_t s = 0; s < x[h].size(); ++s)
          for (size_t k = 0; k < x[h][s].size(); ++k)
            x[h][s][k] = ms.w * x[h][s][k] + (1.0 - ms.w) * xj[h][s][k];
    }
    return result_from_occupancy(pm, feature, T, std::move(x), ms.value);
  }

  int64_t solve_count() const { return cg ? cg->solves() : tableau_solves; }
};

ProviderCommitmentOracle::ProviderCommitmentOracle(const ProviderModel& pm, int T, int feature,
                                                   LpMethod method)
    : impl_(std::make_unique<Impl>(pm, feature, T, method)) {}
ProviderCommitmentOracle::~ProviderCommitmentOracle() = default;
ProviderCommitmentOracle::ProviderCommitmentOracle(ProviderCommitmentOracle&&) noexcept = default;

double ProviderCommitmentOracle::max_probability() const { return impl_->pbar; }
double ProviderCommitmentOracle::value(double p) { return impl_->value(p); }
CommitmentSolveResult ProviderCommitmentOracle::solve(double p) { return impl_->solve(p); }
int64_t ProviderCommitmentOracle::solve_count() const { return impl_->solve_count(); }

CommitmentSolveResult commitment_value(const ProviderModel& pm, const Commitment& c,
                                       LpMethod method) {
  check_commitment(pm, c, c.u_c);
  ProviderCommitmentOracle oracle(pm, c.T, c.u_c, method);
  return oracle.solve(c.p);
}

}  // namespace commitkit
