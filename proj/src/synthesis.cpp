#include "riskctl/synthesis.hpp"

#include <algorithm>
#include <cmath>

#include "graph.hpp"
#include "state_formula.hpp"

namespace riskctl {

namespace {

using Mask = std::vector<std::vector<char>>;  // allowed choices per state, empty = all

std::string describe(const Mdp& m, std::size_t s) {
  std::string out = "state " + std::to_string(s);
  if (!m.vars.empty()) out += " " + format_valuation(m.vars, m.states[s]);
  return out;
}

const RewardStructure& reward_of(const Mdp& m, const std::string& name) {
  if (!name.empty()) return m.reward(name);
  if (m.reward_names.empty()) throw AnalysisError("the model has no reward structures");
  return m.reward(m.reward_names.front());
}

const std::string& reward_name(const Mdp& m, const std::string& name) {
  if (!name.empty() || m.reward_names.empty()) return name;
  return m.reward_names.front();
}

bool allowed(const Mask* mask, std::size_t s, std::size_t c) { return !mask || (*mask)[s][c]; }

double q_value(const Mdp& m, const RewardStructure& r, std::size_t s, std::size_t c, const std::vector<double>& x) {
  double v = r.total(s, c);
  for (const auto& t : m.choices[s][c].dist) v += t.prob * x[t.target];
  return v;
}

bool better(double a, double b, Objective obj) { return obj == Objective::Max ? a > b : a < b; }

std::vector<double> iterate(const Mdp& m, const RewardStructure& r, Objective obj, const std::vector<bool>& absorbing,
                            const Mask* mask, const SolveOptions& o) {
  const std::size_t n = m.num_states();
  std::vector<double> x(n, 0.0), y(n, 0.0);
  for (std::size_t it = 0; it < o.max_iterations; ++it) {
    double delta = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      if (absorbing[s]) {
        y[s] = 0.0;
        continue;
      }
      bool first = true;
      double best = 0.0;
      for (std::size_t c = 0; c < m.choices[s].size(); ++c) {
        if (!allowed(mask, s, c)) continue;
        double v = q_value(m, r, s, c, x);
        if (first || better(v, best, obj)) best = v;
        first = false;
      }
      y[s] = best;
      delta = std::max(delta, std::fabs(best - x[s]));
    }
    std::swap(x, y);
    if (delta < o.epsilon) return x;
  }
  throw AnalysisError("value iteration did not converge within " + std::to_string(o.max_iterations) + " iterations");
}

// Choices whose Q-value is within tolerance of the best one, per state.
Mask optimal_choices(const Mdp& m, const RewardStructure& r, const std::vector<double>& x, Objective obj,
                     const std::vector<bool>& absorbing, const Mask* mask, double tol) {
  Mask out(m.num_states());
  for (std::size_t s = 0; s < m.num_states(); ++s) {
    out[s].assign(m.choices[s].size(), 0);
    if (absorbing[s]) continue;
    std::vector<double> q(m.choices[s].size(), 0.0);
    bool first = true;
    double best = 0.0;
    for (std::size_t c = 0; c < q.size(); ++c) {
      if (!allowed(mask, s, c)) continue;
      q[c] = q_value(m, r, s, c, x);
      if (first || better(q[c], best, obj)) best = q[c];
      first = false;
    }
    double slack = tol * std::max(1.0, std::fabs(best));
    for (std::size_t c = 0; c < q.size(); ++c)
      if (allowed(mask, s, c) && std::fabs(q[c] - best) <= slack) out[s][c] = 1;
  }
  return out;
}

// Among optimal choices, picks per state the lowest-index one that moves one
// layer closer to the absorbing set; states that cannot reach it through
// optimal choices keep their lowest-index optimal choice.
std::vector<std::optional<std::size_t>> attract(const Mdp& m, const Mask& opt, const std::vector<bool>& absorbing) {
  const std::size_t n = m.num_states();
  std::vector<std::optional<std::size_t>> choice(n);
  std::vector<bool> done(absorbing);
  std::vector<std::vector<std::size_t>> pred(n);
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t c = 0; c < m.choices[s].size(); ++c)
      if (opt[s][c])
        for (const auto& t : m.choices[s][c].dist) pred[t.target].push_back(s);
  std::vector<std::size_t> layer;
  for (std::size_t s = 0; s < n; ++s)
    if (done[s]) layer.push_back(s);
  while (!layer.empty()) {
    std::vector<std::size_t> cand;
    for (auto t : layer)
      for (auto s : pred[t])
        if (!done[s]) cand.push_back(s);
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    for (auto s : cand) {
      for (std::size_t c = 0; c < m.choices[s].size() && !choice[s]; ++c) {
        if (!opt[s][c]) continue;
        for (const auto& t : m.choices[s][c].dist)
          if (done[t.target]) {
            choice[s] = c;
            break;
          }
      }
    }
    for (auto s : cand) done[s] = true;
    layer = std::move(cand);
  }
  for (std::size_t s = 0; s < n; ++s) {
    if (absorbing[s] || choice[s]) continue;
    for (std::size_t c = 0; c < m.choices[s].size(); ++c)
      if (opt[s][c]) {
        choice[s] = c;
        break;
      }
  }
  return choice;
}

RewardStructure combine(const Mdp& m, const RewardStructure& a, double wa, const RewardStructure& b, double wb) {
  RewardStructure r;
  r.state.resize(m.num_states());
  r.choice.resize(m.num_states());
  for (std::size_t s = 0; s < m.num_states(); ++s) {
    r.state[s] = wa * a.state[s] + wb * b.state[s];
    r.choice[s].resize(m.choices[s].size());
    for (std::size_t c = 0; c < m.choices[s].size(); ++c) r.choice[s][c] = wa * a.choice[s][c] + wb * b.choice[s][c];
  }
  return r;
}

double sign(Objective o) { return o == Objective::Max ? 1.0 : -1.0; }

// Worst case for a bound query: "<= b" holds for all policies iff it holds for the maximum.
Objective direction_of(Cmp c) { return (c == Cmp::Lt || c == Cmp::Le) ? Objective::Max : Objective::Min; }

// Direction that helps a witness satisfy the bound.
Objective witness_direction(Cmp c) { return (c == Cmp::Lt || c == Cmp::Le) ? Objective::Min : Objective::Max; }

bool holds(double v, Cmp c, double bound) {
  switch (c) {
    case Cmp::Lt: return v < bound;
    case Cmp::Le: return v <= bound;
    case Cmp::Gt: return v > bound;
    case Cmp::Ge: return v >= bound;
    default: return false;
  }
}

}  // namespace

std::vector<bool> absorbing_states(const Mdp& mdp, const std::string& terminal_label) {
  std::vector<bool> out(mdp.num_states());
  for (std::size_t s = 0; s < mdp.num_states(); ++s) out[s] = mdp.choices[s].empty();
  if (terminal_label.empty()) return out;
  auto l = mdp.label_index(terminal_label);
  if (!l) throw ModelError("unknown terminal label \"" + terminal_label + "\"");
  for (std::size_t s = 0; s < mdp.num_states(); ++s)
    if (mdp.labels[*l][s]) out[s] = true;
  return out;
}

void check_end_components(const Mdp& mdp, const RewardStructure& reward, const std::vector<bool>& absorbing) {
  const std::size_t n = mdp.num_states();
  Mask keep(n);
  for (std::size_t s = 0; s < n; ++s) keep[s].assign(mdp.choices[s].size(), absorbing[s] ? 0 : 1);
  for (bool changed = true; changed;) {
    changed = false;
    std::vector<std::vector<std::size_t>> adj(n);
    for (std::size_t s = 0; s < n; ++s)
      for (std::size_t c = 0; c < keep[s].size(); ++c)
        if (keep[s][c])
          for (const auto& t : mdp.choices[s][c].dist) adj[s].push_back(t.target);
    auto comp = detail::strongly_connected(adj);
    for (std::size_t s = 0; s < n; ++s)
      for (std::size_t c = 0; c < keep[s].size(); ++c) {
        if (!keep[s][c]) continue;
        for (const auto& t : mdp.choices[s][c].dist)
          if (absorbing[t.target] || comp[t.target] != comp[s]) {
            keep[s][c] = 0;
            changed = true;
            break;
          }
      }
  }
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t c = 0; c < keep[s].size(); ++c)
      if (keep[s][c] && reward.total(s, c) != 0.0)
        throw AnalysisError("end component with non-zero reward contains " + describe(mdp, s) +
                            "; route its cycles through the terminal label");
}

std::vector<double> value_iterate(const Mdp& mdp, const RewardStructure& reward, Objective obj,
                                  const SolveOptions& options) {
  auto absorbing = absorbing_states(mdp, options.terminal_label);
  check_end_components(mdp, reward, absorbing);
  return iterate(mdp, reward, obj, absorbing, nullptr, options);
}

std::vector<double> value_iterate(const Mdp& mdp, const std::string& reward, Objective obj,
                                  const SolveOptions& options) {
  return value_iterate(mdp, reward_of(mdp, reward), obj, options);
}

Policy extract_policy(const Mdp& mdp, const RewardStructure& reward, const std::vector<double>& values, Objective obj,
                      const SolveOptions& options) {
  if (values.size() != mdp.num_states()) throw AnalysisError("value vector does not match the state space");
  auto absorbing = absorbing_states(mdp, options.terminal_label);
  auto opt = optimal_choices(mdp, reward, values, obj, absorbing, nullptr, options.tie_tolerance);
  return induce_policy(mdp, attract(mdp, opt, absorbing));
}

Policy extract_policy(const Mdp& mdp, const std::string& reward, const std::vector<double>& values, Objective obj,
                      const SolveOptions& options) {
  return extract_policy(mdp, reward_of(mdp, reward), values, obj, options);
}

Policy induce_policy(const Mdp& mdp, std::vector<std::optional<std::size_t>> choice) {
  const std::size_t n = mdp.num_states();
  if (choice.size() != n) throw AnalysisError("policy does not match the state space");
  Policy p;
  Dtmc& d = p.dtmc;
  d.vars = mdp.vars;
  d.states = mdp.states;
  d.label_names = mdp.label_names;
  d.labels = mdp.labels;
  d.initial = mdp.initial;
  d.rows.resize(n);
  for (std::size_t s = 0; s < n; ++s) {
    if (!choice[s]) {
      d.rows[s].push_back({s, 1.0, ""});
      continue;
    }
    if (*choice[s] >= mdp.choices[s].size())
      throw AnalysisError("policy picks a missing choice in " + describe(mdp, s));
    const Choice& ch = mdp.choices[s][*choice[s]];
    for (const auto& t : ch.dist) d.rows[s].push_back({t.target, t.prob, ch.action});
  }
  for (const auto& name : mdp.reward_names) {
    const auto& r = mdp.reward(name);
    std::vector<double> v(n, 0.0);
    for (std::size_t s = 0; s < n; ++s)
      if (choice[s]) v[s] = r.total(s, *choice[s]);
    d.rewards[name] = std::move(v);
  }
  p.choice = std::move(choice);
  return p;
}

std::vector<ParetoPoint> pareto_sweep(const Mdp& mdp, const Goal& g1, const Goal& g2, std::size_t k,
                                      const SolveOptions& options) {
  if (k < 2) throw AnalysisError("a Pareto sweep needs at least 2 points");
  std::vector<double> w(k);
  for (std::size_t i = 0; i < k; ++i) w[i] = static_cast<double>(i) / static_cast<double>(k - 1);
  return pareto_sweep(mdp, g1, g2, w, options);
}

std::vector<ParetoPoint> pareto_sweep(const Mdp& mdp, const Goal& g1, const Goal& g2,
                                      const std::vector<double>& weights, const SolveOptions& options) {
  const RewardStructure& r1 = reward_of(mdp, g1.reward);
  const RewardStructure& r2 = reward_of(mdp, g2.reward);
  const std::string& n1 = reward_name(mdp, g1.reward);
  const std::string& n2 = reward_name(mdp, g2.reward);
  auto absorbing = absorbing_states(mdp, options.terminal_label);
  check_end_components(mdp, r1, absorbing);
  check_end_components(mdp, r2, absorbing);
  const double s1 = sign(g1.dir), s2 = sign(g2.dir);

  // Optimise `first`, then `second` among the choices optimal for `first`.
  auto lexicographic = [&](const RewardStructure& first, Objective d1, const RewardStructure& second, Objective d2) {
    auto v1 = iterate(mdp, first, d1, absorbing, nullptr, options);
    auto opt1 = optimal_choices(mdp, first, v1, d1, absorbing, nullptr, options.tie_tolerance);
    auto v2 = iterate(mdp, second, d2, absorbing, &opt1, options);
    auto opt2 = optimal_choices(mdp, second, v2, d2, absorbing, &opt1, options.tie_tolerance);
    return induce_policy(mdp, attract(mdp, opt2, absorbing));
  };

  std::vector<ParetoPoint> points;
  for (double w : weights) {
    if (w < 0.0 || w > 1.0) throw AnalysisError("sweep weight " + format_double(w) + " outside [0,1]");
    Policy pol;
    if (w >= 1.0) {
      pol = lexicographic(r1, g1.dir, r2, g2.dir);
    } else if (w <= 0.0) {
      pol = lexicographic(r2, g2.dir, r1, g1.dir);
    } else {
      RewardStructure r = combine(mdp, r1, w * s1, r2, (1.0 - w) * s2);
      auto v = iterate(mdp, r, Objective::Max, absorbing, nullptr, options);
      auto opt = optimal_choices(mdp, r, v, Objective::Max, absorbing, nullptr, options.tie_tolerance);
      pol = induce_policy(mdp, attract(mdp, opt, absorbing));
    }
    ParetoPoint pt;
    pt.r1 = total_reward(pol.dtmc, pol.dtmc.rewards.at(n1))[mdp.initial];
    pt.r2 = total_reward(pol.dtmc, pol.dtmc.rewards.at(n2))[mdp.initial];
    pt.policy = std::move(pol);
    points.push_back(std::move(pt));
  }

  // Keep the non-dominated points (in the optimisation order), first of equals.
  auto close = [&](double a, double b) { return std::fabs(a - b) <= options.tie_tolerance * std::max(1.0, std::fabs(a)); };
  auto dominates = [&](const ParetoPoint& q, const ParetoPoint& p) {
    double q1 = s1 * q.r1, q2 = s2 * q.r2, p1 = s1 * p.r1, p2 = s2 * p.r2;
    bool ge1 = q1 >= p1 || close(q1, p1), ge2 = q2 >= p2 || close(q2, p2);
    return ge1 && ge2 && !(close(q1, p1) && close(q2, p2));
  };
  std::vector<ParetoPoint> out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    bool drop = false;
    for (std::size_t j = 0; j < points.size() && !drop; ++j) {
      if (i == j) continue;
      if (dominates(points[j], points[i])) drop = true;
      if (j < i && close(points[j].r1, points[i].r1) && close(points[j].r2, points[i].r2)) drop = true;
    }
    if (!drop) out.push_back(points[i]);
  }
  std::stable_sort(out.begin(), out.end(), [](const ParetoPoint& a, const ParetoPoint& b) {
    return a.r1 != b.r1 ? a.r1 < b.r1 : a.r2 < b.r2;
  });
  return out;
}

namespace {

// Finite-horizon optimum of the cumulative reward over `k` steps.
double horizon_value(const Mdp& m, const RewardStructure& r, Objective obj, std::size_t k,
                     const std::vector<bool>& absorbing) {
  std::vector<double> x(m.num_states(), 0.0), y(m.num_states(), 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t s = 0; s < m.num_states(); ++s) {
      if (absorbing[s]) {
        y[s] = 0.0;
        continue;
      }
      double best = q_value(m, r, s, 0, x);
      for (std::size_t c = 1; c < m.choices[s].size(); ++c) {
        double v = q_value(m, r, s, c, x);
        if (better(v, best, obj)) best = v;
      }
      y[s] = best;
    }
    std::swap(x, y);
  }
  return x[m.initial];
}

// Optimal probability, per state, of reaching psi through phi; `k` bounds the steps.
std::vector<double> reach_values(const Mdp& m, const std::vector<bool>& phi, const std::vector<bool>& psi, Objective obj,
                                 std::optional<std::size_t> k, const SolveOptions& o) {
  const std::size_t n = m.num_states();
  std::vector<double> x(n, 0.0), y(n, 0.0);
  for (std::size_t s = 0; s < n; ++s) x[s] = psi[s] ? 1.0 : 0.0;
  std::size_t limit = k ? *k : o.max_iterations;
  for (std::size_t it = 0; it < limit; ++it) {
    double delta = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      if (psi[s] || !phi[s] || m.choices[s].empty()) {
        y[s] = x[s];
        continue;
      }
      double best = 0.0;
      for (std::size_t c = 0; c < m.choices[s].size(); ++c) {
        double v = 0.0;
        for (const auto& t : m.choices[s][c].dist) v += t.prob * x[t.target];
        if (c == 0 || better(v, best, obj)) best = v;
      }
      y[s] = best;
      delta = std::max(delta, std::fabs(best - x[s]));
    }
    std::swap(x, y);
    if (!k && delta < o.epsilon) return x;
  }
  if (k) return x;
  throw AnalysisError("value iteration did not converge within " + std::to_string(o.max_iterations) + " iterations");
}

double reach_value(const Mdp& m, const std::vector<bool>& phi, const std::vector<bool>& psi, Objective obj,
                   std::optional<std::size_t> k, const SolveOptions& o) {
  return reach_values(m, phi, psi, obj, k, o)[m.initial];
}

// A policy attaining the optimal probability of eventually reaching psi.
// Maximising policies are steered towards psi so they do not idle in loops.
Policy reach_policy(const Mdp& m, const std::vector<bool>& psi, Objective obj, const SolveOptions& o) {
  std::vector<bool> all(m.num_states(), true);
  auto x = reach_values(m, all, psi, obj, std::nullopt, o);
  RewardStructure zero;
  zero.state.assign(m.num_states(), 0.0);
  for (const auto& cs : m.choices) zero.choice.emplace_back(cs.size(), 0.0);
  auto absorbing = absorbing_states(m, o.terminal_label);
  std::vector<bool> skip(m.num_states(), false);
  auto opt = optimal_choices(m, zero, x, obj, skip, nullptr, o.tie_tolerance);
  std::vector<bool> targets = absorbing;
  if (obj == Objective::Max)
    for (std::size_t s = 0; s < m.num_states(); ++s) targets[s] = targets[s] || psi[s];
  auto choice = attract(m, opt, targets);
  for (std::size_t s = 0; s < m.num_states(); ++s)
    if (!absorbing[s] && !choice[s] && !m.choices[s].empty()) choice[s] = 0;
  return induce_policy(m, choice);
}

QueryResult single(const Mdp& mdp, const Query& q, const Constants& constants, const SweepOptions& options) {
  detail::StateFormulas sf(mdp.vars, mdp.label_names, constants);
  if (q.cmp == Cmp::Query && !q.opt)
    throw AnalysisError("unsupported query form on an MDP: " + to_string(q) + " (use min=? or max=?)");
  Objective dir = q.opt ? *q.opt : direction_of(q.cmp);
  QueryResult res;
  if (q.kind == Query::Kind::Reward) {
    const RewardStructure& r = reward_of(mdp, q.reward);
    if (q.horizon) {
      auto absorbing = absorbing_states(mdp, options.solve.terminal_label);
      res.value = horizon_value(mdp, r, dir, sf.steps(*q.horizon), absorbing);
    } else {
      auto v = value_iterate(mdp, r, dir, options.solve);
      res.value = v[mdp.initial];
      res.witnesses.push_back(extract_policy(mdp, r, v, dir, options.solve));
    }
  } else {
    const auto& f = q.path;
    std::vector<bool> all(mdp.num_states(), true);
    std::optional<std::size_t> k;
    if (f.steps) k = sf.steps(*f.steps);
    if (f.kind == PathFormula::Kind::Eventually) {
      res.value = reach_value(mdp, all, sf.eval_set(*f.right, mdp.states, mdp.labels), dir, k, options.solve);
    } else if (f.kind == PathFormula::Kind::Until) {
      res.value = reach_value(mdp, sf.eval_set(*f.left, mdp.states, mdp.labels),
                              sf.eval_set(*f.right, mdp.states, mdp.labels), dir, k, options.solve);
    } else {
      throw AnalysisError("unsupported query form on an MDP: " + to_string(q) + " (only F and U)");
    }
  }
  if (q.cmp != Cmp::Query) {
    res.kind = QueryResult::Kind::Boolean;
    res.value = holds(res.value, q.cmp, sf.number(*q.threshold)) ? 1.0 : 0.0;
  }
  return res;
}

QueryResult multi(const Mdp& mdp, const Query& q, const Constants& constants, const SweepOptions& options) {
  std::vector<const Query*> objectives, constraints;
  for (const auto& a : q.args) {
    if (a.kind == Query::Kind::Multi || a.kind == Query::Kind::Filter)
      throw AnalysisError("unsupported query form: nested " + to_string(a) + " inside multi(...)");
    (a.cmp == Cmp::Query ? objectives : constraints).push_back(&a);
  }
  auto goal = [&](const Query& a) {
    if (a.kind != Query::Kind::Reward || a.horizon)
      throw AnalysisError("unsupported query form: " + to_string(a) + " as a multi(...) objective (use R{..}max=? [ C ])");
    if (a.cmp == Cmp::Query && !a.opt) throw AnalysisError("multi(...) objective " + to_string(a) + " needs min or max");
    return Goal{reward_name(mdp, a.reward), a.opt ? *a.opt : witness_direction(a.cmp)};
  };
  if (objectives.size() > 2 || (objectives.size() == 2 && !constraints.empty()))
    throw AnalysisError("unsupported query form: multi(...) with more than two objectives");

  if (objectives.size() == 2) {
    QueryResult res;
    res.kind = QueryResult::Kind::Pareto;
    res.points = pareto_sweep(mdp, goal(*objectives[0]), goal(*objectives[1]), options.points, options.solve);
    for (const auto& p : res.points) res.witnesses.push_back(p.policy);
    return res;
  }

  // Constrained selection: sweep every reward constraint against the
  // objective (or the constraints against each other) and keep feasible witnesses.
  // An unbounded reachability constraint on absorbing targets becomes a reward
  // (the probability mass entering the targets), which makes it sweepable too.
  Mdp work = mdp;
  detail::StateFormulas sf(mdp.vars, mdp.label_names, constants);
  const auto absorbing = absorbing_states(mdp, options.solve.terminal_label);
  std::vector<Goal> sweep_goals;
  std::vector<Policy> candidates;
  for (const Query* c : constraints) {
    if (c->kind == Query::Kind::Reward) {
      sweep_goals.push_back(Goal{reward_name(mdp, c->reward), witness_direction(c->cmp)});
      continue;
    }
    if (c->path.kind != PathFormula::Kind::Eventually || c->path.steps) continue;
    auto psi = sf.eval_set(*c->path.right, mdp.states, mdp.labels);
    candidates.push_back(reach_policy(mdp, psi, witness_direction(c->cmp), options.solve));
    bool exact = true;
    for (std::size_t s = 0; s < mdp.num_states(); ++s) exact = exact && (!psi[s] || absorbing[s]);
    if (!exact) continue;
    std::string name = "#reach" + std::to_string(sweep_goals.size());
    RewardStructure r;
    r.state.assign(mdp.num_states(), 0.0);
    for (std::size_t s = 0; s < mdp.num_states(); ++s) {
      auto& row = r.choice.emplace_back(mdp.choices[s].size(), 0.0);
      if (psi[s]) continue;
      for (std::size_t k = 0; k < row.size(); ++k)
        for (const auto& t : mdp.choices[s][k].dist)
          if (psi[t.target]) row[k] += t.prob;
    }
    work.rewards[name] = std::move(r);
    work.reward_names.push_back(name);
    sweep_goals.push_back(Goal{name, witness_direction(c->cmp)});
  }
  auto add_sweep = [&](const Goal& a, const Goal& b) {
    for (auto& p : pareto_sweep(work, a, b, options.points, options.solve)) candidates.push_back(std::move(p.policy));
  };
  auto add_single = [&](const Goal& g) {
    const auto& r = reward_of(work, g.reward);
    auto v = value_iterate(work, r, g.dir, options.solve);
    candidates.push_back(extract_policy(work, r, v, g.dir, options.solve));
  };
  std::optional<Goal> objective;
  if (!objectives.empty()) objective = goal(*objectives[0]);
  if (objective) {
    if (sweep_goals.empty()) add_single(*objective);
    for (const auto& g : sweep_goals) add_sweep(*objective, g);
  } else {
    if (sweep_goals.empty() && candidates.empty())
      throw AnalysisError("unsupported query form: multi(...) without a reward objective or reward constraint");
    if (sweep_goals.size() == 1) add_single(sweep_goals[0]);
    for (std::size_t i = 0; i < sweep_goals.size(); ++i)
      for (std::size_t j = i + 1; j < sweep_goals.size(); ++j) add_sweep(sweep_goals[i], sweep_goals[j]);
  }

  QueryResult res;
  res.kind = objective ? QueryResult::Kind::Number : QueryResult::Kind::Boolean;
  std::optional<std::size_t> best;
  double best_value = 0.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const Dtmc& d = candidates[i].dtmc;
    bool ok = std::all_of(constraints.begin(), constraints.end(),
                          [&](const Query* c) { return check_dtmc(d, *c, constants) == 1.0; });
    if (!ok) continue;
    if (!objective) {
      best = i;
      break;
    }
    double v = total_reward(d, d.rewards.at(objective->reward))[d.initial];
    if (!best || better(v, best_value, objective->dir)) {
      best = i;
      best_value = v;
    }
  }
  if (!best) {
    res.kind = QueryResult::Kind::Boolean;
    res.value = 0.0;
    return res;
  }
  res.value = objective ? best_value : 1.0;
  res.witnesses.push_back(std::move(candidates[*best]));
  return res;
}

}  // namespace

QueryResult solve_query(const Mdp& mdp, const Query& q, const Constants& constants, const SweepOptions& options) {
  switch (q.kind) {
    case Query::Kind::Prob:
    case Query::Kind::Reward: return single(mdp, q, constants, options);
    case Query::Kind::Multi: return multi(mdp, q, constants, options);
    case Query::Kind::Filter: break;
  }
  throw AnalysisError("unsupported query form on an MDP: filter(...) (check it on a policy instead)");
}

}  // namespace riskctl
