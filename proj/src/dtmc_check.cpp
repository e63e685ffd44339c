#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>

#include "gcl_syntax.hpp"
#include "graph.hpp"
#include "riskctl/synthesis.hpp"
#include "state_formula.hpp"

namespace riskctl {

namespace detail {

namespace {

gcl::ExprPtr int_literal(int v) {
  auto lit = gcl::detail::make(gcl::Op::IntLit, {}, {}, std::to_string(v < 0 ? -v : v));
  return v < 0 ? gcl::detail::make(gcl::Op::Neg, {}, {lit}) : lit;
}

}  // namespace

StateFormulas::StateFormulas(const std::vector<VarInfo>& vars, const std::vector<std::string>& label_names,
                             const Constants& constants)
    : label_names_(label_names) {
  gcl::GclProgram prog;
  for (const auto& [name, v] : constants) {
    gcl::ConstDecl c;
    c.name = name;
    c.type = v.type;
    prog.constants.push_back(std::move(c));
  }
  for (const auto& v : vars) {
    gcl::VarDecl d;
    d.name = v.name;
    d.is_bool = v.is_bool;
    d.low = int_literal(v.low);
    d.high = int_literal(v.high);
    prog.globals.push_back(std::move(d));
  }
  program_ = std::make_unique<gcl::CompiledProgram>(prog, constants);
}

std::vector<bool> StateFormulas::eval_set(const gcl::Expr& e, const std::vector<std::vector<int>>& states,
                                          const std::vector<std::vector<bool>>& labels) const {
  gcl::Node n = program_->compile(e, &label_names_);
  if (n.type != gcl::ValueType::Bool) throw ModelError(e.pos.str() + ": state formula '" + gcl::to_string(e) + "' is not boolean");
  std::vector<bool> out(states.size());
  gcl::EvalContext ctx;
  ctx.labels = &labels;
  for (std::size_t s = 0; s < states.size(); ++s) {
    ctx.vars = states[s].data();
    ctx.state = s;
    out[s] = gcl::eval(n, ctx).as_bool();
  }
  return out;
}

gcl::Value StateFormulas::constant(const gcl::Expr& e) const {
  gcl::Node n = program_->compile(e, &label_names_);
  if (n.op != gcl::Op::IntLit && n.op != gcl::Op::DoubleLit && n.op != gcl::Op::BoolLit)
    throw ModelError(e.pos.str() + ": '" + gcl::to_string(e) + "' is not a constant expression");
  return n.constant;
}

double StateFormulas::number(const gcl::Expr& e) const {
  gcl::Value v = constant(e);
  if (v.type == gcl::ValueType::Bool) throw ModelError(e.pos.str() + ": expected a number, got a bool");
  return v.as_double();
}

std::size_t StateFormulas::steps(const gcl::Expr& e) const {
  gcl::Value v = constant(e);
  if (v.type != gcl::ValueType::Int || v.i < 0)
    throw ModelError(e.pos.str() + ": step bound must be a non-negative integer");
  return static_cast<std::size_t>(v.i);
}

}  // namespace detail

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

struct Graph {
  std::vector<std::vector<std::size_t>> succ, pred;
};

Graph graph_of(const Dtmc& d) {
  Graph g;
  g.succ.resize(d.num_states());
  g.pred.resize(d.num_states());
  for (std::size_t s = 0; s < d.num_states(); ++s)
    for (const auto& t : d.rows[s]) {
      if (t.prob <= 0.0) continue;
      g.succ[s].push_back(t.target);
      g.pred[t.target].push_back(s);
    }
  return g;
}

// Solves x(s) = c(s) + sum P(s,t) x(t) on `maybe`, with x fixed elsewhere.
void solve_linear(const Dtmc& d, const std::vector<bool>& maybe, const std::vector<double>& c, std::vector<double>& x) {
  const std::size_t n = d.num_states();
  std::vector<std::ptrdiff_t> col(n, -1);
  std::ptrdiff_t m = 0;
  for (std::size_t s = 0; s < n; ++s)
    if (maybe[s]) col[s] = m++;
  if (m == 0) return;
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd rhs(m);
  for (std::size_t s = 0; s < n; ++s) {
    if (!maybe[s]) continue;
    double b = c[s];
    double diag = 1.0;
    for (const auto& t : d.rows[s]) {
      if (t.prob <= 0.0) continue;
      if (t.target == s) {
        diag -= t.prob;
      } else if (maybe[t.target]) {
        trip.emplace_back(col[s], col[t.target], -t.prob);
      } else {
        b += t.prob * x[t.target];
      }
    }
    trip.emplace_back(col[s], col[s], diag);
    rhs(col[s]) = b;
  }
  Eigen::SparseMatrix<double> a(m, m);
  a.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) throw AnalysisError("linear system for the Dtmc is singular");
  Eigen::VectorXd sol = lu.solve(rhs);
  if (lu.info() != Eigen::Success) throw AnalysisError("linear solve failed");
  for (std::size_t s = 0; s < n; ++s)
    if (maybe[s]) x[s] = sol(col[s]);
}

std::vector<double> until(const Dtmc& d, const Graph& g, const std::vector<bool>& phi, const std::vector<bool>& psi) {
  const std::size_t n = d.num_states();
  std::vector<bool> phi_only(n);
  for (std::size_t s = 0; s < n; ++s) phi_only[s] = phi[s] && !psi[s];
  std::vector<bool> can = detail::backward_reach(g.pred, psi, phi_only);
  std::vector<bool> no(n);
  for (std::size_t s = 0; s < n; ++s) no[s] = !can[s];
  std::vector<bool> risky = detail::backward_reach(g.pred, no, phi_only);
  std::vector<double> x(n, 0.0);
  std::vector<bool> maybe(n, false);
  for (std::size_t s = 0; s < n; ++s) {
    if (!risky[s]) {
      x[s] = 1.0;
    } else if (!no[s]) {
      maybe[s] = true;
    }
  }
  solve_linear(d, maybe, std::vector<double>(n, 0.0), x);
  for (auto& v : x) v = std::clamp(v, 0.0, 1.0);
  return x;
}

std::vector<double> bounded_until(const Dtmc& d, const std::vector<bool>& phi, const std::vector<bool>& psi,
                                  std::size_t k) {
  const std::size_t n = d.num_states();
  std::vector<double> x(n, 0.0), y(n);
  for (std::size_t s = 0; s < n; ++s) x[s] = psi[s] ? 1.0 : 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t s = 0; s < n; ++s) {
      if (psi[s] || !phi[s]) {
        y[s] = x[s];
        continue;
      }
      double v = 0.0;
      for (const auto& t : d.rows[s]) v += t.prob * x[t.target];
      y[s] = v;
    }
    std::swap(x, y);
  }
  return x;
}

std::vector<bool> negate(std::vector<bool> v) {
  v.flip();
  return v;
}

std::vector<bool> conj(const std::vector<bool>& a, const std::vector<bool>& b) {
  std::vector<bool> out(a.size());
  for (std::size_t s = 0; s < a.size(); ++s) out[s] = a[s] && b[s];
  return out;
}

bool compare(double v, Cmp c, double bound) {
  switch (c) {
    case Cmp::Lt: return v < bound;
    case Cmp::Le: return v <= bound;
    case Cmp::Gt: return v > bound;
    case Cmp::Ge: return v >= bound;
    default: return false;
  }
}

const std::vector<double>& dtmc_reward(const Dtmc& d, const std::string& name) {
  if (name.empty()) {
    if (d.rewards.size() == 1) return d.rewards.begin()->second;
    throw AnalysisError(d.rewards.empty() ? "the Dtmc carries no reward structures"
                                          : "the Dtmc carries several reward structures; name one");
  }
  auto it = d.rewards.find(name);
  if (it == d.rewards.end()) throw AnalysisError("the Dtmc carries no reward structure \"" + name + "\"");
  return it->second;
}

std::vector<bool> reachable(const Dtmc& d) {
  std::vector<bool> seen(d.num_states(), false);
  if (d.num_states() == 0) return seen;
  std::vector<std::size_t> todo{d.initial};
  seen[d.initial] = true;
  while (!todo.empty()) {
    std::size_t s = todo.back();
    todo.pop_back();
    for (const auto& t : d.rows[s])
      if (t.prob > 0.0 && !seen[t.target]) {
        seen[t.target] = true;
        todo.push_back(t.target);
      }
  }
  return seen;
}

}  // namespace

std::vector<double> total_reward(const Dtmc& d, const std::vector<double>& reward) {
  const std::size_t n = d.num_states();
  Graph g = graph_of(d);
  std::size_t count = 0;
  auto comp = detail::strongly_connected(g.succ, &count);
  std::vector<bool> bottom(count, true), positive(count, false);
  for (std::size_t s = 0; s < n; ++s) {
    if (reward[s] != 0.0) positive[comp[s]] = true;
    for (auto t : g.succ[s])
      if (comp[t] != comp[s]) bottom[comp[s]] = false;
  }
  std::vector<bool> diverge(n), in_bottom(n);
  for (std::size_t s = 0; s < n; ++s) {
    in_bottom[s] = bottom[comp[s]];
    diverge[s] = bottom[comp[s]] && positive[comp[s]];
  }
  std::vector<bool> infinite = detail::backward_reach(g.pred, diverge, std::vector<bool>(n, true));
  std::vector<double> x(n, 0.0);
  std::vector<bool> maybe(n, false);
  for (std::size_t s = 0; s < n; ++s) {
    if (infinite[s]) {
      x[s] = inf;
    } else if (!in_bottom[s]) {
      maybe[s] = true;
    }
  }
  solve_linear(d, maybe, reward, x);
  return x;
}

Constants resolve_constants(const PropertyFile& props, const Constants& overrides) {
  Constants out;
  for (const auto& [name, v] : overrides) {
    bool found = std::any_of(props.constants.begin(), props.constants.end(),
                             [&](const gcl::ConstDecl& c) { return c.name == name; });
    if (!found) throw ModelError("no property constant named " + name + " to define");
  }
  for (const auto& c : props.constants) {
    gcl::Value v;
    if (auto it = overrides.find(c.name); it != overrides.end()) {
      v = it->second;
    } else if (c.value) {
      v = detail::StateFormulas({}, {}, out).constant(*c.value);
    } else {
      continue;
    }
    if (c.type == gcl::ValueType::Double && v.type == gcl::ValueType::Int) v = gcl::Value::of_double(v.as_double());
    if (v.type != c.type)
      throw ModelError(c.pos.str() + ": constant " + c.name + " of type " + gcl::type_name(c.type) + " given a " +
                       gcl::type_name(v.type) + " value");
    out[c.name] = v;
  }
  return out;
}

std::vector<double> dtmc_values(const Dtmc& d, const Query& q, const Constants& constants) {
  const std::size_t n = d.num_states();
  detail::StateFormulas sf(d.vars, d.label_names, constants);
  auto set = [&](const gcl::ExprPtr& e) { return sf.eval_set(*e, d.states, d.labels); };
  std::vector<double> x;
  if (q.kind == Query::Kind::Prob) {
    if (q.opt) throw AnalysisError("unsupported query form on a Dtmc: Pmin/Pmax (use P=?)");
    const auto& f = q.path;
    std::vector<bool> all(n, true);
    auto reach = [&](const std::vector<bool>& phi, const std::vector<bool>& psi) {
      return f.steps ? bounded_until(d, phi, psi, sf.steps(*f.steps)) : until(d, graph_of(d), phi, psi);
    };
    switch (f.kind) {
      case PathFormula::Kind::Next: {
        auto psi = set(f.right);
        x.assign(n, 0.0);
        for (std::size_t s = 0; s < n; ++s)
          for (const auto& t : d.rows[s])
            if (psi[t.target]) x[s] += t.prob;
        break;
      }
      case PathFormula::Kind::Eventually: x = reach(all, set(f.right)); break;
      case PathFormula::Kind::Globally:
        x = reach(all, negate(set(f.right)));
        for (auto& v : x) v = 1.0 - v;
        break;
      case PathFormula::Kind::Until: x = reach(set(f.left), set(f.right)); break;
      case PathFormula::Kind::WeakUntil: {
        auto phi = set(f.left), not_psi = negate(set(f.right));
        x = reach(not_psi, conj(negate(phi), not_psi));
        for (auto& v : x) v = 1.0 - v;
        break;
      }
    }
  } else if (q.kind == Query::Kind::Reward) {
    if (q.opt) throw AnalysisError("unsupported query form on a Dtmc: Rmin/Rmax (use R=?)");
    const auto& r = dtmc_reward(d, q.reward);
    if (q.horizon) {
      std::size_t k = sf.steps(*q.horizon);
      x.assign(n, 0.0);
      std::vector<double> y(n);
      for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t s = 0; s < n; ++s) {
          double v = r[s];
          for (const auto& t : d.rows[s]) v += t.prob * x[t.target];
          y[s] = v;
        }
        std::swap(x, y);
      }
    } else {
      x = total_reward(d, r);
    }
  } else {
    throw AnalysisError(std::string("unsupported query form on a Dtmc: ") +
                        (q.kind == Query::Kind::Multi ? "multi(...)" : "nested filter"));
  }
  if (q.cmp != Cmp::Query) {
    double bound = sf.number(*q.threshold);
    if (q.kind == Query::Kind::Prob && (bound < 0.0 || bound > 1.0))
      throw ModelError("probability bound " + format_double(bound) + " outside [0,1]");
    for (auto& v : x) v = compare(v, q.cmp, bound) ? 1.0 : 0.0;
  }
  return x;
}

double check_dtmc(const Dtmc& d, const Query& q, const Constants& constants) {
  if (d.num_states() == 0) throw AnalysisError("empty Dtmc");
  if (q.kind != Query::Kind::Filter) return dtmc_values(d, q, constants)[d.initial];
  if (q.filter_op != "avg" && q.filter_op != "min" && q.filter_op != "max")
    throw AnalysisError("unsupported filter operator " + q.filter_op + " (avg, min, max)");
  auto values = dtmc_values(d, q.args.at(0), constants);
  detail::StateFormulas sf(d.vars, d.label_names, constants);
  auto in = sf.eval_set(*q.states, d.states, d.labels);
  auto reach = reachable(d);
  double acc = q.filter_op == "avg" ? 0.0 : q.filter_op == "min" ? inf : -inf;
  std::size_t count = 0;
  for (std::size_t s = 0; s < d.num_states(); ++s) {
    if (!in[s] || !reach[s]) continue;
    ++count;
    if (q.filter_op == "avg") {
      acc += values[s];
    } else if (q.filter_op == "min") {
      acc = std::min(acc, values[s]);
    } else {
      acc = std::max(acc, values[s]);
    }
  }
  if (count == 0) throw AnalysisError("filter state set " + gcl::to_string(*q.states) + " is empty among reachable states");
  return q.filter_op == "avg" ? acc / static_cast<double>(count) : acc;
}

double check_dtmc(const Dtmc& d, std::string_view query, const Constants& constants) {
  return check_dtmc(d, parse_query(query), constants);
}

}  // namespace riskctl
