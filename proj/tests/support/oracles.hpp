#pragma once
// Independent reference computations shared by the unit and acceptance tests.
// Nothing here calls into the solvers under test.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "riskctl/mdp.hpp"

namespace oracle {

/// Random MDP whose transitions only go from state i to states j > i. The last
/// state is a deadlock, as is any state drawn as a sink. At most
/// `max_branching_states` states carry 2 or 3 choices so that all memoryless
/// deterministic policies can be enumerated.
inline riskctl::Mdp random_acyclic_mdp(std::mt19937_64& rng, std::size_t max_states,
                                       std::size_t max_branching_states = 8) {
  auto uniform = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t n = uniform(2, max_states);
  std::vector<bool> branching(n, false);
  const std::size_t k = std::min(max_branching_states, n - 1);
  const std::size_t wanted = uniform(1, k);
  for (std::size_t placed = 0, tries = 0; placed < wanted && tries < 10 * n; ++tries) {
    std::size_t s = uniform(0, n - 2);
    if (!branching[s]) {
      branching[s] = true;
      ++placed;
    }
  }

  riskctl::Mdp m;
  m.vars = {riskctl::VarInfo{"s", false, 0, static_cast<int>(n - 1)}};
  m.reward_names = {"r1", "r2"};
  m.rewards["r1"].state.assign(n, 0.0);
  m.rewards["r2"].state.assign(n, 0.0);
  m.choices.resize(n);
  for (std::size_t s = 0; s < n; ++s) {
    m.states.push_back({static_cast<int>(s)});
    bool sink = s + 1 == n || (s > 0 && !branching[s] && unit(rng) < 0.05);
    std::size_t nchoices = sink ? 0 : branching[s] ? uniform(2, 3) : 1;
    for (std::size_t c = 0; c < nchoices; ++c) {
      riskctl::Choice ch;
      ch.action = "a" + std::to_string(c);
      std::size_t succ = std::min<std::size_t>(uniform(1, 3), n - 1 - s);
      std::vector<std::size_t> targets;
      while (targets.size() < succ) {
        std::size_t t = uniform(s + 1, n - 1);
        if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
      }
      std::vector<double> w(succ);
      double total = 0.0;
      for (auto& x : w) total += (x = 0.1 + unit(rng));
      double rest = 1.0;
      for (std::size_t i = 0; i < succ; ++i) {
        double p = i + 1 == succ ? rest : w[i] / total;
        rest -= p;
        ch.dist.push_back({targets[i], p});
      }
      m.choices[s].push_back(std::move(ch));
    }
    // Rewards on a coarse grid make exact ties between policies common.
    for (const char* r : {"r1", "r2"}) {
      auto& row = m.rewards[r].choice.emplace_back();
      for (std::size_t c = 0; c < nchoices; ++c) row.push_back(static_cast<double>(uniform(0, 8)) * 0.5);
    }
  }
  m.label_names = {"init", "deadlock"};
  m.labels.assign(2, std::vector<bool>(n, false));
  m.labels[0][0] = true;
  for (std::size_t s = 0; s < n; ++s) m.labels[1][s] = m.choices[s].empty();
  return m;
}

/// Expected total reward of every state under a fixed choice map, by a
/// backward pass (valid because transitions only go forward).
inline std::vector<double> evaluate(const riskctl::Mdp& m, const riskctl::RewardStructure& r,
                                    const std::vector<std::size_t>& choice) {
  std::vector<double> v(m.num_states(), 0.0);
  for (std::size_t s = m.num_states(); s-- > 0;) {
    if (m.choices[s].empty()) continue;
    const auto& ch = m.choices[s][choice[s]];
    double x = r.state[s] + r.choice[s][choice[s]];
    for (const auto& t : ch.dist) x += t.prob * v[t.target];
    v[s] = x;
  }
  return v;
}

/// Calls `f` with every memoryless deterministic choice map.
inline void for_each_policy(const riskctl::Mdp& m, const std::function<void(const std::vector<std::size_t>&)>& f) {
  std::vector<std::size_t> choice(m.num_states(), 0);
  while (true) {
    f(choice);
    std::size_t s = 0;
    for (; s < m.num_states(); ++s) {
      if (m.choices[s].size() <= 1) continue;
      if (++choice[s] < m.choices[s].size()) break;
      choice[s] = 0;
    }
    if (s == m.num_states()) return;
  }
}

/// Per-state optimum over all policies.
inline std::vector<double> best_values(const riskctl::Mdp& m, const std::string& reward, bool maximise) {
  const auto& r = m.rewards.at(reward);
  std::vector<double> best(m.num_states(), maximise ? -INFINITY : INFINITY);
  for_each_policy(m, [&](const std::vector<std::size_t>& c) {
    auto v = evaluate(m, r, c);
    for (std::size_t s = 0; s < v.size(); ++s) best[s] = maximise ? std::max(best[s], v[s]) : std::min(best[s], v[s]);
  });
  return best;
}

struct Point {
  double r1, r2;
};

/// Initial-state value pairs of every policy.
inline std::vector<Point> all_points(const riskctl::Mdp& m, const std::string& r1, const std::string& r2) {
  std::vector<Point> out;
  for_each_policy(m, [&](const std::vector<std::size_t>& c) {
    out.push_back({evaluate(m, m.rewards.at(r1), c)[m.initial], evaluate(m, m.rewards.at(r2), c)[m.initial]});
  });
  return out;
}

/// `a` dominates `b` under maximisation of both coordinates, with slack `tol`.
inline bool dominates(const Point& a, const Point& b, double tol) {
  return a.r1 >= b.r1 - tol && a.r2 >= b.r2 - tol && (a.r1 > b.r1 + tol || a.r2 > b.r2 + tol);
}

/// Two-absorbing-state chain: s0 reaches "goal" with 0.95 and the sink with 0.05.
inline riskctl::Dtmc chain_095() {
  riskctl::Dtmc d;
  d.vars = {riskctl::VarInfo{"s", false, 0, 2}};
  d.states = {{0}, {1}, {2}};
  d.rows = {{{1, 0.95, "a"}, {2, 0.05, "a"}}, {{1, 1.0, ""}}, {{2, 1.0, ""}}};
  d.label_names = {"init", "deadlock", "goal"};
  d.labels = {{true, false, false}, {false, true, true}, {false, true, false}};
  return d;
}

/// Four states: s0 and s1 recover from a critical event, s2 is safe, s3 is an
/// accident. With x = P[!ACCIDENT W SAFE]:
///   x0 = 0.5 x1 + 0.3,  x1 = 0.4 x0 + 0.5
/// so x0 = 0.55 / 0.8 = 0.6875 and x1 = 0.775; both lie in the filter set.
inline riskctl::Dtmc recovery_fixture() {
  riskctl::Dtmc d;
  d.vars = {riskctl::VarInfo{"s", false, 0, 3}};
  d.states = {{0}, {1}, {2}, {3}};
  d.rows = {{{1, 0.5, "retry"}, {2, 0.3, "recover"}, {3, 0.2, "fail"}},
            {{0, 0.4, "retry"}, {2, 0.5, "recover"}, {3, 0.1, "fail"}},
            {{2, 1.0, ""}},
            {{3, 1.0, ""}}};
  d.label_names = {"init", "deadlock", "ANYREC", "SAFE", "ACCIDENT", "MISHAP"};
  d.labels = {{true, false, false, false},
              {false, false, true, true},
              {true, true, false, false},
              {false, false, true, false},
              {false, false, false, true},
              {false, false, false, true}};
  return d;
}
inline constexpr double kRecoveryFilterAvg = (0.6875 + 0.775) / 2.0;

inline std::string strip_spaces(const std::string& s) {
  std::string out;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) out += c;
  return out;
}

/// The statement starting at `[action]` (up to and including its ';').
inline std::string command_text(const std::string& text, const std::string& action, std::size_t from = 0) {
  auto pos = text.find("[" + action + "]", from);
  if (pos == std::string::npos) return {};
  auto end = text.find(';', pos);
  return text.substr(pos, end == std::string::npos ? std::string::npos : end - pos + 1);
}

}  // namespace oracle
