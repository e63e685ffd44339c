#include <algorithm>
#include <cmath>
#include <deque>
#include <unordered_map>

#include "riskctl/gcl.hpp"

namespace riskctl::gcl {

namespace {

struct StateHash {
  std::size_t operator()(const std::vector<int>& v) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (int x : v) {
      h ^= static_cast<std::size_t>(static_cast<unsigned>(x));
      h *= 1099511628211ull;
    }
    return h;
  }
};

// A branch of a (possibly synchronised) choice before successor lookup.
struct Partial {
  double prob = 1.0;
  std::vector<std::pair<std::size_t, int>> writes;
  std::vector<std::size_t> writers;  // module index per write
};

}  // namespace

Mdp build_state_space(const GclProgram& program, const BuildOptions& options) {
  CompiledProgram cp(program, options.constants);
  const auto& cmds = cp.commands();
  const auto& vars = cp.vars();

  // Per action: for each module declaring it, the indices of its commands.
  std::vector<std::vector<std::vector<std::size_t>>> by_action(cp.actions().size());
  std::vector<std::vector<std::size_t>> action_modules(cp.actions().size());
  for (std::size_t k = 0; k < cmds.size(); ++k) {
    if (!cmds[k].action) continue;
    auto a = *cmds[k].action;
    auto& mods = action_modules[a];
    auto it = std::find(mods.begin(), mods.end(), cmds[k].module);
    if (it == mods.end()) {
      mods.push_back(cmds[k].module);
      by_action[a].emplace_back();
      it = mods.end() - 1;
    }
    by_action[a][static_cast<std::size_t>(it - mods.begin())].push_back(k);
  }
  // Choice order: commands in declaration order, a synchronised action taking
  // the slot of its first command.
  struct Slot {
    bool sync;
    std::size_t index;
  };
  std::vector<Slot> slots;
  {
    std::vector<bool> placed(cp.actions().size(), false);
    for (std::size_t k = 0; k < cmds.size(); ++k) {
      if (!cmds[k].action) {
        slots.push_back({false, k});
      } else if (!placed[*cmds[k].action]) {
        placed[*cmds[k].action] = true;
        slots.push_back({true, *cmds[k].action});
      }
    }
  }

  Mdp mdp;
  mdp.vars = vars;
  std::unordered_map<std::vector<int>, std::size_t, StateHash> index;
  std::deque<std::size_t> frontier;
  auto intern = [&](std::vector<int> s) {
    auto it = index.find(s);
    if (it != index.end()) return it->second;
    if (mdp.states.size() >= options.state_cap)
      throw AnalysisError("state space exceeds the cap of " + std::to_string(options.state_cap) + " states");
    std::size_t id = mdp.states.size();
    index.emplace(s, id);
    mdp.states.push_back(std::move(s));
    frontier.push_back(id);
    return id;
  };
  intern(cp.initial_state());

  auto describe = [&](std::size_t s) { return format_valuation(vars, mdp.states[s]); };

  // Evaluates one command's branches in state s, checking the distribution.
  auto expand = [&](std::size_t k, std::size_t s, EvalContext& ctx) {
    const CompiledCommand& c = cmds[k];
    std::vector<Partial> out;
    double sum = 0.0;
    for (const auto& b : c.branches) {
      double p = eval(b.prob, ctx).as_double();
      if (!(p >= -1e-9 && p <= 1.0 + 1e-9))
        throw AnalysisError(c.pos.str() + ": probability " + format_double(p) + " outside [0,1] in state " +
                            describe(s));
      sum += p;
      if (p <= 0.0) continue;
      Partial part;
      part.prob = p;
      for (const auto& [slot, val] : b.updates) {
        int v = static_cast<int>(eval(val, ctx).i);
        if (v < vars[slot].low || v > vars[slot].high)
          throw AnalysisError(c.pos.str() + ": value " + std::to_string(v) + " for " + vars[slot].name +
                              " outside its range in state " + describe(s));
        part.writes.emplace_back(slot, v);
        part.writers.push_back(c.module);
      }
      out.push_back(std::move(part));
    }
    if (std::fabs(sum - 1.0) > 1e-9) {
      std::string act = c.action ? cp.actions()[*c.action] : "";
      throw AnalysisError(c.pos.str() + ": probabilities sum to " + format_double(sum) + " for action [" + act +
                          "] in state " + describe(s));
    }
    return out;
  };

  auto finish = [&](std::size_t s, const std::string& action, const std::vector<Partial>& parts) {
    Choice ch;
    ch.action = action;
    for (const auto& part : parts) {
      std::vector<int> next = mdp.states[s];
      for (const auto& [slot, v] : part.writes) next[slot] = v;
      std::size_t t = intern(std::move(next));
      auto it = std::find_if(ch.dist.begin(), ch.dist.end(), [&](const Transition& x) { return x.target == t; });
      if (it != ch.dist.end()) {
        it->prob += part.prob;
      } else {
        ch.dist.push_back({t, part.prob});
      }
    }
    std::sort(ch.dist.begin(), ch.dist.end(), [](const Transition& a, const Transition& b) { return a.target < b.target; });
    return ch;
  };

  while (!frontier.empty()) {
    std::size_t s = frontier.front();
    frontier.pop_front();
    std::vector<int> cur = mdp.states[s];
    EvalContext ctx;
    ctx.vars = cur.data();
    std::vector<Choice> choices;
    for (const Slot& slot : slots) {
      if (!slot.sync) {
        if (!eval(cmds[slot.index].guard, ctx).as_bool()) continue;
        choices.push_back(finish(s, "", expand(slot.index, s, ctx)));
        continue;
      }
      const std::string& action = cp.actions()[slot.index];
      // Enabled commands per participating module; empty list disables the action.
      std::vector<std::vector<std::size_t>> enabled;
      bool blocked = false;
      for (const auto& mod_cmds : by_action[slot.index]) {
        std::vector<std::size_t> en;
        for (auto k : mod_cmds)
          if (eval(cmds[k].guard, ctx).as_bool()) en.push_back(k);
        if (en.empty()) {
          blocked = true;
          break;
        }
        enabled.push_back(std::move(en));
      }
      if (blocked) continue;
      // One choice per tuple of enabled commands, in lexicographic order.
      std::vector<std::size_t> pick(enabled.size(), 0);
      for (bool done = false; !done;) {
        std::vector<Partial> combined{Partial{}};
        for (std::size_t m = 0; m < enabled.size(); ++m) {
          auto parts = expand(enabled[m][pick[m]], s, ctx);
          std::vector<Partial> next;
          for (const auto& a : combined) {
            for (const auto& b : parts) {
              Partial c = a;
              c.prob *= b.prob;
              for (std::size_t w = 0; w < b.writes.size(); ++w) {
                for (std::size_t v = 0; v < c.writes.size(); ++v)
                  if (c.writes[v].first == b.writes[w].first)
                    throw AnalysisError("write conflict on " + vars[b.writes[w].first].name + " between modules " +
                                        cp.module_names()[c.writers[v]] + " and " +
                                        cp.module_names()[b.writers[w]] + " in action [" + action + "] at state " +
                                        describe(s));
                c.writes.push_back(b.writes[w]);
                c.writers.push_back(b.writers[w]);
              }
              next.push_back(std::move(c));
            }
          }
          combined = std::move(next);
        }
        choices.push_back(finish(s, action, combined));
        std::size_t m = enabled.size();
        while (true) {
          if (m == 0) {
            done = true;
            break;
          }
          --m;
          if (++pick[m] < enabled[m].size()) break;
          pick[m] = 0;
        }
      }
    }
    if (mdp.choices.size() <= s) mdp.choices.resize(s + 1);
    mdp.choices[s] = std::move(choices);
  }
  mdp.choices.resize(mdp.states.size());

  // Labels
  std::size_t n = mdp.states.size();
  mdp.label_names = {"init", "deadlock"};
  mdp.labels.assign(2, std::vector<bool>(n, false));
  mdp.labels[0][0] = true;
  for (std::size_t s = 0; s < n; ++s) mdp.labels[1][s] = mdp.choices[s].empty();
  for (const auto& l : cp.labels()) {
    mdp.label_names.push_back(l.name);
    std::vector<bool> row(n);
    for (std::size_t s = 0; s < n; ++s) {
      EvalContext ctx;
      ctx.vars = mdp.states[s].data();
      row[s] = eval(l.expr, ctx).as_bool();
    }
    mdp.labels.push_back(std::move(row));
  }

  // Rewards
  for (std::size_t r = 0; r < cp.rewards().size(); ++r) {
    const auto& rw = cp.rewards()[r];
    std::string name = rw.name.empty() ? "#" + std::to_string(r + 1) : rw.name;
    RewardStructure rs;
    rs.state.assign(n, 0.0);
    rs.choice.resize(n);
    for (std::size_t s = 0; s < n; ++s) {
      EvalContext ctx;
      ctx.vars = mdp.states[s].data();
      rs.choice[s].assign(mdp.choices[s].size(), 0.0);
      for (const auto& item : rw.items) {
        if (!eval(item.guard, ctx).as_bool()) continue;
        double v = eval(item.value, ctx).as_double();
        if (!item.transition) {
          rs.state[s] += v;
          continue;
        }
        for (std::size_t c = 0; c < mdp.choices[s].size(); ++c)
          if (mdp.choices[s][c].action == item.action) rs.choice[s][c] += v;
      }
    }
    if (!mdp.rewards.count(name)) mdp.reward_names.push_back(name);
    mdp.rewards[name] = std::move(rs);
  }
  return mdp;
}

}  // namespace riskctl::gcl
