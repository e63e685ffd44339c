#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace riskctl {

struct VarInfo {
  std::string name;
  bool is_bool = false;
  int low = 0;
  int high = 1;

  bool operator==(const VarInfo&) const = default;
};

/// "(v1,v2,...)" with booleans printed as true/false.
std::string format_valuation(const std::vector<VarInfo>& vars, const std::vector<int>& values);

struct Transition {
  std::size_t target = 0;
  double prob = 0.0;
};

struct Choice {
  std::string action;  // empty for unlabelled commands
  std::vector<Transition> dist;
};

/// Reward structure resolved against an explicit state space.
struct RewardStructure {
  std::vector<double> state;                // per state
  std::vector<std::vector<double>> choice;  // per state, per choice

  double total(std::size_t s, std::size_t c) const { return state[s] + choice[s][c]; }
};

struct Mdp {
  std::vector<VarInfo> vars;
  std::vector<std::vector<int>> states;
  std::vector<std::vector<Choice>> choices;  // per state
  std::vector<std::string> label_names;      // "init", "deadlock", then model labels
  std::vector<std::vector<bool>> labels;     // [label][state]
  std::vector<std::string> reward_names;     // declaration order
  std::map<std::string, RewardStructure> rewards;
  std::size_t initial = 0;

  std::size_t num_states() const noexcept { return states.size(); }
  std::size_t num_choices() const;
  std::size_t num_transitions() const;
  std::optional<std::size_t> label_index(const std::string& name) const;
  bool has_label(const std::string& name, std::size_t state) const;
  const RewardStructure& reward(const std::string& name) const;
};

struct DtmcTransition {
  std::size_t target = 0;
  double prob = 0.0;
  std::string action;

  bool operator==(const DtmcTransition&) const = default;
};

/// Discrete-time Markov chain, typically induced by a policy on an Mdp.
/// Every row is stochastic; deadlocks carry a probability-1 self-loop.
struct Dtmc {
  std::vector<VarInfo> vars;
  std::vector<std::vector<int>> states;
  std::vector<std::vector<DtmcTransition>> rows;
  std::vector<std::string> label_names;
  std::vector<std::vector<bool>> labels;  // [label][state]
  std::size_t initial = 0;
  std::map<std::string, std::vector<double>> rewards;  // per state, not part of file exports

  std::size_t num_states() const noexcept { return states.size(); }
  std::size_t num_transitions() const;
  std::optional<std::size_t> label_index(const std::string& name) const;
  bool has_label(const std::string& name, std::size_t state) const;
};

/// Equality of everything the adversary files carry (rewards excluded).
bool structurally_equal(const Dtmc& a, const Dtmc& b);

}  // namespace riskctl
