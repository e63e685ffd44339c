#include "riskctl/mdp.hpp"

#include <algorithm>

#include "riskctl/common.hpp"

namespace riskctl {

std::string format_valuation(const std::vector<VarInfo>& vars, const std::vector<int>& values) {
  std::string out = "(";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    bool is_bool = i < vars.size() && vars[i].is_bool;
    out += is_bool ? (values[i] ? "true" : "false") : std::to_string(values[i]);
  }
  return out + ")";
}

std::size_t Mdp::num_choices() const {
  std::size_t n = 0;
  for (const auto& c : choices) n += c.size();
  return n;
}

std::size_t Mdp::num_transitions() const {
  std::size_t n = 0;
  for (const auto& cs : choices)
    for (const auto& c : cs) n += c.dist.size();
  return n;
}

std::optional<std::size_t> Mdp::label_index(const std::string& name) const {
  auto it = std::find(label_names.begin(), label_names.end(), name);
  if (it == label_names.end()) return std::nullopt;
  return static_cast<std::size_t>(it - label_names.begin());
}

bool Mdp::has_label(const std::string& name, std::size_t state) const {
  auto k = label_index(name);
  return k && labels[*k][state];
}

const RewardStructure& Mdp::reward(const std::string& name) const {
  auto it = rewards.find(name);
  if (it == rewards.end()) throw AnalysisError("unknown reward structure \"" + name + "\"");
  return it->second;
}

std::size_t Dtmc::num_transitions() const {
  std::size_t n = 0;
  for (const auto& r : rows) n += r.size();
  return n;
}

std::optional<std::size_t> Dtmc::label_index(const std::string& name) const {
  auto it = std::find(label_names.begin(), label_names.end(), name);
  if (it == label_names.end()) return std::nullopt;
  return static_cast<std::size_t>(it - label_names.begin());
}

bool Dtmc::has_label(const std::string& name, std::size_t state) const {
  auto k = label_index(name);
  return k && labels[*k][state];
}

bool structurally_equal(const Dtmc& a, const Dtmc& b) {
  auto same_vars = [&] {
    if (a.vars.size() != b.vars.size()) return false;
    for (std::size_t i = 0; i < a.vars.size(); ++i)
      if (a.vars[i].name != b.vars[i].name || a.vars[i].is_bool != b.vars[i].is_bool) return false;
    return true;
  };
  return same_vars() && a.states == b.states && a.rows == b.rows && a.label_names == b.label_names &&
         a.labels == b.labels && a.initial == b.initial;
}

}  // namespace riskctl
