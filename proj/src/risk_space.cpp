#include "riskctl/risk_space.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <random>
#include <sstream>

#include "riskctl/activity_graph.hpp"

namespace riskctl {

const char* phase_name(Phase p) noexcept {
  switch (p) {
    case Phase::Inact: return "inact";
    case Phase::Act: return "act";
    case Phase::Mit: return "mit";
    case Phase::Sfd: return "sfd";
    case Phase::Mis: return "mis";
  }
  return "?";
}

RiskSpace::RiskSpace(const Model& model) {
  for (const auto& [name, f] : model.factors) names_.push_back(name);
  info_.resize(names_.size());
  auto index = [&](const std::string& n) -> std::optional<std::size_t> {
    auto it = std::lower_bound(names_.begin(), names_.end(), n);
    if (it == names_.end() || *it != n) return std::nullopt;
    return static_cast<std::size_t>(it - names_.begin());
  };
  std::size_t i = 0;
  for (const auto& [name, f] : model.factors) {
    FactorInfo& fi = info_[i];
    for (const auto& r : f.requires_)
      if (auto k = index(r)) fi.requires_.push_back(*k);
    for (const auto& p : f.prevents)
      if (auto k = index(p)) info_[*k].prevented_by.push_back(i);
    for (const auto& p : f.mit_prevents_mit)
      if (auto k = index(p)) info_[*k].mit_prevented_by.push_back(i);
    if (f.requires_n_of) {
      fi.n_of = f.requires_n_of->threshold;
      for (const auto& r : f.requires_n_of->factors)
        if (auto k = index(r)) fi.n_of_list.push_back(*k);
    }
    fi.options = f.mitigated_by.size();
    fi.has_mishap = f.mis.has_value();
    ++i;
  }
}

std::size_t RiskSpace::factor_index(const std::string& name) const {
  auto it = std::lower_bound(names_.begin(), names_.end(), name);
  if (it == names_.end() || *it != name) throw ModelError("unknown factor " + name);
  return static_cast<std::size_t>(it - names_.begin());
}

bool RiskSpace::is_enabled(const RiskState& s, const RiskEvent& e) const {
  if (e.factor >= names_.size() || s.size() != names_.size()) return false;
  const FactorInfo& fi = info_[e.factor];
  Phase p = s.phase(e.factor);
  switch (e.kind) {
    case EventKind::Endangerment: {
      if (e.option != 0 || (p != Phase::Inact && p != Phase::Sfd)) return false;
      for (auto g : fi.requires_)
        if (s.phase(g) != Phase::Act) return false;
      for (auto g : fi.prevented_by)
        if (s.phase(g) == Phase::Act) return false;
      if (fi.n_of > 0) {
        int active = 0;
        for (auto g : fi.n_of_list)
          if (s.phase(g) == Phase::Act) ++active;
        if (active < fi.n_of) return false;
      }
      return true;
    }
    case EventKind::Mitigation:
      if (p != Phase::Act || e.option >= fi.options) return false;
      for (auto g : fi.mit_prevented_by)
        if (s.phase(g) == Phase::Mit) return false;
      return true;
    case EventKind::Resumption: return e.option == 0 && p == Phase::Mit;
    case EventKind::Settle: return e.option == 0 && p == Phase::Sfd;
    case EventKind::Mishap: return e.option == 0 && p == Phase::Act && fi.has_mishap;
  }
  return false;
}

std::vector<RiskEvent> RiskSpace::enabled_events(const RiskState& s) const {
  std::vector<RiskEvent> out;
  for (std::size_t f = 0; f < names_.size(); ++f) {
    for (auto kind : {EventKind::Endangerment, EventKind::Mitigation, EventKind::Resumption,
                      EventKind::Settle, EventKind::Mishap}) {
      std::size_t options = kind == EventKind::Mitigation ? info_[f].options : 1;
      for (std::size_t o = 0; o < options; ++o) {
        RiskEvent e{kind, f, o};
        if (is_enabled(s, e)) out.push_back(e);
      }
    }
  }
  return out;
}

RiskState RiskSpace::step(const RiskState& s, const RiskEvent& e) const {
  if (!is_enabled(s, e)) throw ModelError("event not enabled: " + format_event(e) + " in " + format_state(s));
  RiskState next = s;
  switch (e.kind) {
    case EventKind::Endangerment: next.set(e.factor, Phase::Act); break;
    case EventKind::Mitigation: next.set(e.factor, Phase::Mit); break;
    case EventKind::Resumption: next.set(e.factor, Phase::Sfd); break;
    case EventKind::Settle: next.set(e.factor, Phase::Inact); break;
    case EventKind::Mishap: next.set(e.factor, Phase::Mis); break;
  }
  return next;
}

RiskLts RiskSpace::explore(std::size_t state_cap) const {
  RiskLts lts;
  lts.factors = names_;
  std::map<RiskState, std::size_t> index;
  std::deque<std::size_t> frontier;
  auto intern = [&](const RiskState& s) {
    auto [it, fresh] = index.emplace(s, lts.states.size());
    if (fresh) {
      if (lts.states.size() >= state_cap)
        throw AnalysisError("risk space exceeds the state cap of " + std::to_string(state_cap));
      lts.states.push_back(s);
      frontier.push_back(it->second);
    }
    return it->second;
  };
  intern(initial());
  while (!frontier.empty()) {
    std::size_t cur = frontier.front();
    frontier.pop_front();
    RiskState s = lts.states[cur];
    for (const auto& e : enabled_events(s)) {
      std::size_t to = intern(step(s, e));
      lts.transitions.push_back(RiskTransition{cur, e, to});
    }
  }
  return lts;
}

std::vector<TraceStep> RiskSpace::simulate(std::uint64_t seed, std::size_t steps) const {
  std::mt19937_64 rng(seed);
  std::vector<TraceStep> trace;
  RiskState s = initial();
  for (std::size_t k = 0; k < steps; ++k) {
    auto events = enabled_events(s);
    if (events.empty()) break;
    // plain modulo keeps traces identical across standard libraries
    const RiskEvent& e = events[rng() % events.size()];
    trace.push_back(TraceStep{s, e});
    s = step(s, e);
  }
  trace.push_back(TraceStep{s, std::nullopt});
  return trace;
}

std::string RiskSpace::format_state(const RiskState& s) const {
  std::string out = "(";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += (i < names_.size() ? names_[i] : "?") + "=" + phase_name(s.phase(i));
  }
  return out + ")";
}

std::string RiskSpace::format_event(const RiskEvent& e) const {
  static const char* kinds[] = {"endangerment", "mitigation", "resumption", "settle", "mishap"};
  std::string out = kinds[static_cast<int>(e.kind)];
  out += "(" + (e.factor < names_.size() ? names_[e.factor] : "?");
  if (e.kind == EventKind::Mitigation) out += "," + std::to_string(e.option);
  return out + ")";
}

std::string format_trace(const RiskSpace& space, const std::vector<TraceStep>& trace) {
  std::ostringstream os;
  if (trace.size() == 1) os << space.format_state(trace.front().state) << "\n";
  for (std::size_t i = 0; i + 1 < trace.size(); ++i)
    os << space.format_state(trace[i].state) << " --" << space.format_event(*trace[i].event) << "--> "
       << space.format_state(trace[i + 1].state) << "\n";
  return os.str();
}

std::string export_risk_dot(const RiskSpace& space, const RiskLts& lts) {
  std::ostringstream os;
  os << "digraph risk_space {\n  node [shape=box];\n";
  for (std::size_t i = 0; i < lts.states.size(); ++i) {
    os << "  s" << i << " [label=" << dot_id(space.format_state(lts.states[i]));
    if (i == 0) os << ", peripheries=2";
    os << "];\n";
  }
  for (const auto& t : lts.transitions)
    os << "  s" << t.from << " -> s" << t.to << " [label=" << dot_id(space.format_event(t.event)) << "];\n";
  os << "}\n";
  return os.str();
}

}  // namespace riskctl
