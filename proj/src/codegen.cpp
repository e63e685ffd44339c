#include "riskctl/codegen.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <tuple>

#include "riskctl/gcl.hpp"
#include "riskctl/gradients.hpp"

namespace riskctl {

namespace {

const char* kPhases[] = {"inact", "act", "mit", "sfd", "mis"};

std::string trim(std::string_view s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

// Guard text ready to be conjoined with `&`: parenthesised unless it binds at
// least as tightly as a conjunction.
std::string conjunct(const std::string& text) {
  std::string t = trim(text);
  if (t.empty()) return "true";
  try {
    auto e = gcl::parse_expression(t);
    if (gcl::precedence(e->op) >= gcl::precedence(gcl::Op::And)) return t;
  } catch (const ParseError&) {
    // not our grammar; keep it isolated
  }
  return "(" + t + ")";
}

std::string phase_var(const std::string& factor) { return factor + "p"; }
std::string phase_is(const std::string& factor, const char* phase) { return phase_var(factor) + "=" + phase; }

const Mode& mode_of(const Model& m, const ModeRef& ref) {
  auto it = m.modes.find(ref.mode);
  if (it == m.modes.end()) throw ModelError("unresolved mode reference " + ref.str());
  return it->second;
}

// `(x=e & y=f)` for the update `(x'=e)&(y'=f)`.
std::string update_effect(const std::string& update) {
  auto as = gcl::parse_update(update);
  if (as.empty()) return "true";
  std::vector<std::string> parts;
  for (const auto& a : as) {
    std::string v = gcl::to_string(*a.value);
    if (gcl::precedence(a.value->op) <= gcl::precedence(gcl::Op::Eq)) v = "(" + v + ")";
    parts.push_back(a.var + "=" + v);
  }
  return "(" + join(parts, " & ") + ")";
}

std::string update_text(const std::string& update) { return trim(update); }

bool targets_safmod(const Mode& mode) { return mode.target && mode.target->variable == "safmod"; }

// Command names in one deterministic pass so that collisions are numbered
// the same way everywhere.
struct Names {
  std::map<std::tuple<std::string, std::string, std::string, std::string>, std::string> by_key;

  const std::string& get(const std::string& factor, const std::string& role, const std::string& mode,
                         const std::string& kind) const {
    auto it = by_key.find({factor, role, mode, kind});
    if (it == by_key.end()) throw ModelError("no command " + kind + " for " + factor + "/" + mode);
    return it->second;
  }
};

Names command_names(const Model& m) {
  Names names;
  std::set<std::string> used;
  auto claim = [&](const std::string& factor, const std::string& role, const std::string& stem,
                   const std::string& kind) {
    std::string name = "si_" + stem + kind;
    for (int k = 2; used.count(name); ++k) name = "si_" + stem + std::to_string(k) + kind;
    used.insert(name);
    names.by_key[{factor, role, stem, kind}] = name;
  };
  for (const auto& [fname, f] : m.factors) {
    claim(fname, "det", fname, "det");
    for (const auto& ref : f.mitigated_by) {
      const Mode& mode = mode_of(m, ref);
      if (mode.target) claim(fname, "mit", ref.mode, "safmod");
      if (!trim(mode.update).empty()) claim(fname, "mit", ref.mode, "fun");
      claim(fname, "mit", ref.mode, "done");
    }
    for (const auto& ref : f.resumed_by) {
      const Mode& mode = mode_of(m, ref);
      if (!trim(mode.update).empty()) claim(fname, "res", ref.mode, "fun");
      claim(fname, "res", ref.mode, mode.target ? "safmod" : "done");
    }
  }
  return names;
}

// Other factors' dependencies that gate endangerment.
std::vector<std::string> endangerment_literals(const Model& m, const RiskFactor& f) {
  std::vector<std::string> lits;
  for (const auto& g : f.requires_) lits.push_back(phase_is(g, "act"));
  for (const auto& [gname, g] : m.factors)
    if (std::find(g.prevents.begin(), g.prevents.end(), f.name) != g.prevents.end())
      lits.push_back("!" + phase_is(gname, "act"));
  if (f.requires_n_of) {
    std::vector<std::string> terms;
    for (const auto& g : f.requires_n_of->factors) terms.push_back("(" + phase_is(g, "act") + "?1:0)");
    lits.push_back(join(terms, "+") + ">=" + std::to_string(f.requires_n_of->threshold));
  }
  return lits;
}

// Safety modes at least as safe as `target`: switching from the target to
// them does not worsen the risk level.
std::string safe_enough(const Model& m, const ModeTarget& target) {
  const GradientMatrix* g = m.matrix("safmod");
  if (target.variable != "safmod" || !g || !g->index_of(target.value)) return target.variable + "=" + target.value;
  std::size_t t = *g->index_of(target.value);
  std::vector<std::string> alts;
  for (std::size_t x = 0; x < g->size(); ++x)
    if (g->at(t, x) >= 0) alts.push_back("safmod=" + g->labels()[x]);
  if (alts.size() == 1) return alts.front();
  return "(" + join(alts, " | ") + ")";
}

struct Cube {
  std::vector<int> bits;  // 1 demanding, 0 quiet, -1 free
  bool operator<(const Cube& o) const { return bits < o.bits; }
  bool operator==(const Cube& o) const { return bits == o.bits; }
  bool covers(std::size_t minterm) const {
    for (std::size_t i = 0; i < bits.size(); ++i) {
      int b = static_cast<int>((minterm >> i) & 1u);
      if (bits[i] != -1 && bits[i] != b) return false;
    }
    return true;
  }
};

// Prime implicants of the given minterm set followed by a greedy cover;
// small inputs only (one bit per competing factor).
std::vector<Cube> minimise(const std::vector<std::size_t>& minterms, std::size_t width) {
  std::set<Cube> current;
  for (auto mt : minterms) {
    Cube c;
    for (std::size_t i = 0; i < width; ++i) c.bits.push_back(static_cast<int>((mt >> i) & 1u));
    current.insert(c);
  }
  std::set<Cube> primes;
  while (!current.empty()) {
    std::set<Cube> next;
    std::set<Cube> merged;
    for (auto a = current.begin(); a != current.end(); ++a) {
      for (auto b = std::next(a); b != current.end(); ++b) {
        int diff = -1, count = 0;
        for (std::size_t i = 0; i < width && count < 2; ++i) {
          if (a->bits[i] == b->bits[i]) continue;
          if (a->bits[i] == -1 || b->bits[i] == -1) {
            count = 2;
            break;
          }
          diff = static_cast<int>(i);
          ++count;
        }
        if (count != 1) continue;
        Cube c = *a;
        c.bits[static_cast<std::size_t>(diff)] = -1;
        next.insert(c);
        merged.insert(*a);
        merged.insert(*b);
      }
    }
    for (const auto& c : current)
      if (!merged.count(c)) primes.insert(c);
    current = std::move(next);
  }
  std::vector<Cube> cover;
  std::set<std::size_t> left(minterms.begin(), minterms.end());
  std::vector<Cube> pool(primes.begin(), primes.end());
  // essential primes first
  for (auto mt : minterms) {
    const Cube* only = nullptr;
    int n = 0;
    for (const auto& p : pool)
      if (p.covers(mt)) {
        only = &p;
        ++n;
      }
    if (n == 1 && std::find(cover.begin(), cover.end(), *only) == cover.end()) cover.push_back(*only);
  }
  for (const auto& c : cover)
    for (auto it = left.begin(); it != left.end();) it = c.covers(*it) ? left.erase(it) : std::next(it);
  while (!left.empty()) {
    const Cube* best = nullptr;
    std::size_t best_n = 0;
    for (const auto& p : pool) {
      std::size_t n = 0;
      for (auto mt : left) n += p.covers(mt) ? 1 : 0;
      if (n > best_n) {
        best = &p;
        best_n = n;
      }
    }
    cover.push_back(*best);
    for (auto it = left.begin(); it != left.end();) it = best->covers(*it) ? left.erase(it) : std::next(it);
  }
  std::sort(cover.begin(), cover.end(), [](const Cube& a, const Cube& b) {
    // most specific literals first reads closest to an enumeration
    return a.bits > b.bits;
  });
  return cover;
}

struct Resumption {
  std::vector<std::string> literals;
  std::string target;
};

// One entry per distinguishable override outcome for resuming `f` towards
// `declared`.
std::vector<Resumption> resumption_cases(const Model& m, const RiskFactor& f, const std::string& declared) {
  const GradientMatrix* g = m.matrix("safmod");
  if (!g) return {Resumption{{}, declared}};
  std::vector<std::string> competitors;
  std::vector<std::vector<std::string>> demands;
  for (const auto& [gname, other] : m.factors) {
    if (gname == f.name) continue;
    std::vector<std::string> d;
    for (const auto& ref : other.mitigated_by) {
      const Mode& mode = mode_of(m, ref);
      if (targets_safmod(mode)) d.push_back(mode.target->value);
    }
    if (d.empty()) continue;
    competitors.push_back(gname);
    demands.push_back(std::move(d));
  }
  if (competitors.size() > 16) throw ModelError("too many competing factors to enumerate resumption of " + f.name);
  std::size_t width = competitors.size();
  std::vector<std::string> outcome_order;
  std::map<std::string, std::vector<std::size_t>> by_outcome;
  for (std::size_t mt = 0; mt < (std::size_t{1} << width); ++mt) {
    std::vector<std::string> demanded;
    for (std::size_t i = 0; i < width; ++i)
      if ((mt >> i) & 1u) demanded.insert(demanded.end(), demands[i].begin(), demands[i].end());
    std::string out = override_target(*g, declared, demanded, declared);
    if (!by_outcome.count(out)) outcome_order.push_back(out);
    by_outcome[out].push_back(mt);
  }
  std::vector<Resumption> cases;
  for (const auto& out : outcome_order) {
    for (const auto& cube : minimise(by_outcome[out], width)) {
      Resumption r;
      r.target = out;
      for (std::size_t i = 0; i < width; ++i) {
        const std::string& c = competitors[i];
        if (cube.bits[i] == 1) {
          r.literals.push_back("(" + phase_is(c, "act") + " | " + phase_is(c, "mit") + ")");
        } else if (cube.bits[i] == 0) {
          r.literals.push_back("(" + phase_is(c, "inact") + " | " + phase_is(c, "sfd") + " | " + phase_is(c, "mis") +
                               ")");
        }
      }
      cases.push_back(std::move(r));
    }
  }
  return cases;
}

std::string host_module(const Model& m, const std::string& action) {
  for (const auto& [name, item] : m.items)
    if (std::find(item.hooks.begin(), item.hooks.end(), action) != item.hooks.end()) return name;
  const Item* ctl = m.controller();
  if (!ctl) throw ModelError("no module hosts mishap action " + action + " and there is no single controller");
  return ctl->name;
}

std::string mishap_command(const RiskFactor& f) {
  std::string cond = "(!" + phase_is(f.name, "mis") + " & (CE_" + f.name + " | RCE_" + f.name + "))";
  std::string p = f.prob ? *f.prob : "0";
  return "[" + *f.mis + "] true -> \n\t(" + cond + "?" + p + ":0):(" + phase_var(f.name) + "'=mis)\n\t+(" + cond +
         "?" + decimal_complement(p) + ":1):true;\n";
}

bool is_risk_column(const std::string& c) { return c.rfind("risk_", 0) == 0; }

std::vector<std::string> mode_columns(const Model& m) {
  std::vector<std::string> cols;
  bool e = false, n = false, d = false;
  for (const auto& [name, mode] : m.modes) {
    e |= mode.effort.has_value();
    n |= mode.nuisance.has_value();
    d |= mode.disruption.has_value();
  }
  if (e) cols.push_back("effort");
  if (n) cols.push_back("nuisance");
  if (d) cols.push_back("disruption");
  return cols;
}

std::vector<std::string> reward_columns(const Model& m) {
  std::vector<std::string> cols = m.weights.columns;
  for (const auto& c : mode_columns(m))
    if (std::find(cols.begin(), cols.end(), c) == cols.end()) cols.push_back(c);
  return cols;
}

bool has_severity(const Model& m) {
  return std::any_of(m.factors.begin(), m.factors.end(),
                     [](const auto& kv) { return kv.second.mis && kv.second.sev; });
}

}  // namespace

std::string gen_types(const Model& m) {
  std::ostringstream os;
  os << "// risk factor phases\n";
  for (int i = 0; i < 5; ++i) os << "const int " << kPhases[i] << " = " << i << ";\n";
  const GradientMatrix* g = m.matrix("safmod");
  const Item* ctl = m.controller();
  bool declared = false;
  if (ctl)
    for (const auto& [var, decl] : ctl->locals) declared |= var == "safmod";
  if (g) {
    os << "// safety modes\n";
    for (std::size_t i = 0; i < g->size(); ++i) os << "const int " << g->labels()[i] << " = " << i << ";\n";
    if (!declared)
      os << "global safmod : [0.." << g->size() - 1 << "] init " << g->labels().front() << ";\n";
  }
  if (!m.factors.empty()) os << "// factor phase variables\n";
  for (const auto& [name, f] : m.factors) os << "global " << phase_var(name) << " : [inact..mis] init inact;\n";
  return os.str();
}

std::string gen_controller_module(const Model& m, const GenOptions& options) {
  if (options.decomposition != "multi-event-concurrent")
    throw ModelError("unsupported decomposition '" + options.decomposition + "' (only multi-event-concurrent)");
  const Item* ctl = m.controller();
  if (!ctl) throw ModelError("controller generation needs exactly one CONTROLLER item");
  for (const auto& [name, f] : m.factors)
    if (f.mitigated_by.empty()) throw ModelError("factor " + name + " has no mitigatedBy modes");
  Names names = command_names(m);
  const std::string src_guard = conjunct(options.mitigation_source_guard);

  std::ostringstream os;
  os << "module " << ctl->name << "\n";
  for (const auto& [var, decl] : ctl->locals) os << "  " << var << " : " << trim(decl) << ";\n";

  for (const auto& [fname, f] : m.factors) {
    os << "\n  // " << fname << "\n";
    const std::string p = phase_var(fname);
    // detection
    {
      std::vector<std::string> g{"!CYCLEEND", "(" + phase_is(fname, "inact") + " | " + phase_is(fname, "sfd") + ")",
                                 "CE_" + fname};
      for (auto& lit : endangerment_literals(m, f)) g.push_back(conjunct(lit));
      os << "  [" << names.get(fname, "det", fname, "det") << "] " << join(g, " & ") << " -> (" << p
         << "'=act);\n";
    }
    // mitigation options
    std::vector<std::string> blockers;
    for (const auto& [gname, other] : m.factors)
      if (std::find(other.mit_prevents_mit.begin(), other.mit_prevents_mit.end(), fname) !=
          other.mit_prevents_mit.end())
        blockers.push_back("!" + phase_is(gname, "mit"));
    for (const auto& ref : f.mitigated_by) {
      const Mode& mode = mode_of(m, ref);
      std::string update = update_text(mode.update);
      if (mode.target) {
        std::string src = mode.target->variable == "safmod"
                              ? src_guard
                              : "!" + mode.target->variable + "=" + mode.target->value;
        os << "  [" << names.get(fname, "mit", ref.mode, "safmod") << "] !CYCLEEND & " << src << " & "
           << phase_is(fname, "act") << " -> (" << mode.target->variable << "'=" << mode.target->value << ");\n";
      }
      if (!update.empty()) {
        os << "  [" << names.get(fname, "mit", ref.mode, "fun") << "] !CYCLEEND & " << phase_is(fname, "act")
           << " & !" << update_effect(update) << " -> " << update << ";\n";
      }
      std::vector<std::string> g{"!CYCLEEND", phase_is(fname, "act")};
      if (mode.target) g.push_back(safe_enough(m, *mode.target));
      if (!update.empty()) g.push_back(update_effect(update));
      g.insert(g.end(), blockers.begin(), blockers.end());
      os << "  [" << names.get(fname, "mit", ref.mode, "done") << "] " << join(g, " & ") << " -> (" << p
         << "'=mit);\n";
    }
    // resumption
    for (const auto& ref : f.resumed_by) {
      const Mode& mode = mode_of(m, ref);
      std::string update = update_text(mode.update);
      std::string rguard = trim(mode.guard);
      std::vector<std::string> base{phase_is(fname, "mit"), "!CE_" + fname};
      if (!rguard.empty()) base.push_back(conjunct(rguard));
      if (!update.empty()) {
        std::vector<std::string> g{"!CYCLEEND", phase_is(fname, "mit"), "!CE_" + fname, "!" + update_effect(update)};
        if (!rguard.empty()) g.push_back(conjunct(rguard));
        os << "  [" << names.get(fname, "res", ref.mode, "fun") << "] " << join(g, " & ") << " -> " << update
           << ";\n";
      }
      std::vector<std::string> tail = base;
      if (!update.empty()) tail.push_back(update_effect(update));
      if (!mode.target) {
        os << "  [" << names.get(fname, "res", ref.mode, "done") << "] !CYCLEEND & " << join(tail, " & ") << " -> ("
           << p << "'=sfd);\n";
        continue;
      }
      const std::string& label = names.get(fname, "res", ref.mode, "safmod");
      const ModeTarget& t = *mode.target;
      std::vector<Resumption> cases;
      if (t.variable == "safmod") {
        cases = resumption_cases(m, f, t.value);
      } else {
        cases.push_back(Resumption{{}, t.value});
      }
      for (const auto& c : cases) {
        std::vector<std::string> g{"!CYCLEEND"};
        g.insert(g.end(), c.literals.begin(), c.literals.end());
        g.insert(g.end(), tail.begin(), tail.end());
        os << "  [" << label << "] " << join(g, " & ") << "\n     -> (" << t.variable << "'=" << c.target << ")&("
           << p << "'=sfd);\n";
      }
    }
  }

  // mishap commands hosted by the controller
  bool first = true;
  for (const auto& [fname, f] : m.factors) {
    if (!f.mis || host_module(m, *f.mis) != ctl->name) continue;
    if (first) os << "\n  // mishaps\n";
    first = false;
    std::string cmd = mishap_command(f);
    std::string indented = "  ";
    for (char c : cmd) {
      indented += c;
      if (c == '\n') indented += "  ";
    }
    os << indented.substr(0, indented.size() - 2);
  }
  os << "endmodule\n";
  return os.str();
}

std::map<std::string, std::string> gen_mishap_commands(const Model& m) {
  std::map<std::string, std::string> out;
  const Item* ctl = m.controller();
  for (const auto& [fname, f] : m.factors) {
    if (!f.mis) continue;
    if (trim(*f.mis).empty()) throw ModelError("factor " + fname + " has an empty mis action");
    std::string host = host_module(m, *f.mis);
    if (ctl && host == ctl->name) continue;
    out[host] += mishap_command(f);
  }
  return out;
}

std::string gen_formulas(const Model& m) {
  const ApplicationEntry* fin = m.find_application("hFINAL_CUSTOM");
  if (!fin) throw ModelError("application formula hFINAL_CUSTOM is required for CYCLEEND/FINAL");
  std::ostringstream os;
  if (!m.application.empty()) os << "// application predicates\n";
  for (const auto& a : m.application) os << "formula " << a.name << " = " << trim(a.text) << ";\n";
  os << "// critical events\n";
  std::vector<std::string> ces, rces, accidents, finals;
  for (const auto& [fname, f] : m.factors) {
    std::vector<std::string> det;
    for (const auto& ref : f.detected_by) {
      const Mode& mode = mode_of(m, ref);
      if (!trim(mode.guard).empty()) det.push_back("(" + trim(mode.guard) + ")");
    }
    os << "formula CE_" << fname << " = " << (det.empty() ? "false" : join(det, " | ")) << ";\n";
    os << "formula RCE_" << fname << " = " << (trim(f.guard).empty() ? "false" : "(" + trim(f.guard) + ")") << ";\n";
    ces.push_back("CE_" + fname);
    rces.push_back("RCE_" + fname);
    if (f.mis) accidents.push_back(phase_is(fname, "mis"));
    if (f.final) finals.push_back(phase_is(fname, "act"));
  }
  auto any = [](const std::vector<std::string>& v) { return v.empty() ? std::string("false") : join(v, " | "); };
  os << "formula ANYOCC = " << any(ces) << ";\n";
  os << "formula ANYREC = " << any(rces) << ";\n";
  os << "formula ANY = ANYOCC | ANYREC;\n";
  os << "formula ACCIDENT = " << any(accidents) << ";\n";
  std::vector<std::string> mishap{"ACCIDENT"};
  mishap.insert(mishap.end(), finals.begin(), finals.end());
  os << "formula MISHAP = " << join(mishap, " | ") << ";\n";
  os << "formula SAFE = !ANY & !MISHAP;\n";
  os << "formula CYCLEEND = hFINAL_CUSTOM;\n";
  os << "// property atoms\n";
  for (const auto& c : ces) os << "label \"" << c << "\" = " << c << ";\n";
  for (const auto& c : rces) os << "label \"" << c << "\" = " << c << ";\n";
  for (const char* l : {"ANYOCC", "ANYREC", "ANY", "ACCIDENT", "MISHAP", "SAFE", "CYCLEEND"})
    os << "label \"" << l << "\" = " << l << ";\n";
  os << "label \"FINAL\" = CYCLEEND;\n";
  return os.str();
}

std::string option_command(const Model& m, const std::string& factor, const std::string& mode_name) {
  Names names = command_names(m);
  auto fit = m.factors.find(factor);
  if (fit == m.factors.end()) throw ModelError("unknown factor " + factor);
  auto mit = m.modes.find(mode_name);
  if (mit == m.modes.end()) throw ModelError("unknown mode " + mode_name);
  const RiskFactor& f = fit->second;
  const Mode& mode = mit->second;
  bool mitigates = std::any_of(f.mitigated_by.begin(), f.mitigated_by.end(),
                               [&](const ModeRef& r) { return r.mode == mode_name; });
  std::string role = mitigates ? "mit" : "res";
  if (!mitigates && std::none_of(f.resumed_by.begin(), f.resumed_by.end(),
                                 [&](const ModeRef& r) { return r.mode == mode_name; }))
    throw ModelError("mode " + mode_name + " is not an option of factor " + factor);
  if (mode.target) return names.get(factor, role, mode_name, "safmod");
  if (!trim(mode.update).empty()) return names.get(factor, role, mode_name, "fun");
  return names.get(factor, role, mode_name, "done");
}

std::string gen_rewards(const Model& m) {
  std::ostringstream os;
  auto value_of = [](const Mode& mode, const std::string& column) -> std::optional<double> {
    if (column == "effort") return mode.effort;
    if (column == "nuisance") return mode.nuisance;
    if (column == "disruption") return mode.disruption;
    return std::nullopt;
  };
  for (const auto& column : reward_columns(m)) {
    os << "rewards \"" << column << "\"\n";
    if (auto ci = m.weights.column_index(column)) {
      for (const auto& row : m.weights.rows) {
        const std::string& v = row.values[*ci];
        if (trim(v).empty() || trim(v) == "none") continue;
        std::string guard = trim(row.guard);
        if (is_risk_column(column) && column != "risk_sev") {
          std::string lit = phase_is(column.substr(5), "act");
          guard = guard.empty() ? lit : conjunct(guard) + " & " + lit;
        } else if (guard.empty()) {
          guard = "true";
        }
        os << "  [" << row.action << "] " << guard << " : " << trim(v) << ";\n";
      }
    }
    if (column == "effort" || column == "nuisance" || column == "disruption") {
      for (const auto& [fname, f] : m.factors) {
        std::vector<const ModeRef*> refs;
        for (const auto& r : f.mitigated_by) refs.push_back(&r);
        for (const auto& r : f.resumed_by) refs.push_back(&r);
        for (const ModeRef* r : refs) {
          auto v = value_of(mode_of(m, *r), column);
          if (!v) continue;
          os << "  [" << option_command(m, fname, r->mode) << "] true : " << format_double(*v) << ";\n";
        }
      }
    }
    os << "endrewards\n";
  }
  if (has_severity(m)) {
    os << "rewards \"risk_sev\"\n";
    for (const auto& [fname, f] : m.factors) {
      if (!f.mis || !f.sev) continue;
      os << "  [" << *f.mis << "] (!" << phase_is(fname, "mis") << " & (CE_" << fname << " | RCE_" << fname
         << ")) : " << format_real(*f.sev) << ";\n";
    }
    os << "endrewards\n";
  }
  return os.str();
}

Properties gen_properties(const Model& m) {
  Properties props;
  std::vector<std::string> objectives;
  for (const auto& c : reward_columns(m))
    if (!is_risk_column(c)) objectives.push_back(c);
  bool sev = has_severity(m);
  std::ostringstream d;
  if (!objectives.empty() || sev) {
    d << "const double s;\nconst int t;\nconst double p;\n\n";
    for (const auto& c : objectives) d << "R{\"" << c << "\"}max=? [ C ]\n";
    for (std::size_t i = 0; i < objectives.size(); ++i)
      for (std::size_t j = i + 1; j < objectives.size(); ++j)
        d << "multi(R{\"" << objectives[i] << "\"}max=? [ C ], R{\"" << objectives[j] << "\"}max=? [ C ])\n";
    if (sev) {
      for (const auto& c : objectives) d << "multi(R{\"" << c << "\"}max=? [ C ], R{\"risk_sev\"}<=s [ C ])\n";
      d << "multi(R{\"risk_sev\"}<=s [ C<=t ], P<=p [ F \"ANY\" ])\n";
    }
  } else {
    props.diagnostics.push_back(
        Diagnostic{SourcePos{}, Severity::Warning, "no reward columns: design properties left empty"});
  }
  props.design = d.str();
  props.policy =
      "filter(avg, P=? [ !\"ACCIDENT\" W \"SAFE\" ], \"ANYREC\" & !\"MISHAP\")\n"
      "P=? [ F \"MISHAP\" ]\n"
      "P=? [ F \"ACCIDENT\" ]\n"
      "P=? [ F \"FINAL\" ]\n";
  return props;
}

GeneratedArtefacts generate(const Model& m, const GenOptions& options) {
  GeneratedArtefacts a;
  a.types = gen_types(m);
  a.formulas = gen_formulas(m);
  a.controller_module = gen_controller_module(m, options);
  a.mishap_commands = gen_mishap_commands(m);
  a.rewards = gen_rewards(m);
  Properties props = gen_properties(m);
  a.design_props = std::move(props.design);
  a.policy_props = std::move(props.policy);
  a.diagnostics = std::move(props.diagnostics);
  for (const auto& [name, item] : m.items) a.modules.push_back(name);
  return a;
}

Injected inject(const std::string& tmpl, const GeneratedArtefacts& a, const std::string& template_name) {
  Injected out;
  std::set<std::string> placed;
  std::istringstream in(tmpl);
  std::string line;
  std::size_t lineno = 0;
  std::ostringstream os;
  bool trailing_newline = !tmpl.empty() && tmpl.back() == '\n';
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (!first) os << '\n';
    first = false;
    std::string t = trim(line);
    SourcePos pos{template_name, lineno, 1};
    if (t.rfind("//<%", 0) != 0 || t.size() < 6 || t.compare(t.size() - 2, 2, "%>") != 0) {
      os << line;
      continue;
    }
    std::string name = t.substr(4, t.size() - 6);
    std::string frag;
    if (name == "TYPES") {
      frag = a.types;
    } else if (name == "PREDICATES") {
      frag = a.formulas;
    } else if (name == "CONTROLLER") {
      frag = a.controller_module;
    } else if (name == "REWARDS") {
      frag = a.rewards;
    } else if (name.rfind("MODULEHOOK(", 0) == 0 && name.back() == ')') {
      std::string mod = trim(name.substr(11, name.size() - 12));
      if (std::find(a.modules.begin(), a.modules.end(), mod) == a.modules.end())
        throw ModelError(pos.str() + ": MODULEHOOK names unknown module " + mod);
      auto it = a.mishap_commands.find(mod);
      if (it != a.mishap_commands.end()) frag = it->second;
      name = "MODULEHOOK(" + mod + ")";
    } else {
      out.diagnostics.push_back(Diagnostic{pos, Severity::Warning, "unknown placeholder " + name + " left as is"});
      os << line;
      continue;
    }
    placed.insert(name);
    if (!frag.empty() && frag.back() == '\n') frag.pop_back();
    os << frag;
  }
  if (trailing_newline) os << '\n';
  for (const char* n : {"TYPES", "PREDICATES", "CONTROLLER", "REWARDS"})
    if (!placed.count(n))
      out.diagnostics.push_back(
          Diagnostic{SourcePos{template_name, 0, 0}, Severity::Warning, std::string("fragment ") + n + " not placed"});
  for (const auto& [mod, cmds] : a.mishap_commands)
    if (!placed.count("MODULEHOOK(" + mod + ")"))
      out.diagnostics.push_back(Diagnostic{SourcePos{template_name, 0, 0}, Severity::Warning,
                                           "mishap commands for module " + mod + " not placed"});
  out.text = os.str();
  return out;
}

void check_fragments(const GeneratedArtefacts& a) {
  auto check = [](const std::string& what, const std::string& text) {
    try {
      gcl::parse_gcl(text, what);
    } catch (const ParseError& e) {
      throw ParseError(e.pos(), "generated " + what + " does not reparse: " + e.detail());
    }
  };
  check("types", a.types);
  check("formulas", a.formulas);
  check("controller", a.controller_module);
  check("rewards", a.rewards);
  for (const auto& [mod, cmds] : a.mishap_commands) check("hook(" + mod + ")", "module " + mod + "\n" + cmds + "endmodule\n");
}

}  // namespace riskctl
