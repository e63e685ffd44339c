#include <algorithm>
#include <cctype>
#include <functional>
#include <set>
#include <sstream>

#include "riskctl/dsl.hpp"

namespace riskctl {

std::string ModeRef::str() const {
  if (!dotted) return mode;
  return tag + "." + mode;
}

double RiskFactor::probability() const { return prob ? parse_double(*prob) : 0.0; }

const WeightRow* WeightTable::find(const std::string& action) const {
  for (const auto& r : rows)
    if (r.action == action) return &r;
  return nullptr;
}

std::optional<std::size_t> WeightTable::column_index(const std::string& column) const {
  auto it = std::find(columns.begin(), columns.end(), column);
  if (it == columns.end()) return std::nullopt;
  return static_cast<std::size_t>(it - columns.begin());
}

const ApplicationEntry* Model::find_application(const std::string& name) const {
  for (const auto& e : application)
    if (e.name == name) return &e;
  return nullptr;
}

const Item* Model::controller() const {
  const Item* found = nullptr;
  for (const auto& [name, item] : items) {
    if (item.kind != ItemKind::Controller) continue;
    if (found) return nullptr;
    found = &item;
  }
  return found;
}

const GradientMatrix* Model::matrix(const std::string& dimension) const {
  auto it = matrices.find(dimension);
  return it == matrices.end() ? nullptr : &it->second;
}

std::vector<std::string> Model::activity_order() const {
  std::vector<std::string> out;
  for (const auto& [name, a] : activities) out.push_back(name);
  return out;
}

namespace {

void append_unique(std::vector<std::string>& dst, const std::vector<std::string>& src) {
  for (const auto& s : src)
    if (std::find(dst.begin(), dst.end(), s) == dst.end()) dst.push_back(s);
}

}  // namespace

Model resolve_includes(const Model& model) {
  Model out = model;
  enum class Mark { None, Active, Done };
  std::map<std::string, Mark> mark;
  std::vector<std::string> stack;

  std::function<void(const std::string&)> visit = [&](const std::string& name) {
    auto it = out.activities.find(name);
    if (it == out.activities.end()) return;  // dangling include: reported by validate
    Mark& mk = mark[name];
    if (mk == Mark::Done) return;
    if (mk == Mark::Active) {
      auto from = std::find(stack.begin(), stack.end(), name);
      std::vector<std::string> cycle(from, stack.end());
      cycle.push_back(name);
      throw ModelError("include cycle: " + join(cycle, " -> "));
    }
    mk = Mark::Active;
    stack.push_back(name);
    Activity& a = out.activities.at(name);
    std::vector<std::string> succ, facs;
    append_unique(succ, a.successors);
    append_unique(facs, a.factors);
    for (const auto& inc : std::vector<std::string>(a.includes)) {
      visit(inc);
      auto inc_it = out.activities.find(inc);
      if (inc_it == out.activities.end()) continue;
      append_unique(succ, inc_it->second.successors);
      append_unique(facs, inc_it->second.factors);
    }
    Activity& again = out.activities.at(name);
    again.successors = std::move(succ);
    again.factors = std::move(facs);
    stack.pop_back();
    mark[name] = Mark::Done;
  };
  for (const auto& [name, a] : model.activities) visit(name);
  return out;
}

namespace {

bool is_numeric_literal(const std::string& s) {
  try {
    parse_double(s);
    return true;
  } catch (const Error&) {
    return false;
  }
}

std::vector<std::string> identifiers_in(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  bool in_number = false;
  for (char c : text + " ") {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
        (in_number && (c == '.'))) {
      if (cur.empty()) in_number = std::isdigit(static_cast<unsigned char>(c)) || c == '.';
      cur += c;
    } else {
      if (!cur.empty() && !in_number) out.push_back(cur);
      cur.clear();
      in_number = false;
    }
  }
  return out;
}

class Validator {
 public:
  Validator(const Model& m, const ValidateOptions& o) : m_(m), opt_(o) {}

  std::vector<Diagnostic> run() {
    activities();
    factors();
    modes();
    items();
    matrices();
    weights();
    std::stable_sort(out_.begin(), out_.end(), [](const Diagnostic& a, const Diagnostic& b) {
      return std::tie(a.pos.file, a.pos.line, a.pos.column, a.message) <
             std::tie(b.pos.file, b.pos.line, b.pos.column, b.message);
    });
    return out_;
  }

 private:
  void error(const SourcePos& pos, std::string msg) {
    out_.push_back(Diagnostic{pos, Severity::Error, std::move(msg)});
  }

  void activities() {
    for (const auto& [name, a] : m_.activities) {
      for (const auto& i : a.includes)
        if (!m_.activities.count(i)) error(a.pos, "unresolved activity reference " + i);
      for (const auto& s : a.successors)
        if (!m_.activities.count(s)) error(a.pos, "unresolved activity reference " + s);
    }
    try {
      resolve_includes(m_);
    } catch (const ModelError& e) {
      SourcePos pos = m_.activities.empty() ? SourcePos{} : m_.activities.begin()->second.pos;
      error(pos, e.what());
    }
  }

  void factor_list(const RiskFactor& f, const std::vector<std::string>& names) {
    for (const auto& n : names) {
      if (n == f.name)
        error(f.pos, "factor " + f.name + " depends on itself");
      else if (!m_.factors.count(n))
        error(f.pos, "unresolved factor reference " + n);
    }
  }

  void mode_refs(const RiskFactor& f, const std::vector<ModeRef>& refs, const char* role) {
    for (const auto& r : refs) {
      auto it = m_.modes.find(r.mode);
      if (it == m_.modes.end()) {
        error(f.pos, "unresolved mode reference " + r.str());
        continue;
      }
      const Mode& md = it->second;
      if (std::string(role) == "mitigatedBy" && !md.target && md.update.empty())
        error(md.pos, "mitigation mode " + md.name + " has neither target nor update");
      if (std::string(role) == "detectedBy" && md.guard.empty())
        error(md.pos, "detection mode " + md.name + " has no guard");
    }
  }

  void factors() {
    for (const auto& [name, f] : m_.factors) {
      factor_list(f, f.requires_);
      factor_list(f, f.prevents);
      factor_list(f, f.mit_prevents_mit);
      if (f.requires_n_of) {
        factor_list(f, f.requires_n_of->factors);
        int n = f.requires_n_of->threshold;
        if (n < 1 || n > static_cast<int>(f.requires_n_of->factors.size()))
          error(f.pos, "requiresNOf threshold " + std::to_string(n) + " outside 1.." +
                           std::to_string(f.requires_n_of->factors.size()));
      }
      mode_refs(f, f.detected_by, "detectedBy");
      mode_refs(f, f.mitigated_by, "mitigatedBy");
      mode_refs(f, f.resumed_by, "resumedBy");
      if (f.prob && !f.mis) error(f.pos, "prob without mis");
      if (f.mis && !f.prob) error(f.pos, "mis without prob");
      if (f.mis && f.mis->empty()) error(f.pos, "empty mis action label");
      if (f.prob) {
        double p = f.probability();
        if (p < 0.0 || p > 1.0) error(f.pos, "prob " + *f.prob + " outside [0,1]");
      }
      if (f.sev && *f.sev < 0.0) error(f.pos, "negative sev");
      if (opt_.synthesis && f.mitigated_by.empty())
        error(f.pos, "factor " + f.name + " has no mitigatedBy option");
    }
  }

  void modes() {
    for (const auto& [name, md] : m_.modes) {
      for (const auto& e : md.embodied_by)
        if (!m_.items.count(e)) error(md.pos, "unresolved item reference " + e);
      for (auto [label, v] : {std::pair{"disruption", md.disruption}, std::pair{"nuisance", md.nuisance},
                              std::pair{"effort", md.effort}})
        if (v && *v < 0.0) error(md.pos, std::string("negative ") + label + " in mode " + md.name);
      if (md.target && md.target->variable == "safmod") {
        const GradientMatrix* g = m_.matrix("safmod");
        if (g && !g->index_of(md.target->value))
          error(md.pos, "target " + md.target->value + " is not a safmod label");
      }
    }
  }

  void items() {
    std::size_t controllers = 0;
    for (const auto& [name, it] : m_.items) {
      if (it.kind == ItemKind::Controller) ++controllers;
      for (const auto& a : it.valid_acts)
        if (!m_.activities.count(a)) error(it.pos, "unresolved activity reference " + a);
    }
    if (opt_.synthesis && controllers != 1)
      error(SourcePos{}, "expected exactly one CONTROLLER item, found " + std::to_string(controllers));
  }

  void matrices() {
    for (const auto& [dim, g] : m_.matrices)
      if (dim != "safmod" && dim != "act")
        error(SourcePos{}, "unknown matrix dimension " + dim + " (expected safmod or act)");
  }

  void weights() {
    const WeightTable& w = m_.weights;
    for (const auto& c : w.columns) {
      if (c.rfind("risk_", 0) == 0 && !m_.factors.count(c.substr(5)))
        error(SourcePos{}, "column " + c + " refers to unknown factor " + c.substr(5));
    }
    for (const auto& row : w.rows) {
      if (row.values.size() != w.columns.size()) {
        error(row.pos, "row " + row.action + " has the wrong number of entries");
        continue;
      }
      for (std::size_t i = 0; i < row.values.size(); ++i) {
        const std::string& v = row.values[i];
        if (v == "none" || is_numeric_literal(v)) continue;
        auto ids = identifiers_in(v);
        if (ids.empty()) error(row.pos, "malformed value '" + v + "' for " + row.action);
        for (const auto& id : ids)
          if (!m_.find_application(id))
            error(row.pos, "value '" + v + "' of " + row.action + " in column " + w.columns[i] +
                               " uses undefined name " + id);
      }
    }
  }

  const Model& m_;
  const ValidateOptions& opt_;
  std::vector<Diagnostic> out_;
};

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string names(const std::vector<std::string>& v) { return "(" + join(v, ",") + ")"; }

std::string refs(const std::vector<ModeRef>& v) {
  std::vector<std::string> s;
  for (const auto& r : v) s.push_back(r.str());
  return names(s);
}

void print_factor(std::ostringstream& os, const RiskFactor& f, const char* indent) {
  os << indent << f.name;
  if (!f.desc.empty()) os << " desc " << quote(f.desc);
  if (!f.guard.empty()) os << " guard " << quote(f.guard);
  if (!f.detected_by.empty()) os << " detectedBy " << refs(f.detected_by);
  if (!f.mitigated_by.empty()) os << " mitigatedBy " << refs(f.mitigated_by);
  if (!f.resumed_by.empty()) os << " resumedBy " << refs(f.resumed_by);
  if (!f.requires_.empty()) os << " requires " << names(f.requires_);
  if (!f.prevents.empty()) os << " prevents " << names(f.prevents);
  if (!f.mit_prevents_mit.empty()) os << " mitPreventsMit " << names(f.mit_prevents_mit);
  if (f.requires_n_of)
    os << " requiresNOf (" << f.requires_n_of->threshold << "|" << join(f.requires_n_of->factors, ",") << ")";
  if (f.mis) os << " mis=" << quote(*f.mis);
  if (f.prob) os << " prob=" << *f.prob;
  if (f.sev) os << " sev=" << format_double(*f.sev);
  if (f.final) os << " final";
  os << ";\n";
}

}  // namespace

std::vector<Diagnostic> validate(const Model& model, const ValidateOptions& options) {
  return Validator(model, options).run();
}

std::string print_model(const Model& m) {
  std::ostringstream os;
  for (const auto& [name, a] : m.activities) {
    os << "Activity " << name << " {\n";
    for (const auto& i : a.includes) os << "  include " << i << ";\n";
    for (const auto& s : a.successors) os << "  successor " << s << ";\n";
    for (const auto& f : a.factors) {
      auto it = m.factors.find(f);
      if (it != m.factors.end() && it->second.owner == name) print_factor(os, it->second, "  ");
    }
    os << "}\n";
  }
  for (const auto& [name, f] : m.factors)
    if (f.owner.empty() || !m.activities.count(f.owner)) print_factor(os, f, "");
  for (const auto& [name, md] : m.modes) {
    os << "mode " << name;
    if (!md.desc.empty()) os << " desc " << quote(md.desc);
    if (!md.guard.empty()) os << " guard " << quote(md.guard);
    if (!md.update.empty()) os << " update " << quote(md.update);
    if (md.target) os << " target (" << md.target->variable << "=" << md.target->value << ")";
    if (!md.embodied_by.empty()) os << " embodiedBy " << join(md.embodied_by, ",");
    if (md.disruption) os << " disruption=" << format_double(*md.disruption);
    if (md.nuisance) os << " nuisance=" << format_double(*md.nuisance);
    if (md.effort) os << " effort=" << format_double(*md.effort);
    os << ";\n";
  }
  if (!m.application.empty()) {
    os << "Application " << m.application_name << " {\n";
    for (const auto& e : m.application) os << "  " << e.name << " = " << quote(e.text) << ";\n";
    os << "}\n";
  }
  for (const auto& [name, it] : m.items) {
    os << name << " type " << (it.kind == ItemKind::Controller ? "CONTROLLER" : "AGENT");
    if (!it.valid_acts.empty()) os << " validActs=" << quote(join(it.valid_acts, "|"));
    if (!it.hooks.empty()) os << " hooks=" << quote(join(it.hooks, "|"));
    for (const auto& [var, decl] : it.locals) os << " " << var << "=" << quote(decl);
    os << ";\n";
  }
  if (!m.weights.columns.empty()) {
    os << "Weights rewards {\n  guard";
    for (const auto& c : m.weights.columns) os << " " << c;
    os << ";\n";
    for (const auto& r : m.weights.rows) {
      os << "  " << r.action << ": " << quote(r.guard);
      for (const auto& v : r.values) os << " " << quote(v);
      os << ";\n";
    }
    os << "}\n";
  }
  for (const auto& [dim, g] : m.matrices) {
    os << "Distances " << dim << " {\n";
    auto rows = g.lower_left();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      os << "  " << g.labels()[i] << ":";
      for (int v : rows[i]) os << " " << v;
      os << ";\n";
    }
    os << "}\n";
  }
  return os.str();
}

namespace {

bool eq(const Activity& a, const Activity& b) {
  return a.name == b.name && a.includes == b.includes && a.successors == b.successors &&
         a.factors == b.factors;
}
bool eq(const RiskFactor& a, const RiskFactor& b) {
  return a.name == b.name && a.desc == b.desc && a.guard == b.guard && a.detected_by == b.detected_by &&
         a.mitigated_by == b.mitigated_by && a.resumed_by == b.resumed_by && a.requires_ == b.requires_ &&
         a.prevents == b.prevents && a.mit_prevents_mit == b.mit_prevents_mit &&
         a.requires_n_of == b.requires_n_of && a.mis == b.mis && a.prob == b.prob && a.sev == b.sev &&
         a.final == b.final && a.owner == b.owner;
}
bool eq(const Mode& a, const Mode& b) {
  return a.name == b.name && a.desc == b.desc && a.guard == b.guard && a.update == b.update &&
         a.target == b.target && a.embodied_by == b.embodied_by && a.disruption == b.disruption &&
         a.nuisance == b.nuisance && a.effort == b.effort;
}
bool eq(const Item& a, const Item& b) {
  return a.name == b.name && a.kind == b.kind && a.valid_acts == b.valid_acts && a.hooks == b.hooks &&
         a.locals == b.locals;
}
bool eq(const WeightRow& a, const WeightRow& b) {
  return a.action == b.action && a.guard == b.guard && a.values == b.values;
}
bool eq(const ApplicationEntry& a, const ApplicationEntry& b) { return a.name == b.name && a.text == b.text; }
bool eq(const GradientMatrix& a, const GradientMatrix& b) { return a == b; }

template <typename Map>
bool map_eq(const Map& a, const Map& b) {
  if (a.size() != b.size()) return false;
  for (auto ia = a.begin(), ib = b.begin(); ia != a.end(); ++ia, ++ib)
    if (ia->first != ib->first || !eq(ia->second, ib->second)) return false;
  return true;
}

template <typename Vec>
bool vec_eq(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!eq(a[i], b[i])) return false;
  return true;
}

}  // namespace

bool structurally_equal(const Model& a, const Model& b) {
  return map_eq(a.activities, b.activities) && map_eq(a.factors, b.factors) && map_eq(a.modes, b.modes) &&
         map_eq(a.items, b.items) && map_eq(a.matrices, b.matrices) &&
         a.weights.columns == b.weights.columns && vec_eq(a.weights.rows, b.weights.rows) &&
         vec_eq(a.application, b.application) && a.application_name == b.application_name;
}

}  // namespace riskctl
