#include <functional>
#include <map>
#include <optional>
#include <set>

#include "gcl_syntax.hpp"

namespace riskctl::gcl {

namespace {

using detail::Parser;
using detail::Tok;
using detail::Token;

const std::set<std::string, std::less<>> kReserved = {
    "module", "endmodule", "const", "global", "formula", "label", "rewards", "endrewards", "init",
    "endinit", "true", "false", "bool", "int", "double", "mdp", "dtmc", "nondeterministic", "probabilistic"};

bool starts_assignment(const Parser& p) { return p.at("(") && p.peek(1).kind == Tok::Ident && p.at("'", 2); }

std::vector<Assignment> assignments(Parser& p) {
  std::vector<Assignment> out;
  if (p.at("true") && !starts_assignment(p)) {
    p.next();
    return out;
  }
  do {
    p.expect("(");
    Assignment a;
    a.var = p.expect_ident("variable name in update");
    p.expect("'");
    p.expect("=");
    a.value = p.expr();
    p.expect(")");
    out.push_back(std::move(a));
  } while (p.accept("&"));
  return out;
}

std::vector<Branch> branches(Parser& p) {
  std::vector<Branch> out;
  do {
    Branch b;
    if (!starts_assignment(p) && !(p.at("true") && (p.at(";", 1) || p.at("+", 1)))) {
      b.prob = p.expr();
      p.expect(":");
    }
    b.updates = assignments(p);
    out.push_back(std::move(b));
  } while (p.accept("+"));
  return out;
}

VarDecl var_decl(Parser& p, const std::string& module) {
  VarDecl v;
  v.pos = p.peek().pos;
  v.name = p.expect_ident("variable name");
  v.module = module;
  p.expect(":");
  if (p.accept("bool")) {
    v.is_bool = true;
  } else if (p.at("int")) {
    p.fail("unsupported feature: unbounded integer variable " + v.name);
  } else if (p.at("clock")) {
    p.fail("unsupported feature: clock variable " + v.name);
  } else {
    p.expect("[");
    v.low = p.expr();
    p.expect("..");
    v.high = p.expr();
    p.expect("]");
  }
  if (p.accept("init")) v.init = p.expr();
  p.expect(";");
  return v;
}

Command command(Parser& p) {
  Command c;
  c.pos = p.peek().pos;
  p.expect("[");
  if (p.peek().kind == Tok::Ident) c.action = p.next().text;
  p.expect("]");
  c.guard = p.expr();
  p.expect("->");
  c.branches = branches(p);
  p.expect(";");
  return c;
}

Module module(Parser& p) {
  Module m;
  m.pos = p.peek().pos;
  p.expect("module");
  m.name = p.expect_ident("module name");
  if (p.at("=")) p.fail("unsupported feature: module renaming");
  while (!p.accept("endmodule")) {
    if (p.at_end()) p.fail("missing endmodule for module " + m.name);
    if (p.at("[")) {
      m.commands.push_back(command(p));
    } else if (p.at("invariant")) {
      p.fail("unsupported feature: invariant");
    } else {
      m.vars.push_back(var_decl(p, m.name));
    }
  }
  return m;
}

RewardDecl rewards(Parser& p) {
  RewardDecl r;
  r.pos = p.peek().pos;
  p.expect("rewards");
  if (p.peek().kind == Tok::String) r.name = p.next().text;
  while (!p.accept("endrewards")) {
    if (p.at_end()) p.fail("missing endrewards");
    RewardItem item;
    item.pos = p.peek().pos;
    if (p.accept("[")) {
      item.action = p.peek().kind == Tok::Ident ? p.next().text : std::string();
      p.expect("]");
    }
    item.guard = p.expr();
    p.expect(":");
    item.value = p.expr();
    p.expect(";");
    r.items.push_back(std::move(item));
  }
  return r;
}

// Bounds and initial values are checked eagerly when every constant they use
// has a literal definition; anything else is left to the compile step.
void check_ranges(const GclProgram& prog) {
  std::map<std::string, std::int64_t> known;
  std::function<std::optional<std::int64_t>(const Expr&)> ev = [&](const Expr& e) -> std::optional<std::int64_t> {
    switch (e.op) {
      case Op::IntLit: return std::stoll(e.text);
      case Op::Ident: {
        auto it = known.find(e.text);
        if (it == known.end()) return std::nullopt;
        return it->second;
      }
      case Op::Neg: {
        auto a = ev(*e.args[0]);
        if (!a) return std::nullopt;
        return -*a;
      }
      case Op::Add:
      case Op::Sub:
      case Op::Mul: {
        auto a = ev(*e.args[0]), b = ev(*e.args[1]);
        if (!a || !b) return std::nullopt;
        return e.op == Op::Add ? *a + *b : e.op == Op::Sub ? *a - *b : *a * *b;
      }
      default: return std::nullopt;
    }
  };
  for (const auto& c : prog.constants)
    if (c.type == ValueType::Int && c.value)
      if (auto v = ev(*c.value)) known[c.name] = *v;
  auto check = [&](const VarDecl& v) {
    if (v.is_bool || !v.low || !v.high) return;
    auto lo = ev(*v.low), hi = ev(*v.high);
    if (lo && hi && *lo > *hi) throw ParseError(v.pos, "empty range for variable " + v.name);
    if (!v.init) return;
    auto in = ev(*v.init);
    if (lo && hi && in && (*in < *lo || *in > *hi))
      throw ParseError(v.init->pos, "initial value " + std::to_string(*in) + " of " + v.name + " outside [" +
                                        std::to_string(*lo) + ".." + std::to_string(*hi) + "]");
  };
  for (const auto& v : prog.globals) check(v);
  for (const auto& m : prog.modules)
    for (const auto& v : m.vars) check(v);
}

}  // namespace

GclProgram parse_gcl(std::string_view text, const std::string& file) {
  Parser p(detail::lex(text, file));
  GclProgram prog;
  bool typed = false;
  while (!p.at_end()) {
    const Token& t = p.peek();
    if (t.kind != Tok::Ident) p.fail("unexpected '" + t.text + "' at top level");
    const std::string& kw = t.text;
    if (kw == "mdp" || kw == "nondeterministic" || kw == "dtmc" || kw == "probabilistic") {
      if (typed) p.fail("model type declared twice");
      typed = true;
      prog.model_type = (kw == "dtmc" || kw == "probabilistic") ? "dtmc" : "mdp";
      p.next();
    } else if (kw == "ctmc" || kw == "stochastic" || kw == "pta" || kw == "ctmdp" || kw == "smg" || kw == "pomdp" ||
               kw == "popta" || kw == "lts" || kw == "ipomdp" || kw == "idtmc" || kw == "imdp") {
      p.fail("unsupported feature: model type " + kw);
    } else if (kw == "const") {
      p.next();
      ConstDecl c;
      c.pos = t.pos;
      if (p.accept("double")) {
        c.type = ValueType::Double;
      } else if (p.accept("bool")) {
        c.type = ValueType::Bool;
      } else {
        p.accept("int");
      }
      c.name = p.expect_ident("constant name");
      if (p.accept("=")) c.value = p.expr();
      p.expect(";");
      prog.constants.push_back(std::move(c));
    } else if (kw == "global") {
      p.next();
      prog.globals.push_back(var_decl(p, ""));
    } else if (kw == "formula") {
      p.next();
      NamedExpr f;
      f.pos = t.pos;
      f.name = p.expect_ident("formula name");
      p.expect("=");
      f.expr = p.expr();
      p.expect(";");
      prog.formulas.push_back(std::move(f));
    } else if (kw == "label") {
      p.next();
      NamedExpr l;
      l.pos = t.pos;
      l.name = p.expect_string("quoted label name");
      p.expect("=");
      l.expr = p.expr();
      p.expect(";");
      prog.labels.push_back(std::move(l));
    } else if (kw == "module") {
      prog.modules.push_back(module(p));
    } else if (kw == "rewards") {
      prog.rewards.push_back(rewards(p));
    } else if (kw == "init") {
      p.fail("unsupported feature: init...endinit block");
    } else if (kw == "system") {
      p.fail("unsupported feature: system...endsystem block");
    } else if (kw == "player") {
      p.fail("unsupported feature: player declaration");
    } else if (kw == "observables") {
      p.fail("unsupported feature: observables");
    } else {
      p.fail("unexpected '" + kw + "' at top level");
    }
  }

  // Names share one namespace.
  std::map<std::string, SourcePos> seen;
  auto claim = [&](const std::string& name, const SourcePos& pos) {
    if (kReserved.count(name)) throw ParseError(pos, "reserved word used as name: " + name);
    auto [it, fresh] = seen.emplace(name, pos);
    if (!fresh) throw ParseError(pos, "duplicate declaration of " + name + " (first at " + it->second.str() + ")");
  };
  for (const auto& c : prog.constants) claim(c.name, c.pos);
  for (const auto& f : prog.formulas) claim(f.name, f.pos);
  for (const auto& v : prog.globals) claim(v.name, v.pos);
  std::set<std::string> module_names;
  for (const auto& m : prog.modules) {
    if (!module_names.insert(m.name).second) throw ParseError(m.pos, "duplicate module " + m.name);
    for (const auto& v : m.vars) claim(v.name, v.pos);
  }
  std::set<std::string> label_names;
  for (const auto& l : prog.labels) {
    if (l.name == "init" || l.name == "deadlock") throw ParseError(l.pos, "label name \"" + l.name + "\" is built in");
    if (!label_names.insert(l.name).second) throw ParseError(l.pos, "duplicate label \"" + l.name + "\"");
  }
  check_ranges(prog);
  return prog;
}

std::vector<Assignment> parse_update(std::string_view text, const std::string& file) {
  Parser p(detail::lex(text, file));
  auto out = assignments(p);
  if (!p.at_end()) p.fail("unexpected '" + p.peek().text + "' after update");
  return out;
}

}  // namespace riskctl::gcl
