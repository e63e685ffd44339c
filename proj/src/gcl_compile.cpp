#include <algorithm>
#include <cmath>
#include <set>

#include "gcl_syntax.hpp"

namespace riskctl::gcl {

const char* type_name(ValueType t) noexcept {
  switch (t) {
    case ValueType::Int: return "int";
    case ValueType::Double: return "double";
    case ValueType::Bool: return "bool";
  }
  return "?";
}

std::string Value::str() const {
  switch (type) {
    case ValueType::Int: return std::to_string(i);
    case ValueType::Bool: return i ? "true" : "false";
    case ValueType::Double: return format_double(d);
  }
  return "?";
}

bool Value::operator==(const Value& o) const {
  if (type != o.type) return false;
  return type == ValueType::Double ? d == o.d : i == o.i;
}

namespace {

bool numeric(ValueType t) { return t != ValueType::Bool; }

Node literal(Value v) {
  Node n;
  n.type = v.type;
  n.op = v.type == ValueType::Int ? Op::IntLit : v.type == ValueType::Double ? Op::DoubleLit : Op::BoolLit;
  n.constant = v;
  return n;
}

bool is_literal(const Node& n) { return n.op == Op::IntLit || n.op == Op::DoubleLit || n.op == Op::BoolLit; }

[[noreturn]] void type_error(const Expr& e, const std::string& msg) {
  throw ModelError(e.pos.str() + ": " + msg + " in '" + to_string(e) + "'");
}

}  // namespace

Value eval(const Node& n, const EvalContext& ctx) {
  switch (n.op) {
    case Op::IntLit:
    case Op::DoubleLit:
    case Op::BoolLit: return n.constant;
    case Op::Ident: {
      int v = ctx.vars[n.slot];
      return n.type == ValueType::Bool ? Value::of_bool(v != 0) : Value::of_int(v);
    }
    case Op::Label: return Value::of_bool((*ctx.labels)[n.slot][ctx.state]);
    case Op::Not: return Value::of_bool(!eval(n.args[0], ctx).as_bool());
    case Op::Neg: {
      Value a = eval(n.args[0], ctx);
      return a.type == ValueType::Double ? Value::of_double(-a.d) : Value::of_int(-a.i);
    }
    case Op::And: return Value::of_bool(eval(n.args[0], ctx).as_bool() && eval(n.args[1], ctx).as_bool());
    case Op::Or: return Value::of_bool(eval(n.args[0], ctx).as_bool() || eval(n.args[1], ctx).as_bool());
    case Op::Implies: return Value::of_bool(!eval(n.args[0], ctx).as_bool() || eval(n.args[1], ctx).as_bool());
    case Op::Iff: return Value::of_bool(eval(n.args[0], ctx).as_bool() == eval(n.args[1], ctx).as_bool());
    case Op::Ite: {
      Value v = eval(n.args[0], ctx).as_bool() ? eval(n.args[1], ctx) : eval(n.args[2], ctx);
      if (n.type == ValueType::Double && v.type != ValueType::Double) return Value::of_double(v.as_double());
      return v;
    }
    default: break;
  }
  Value a = eval(n.args[0], ctx), b = eval(n.args[1], ctx);
  bool real = a.type == ValueType::Double || b.type == ValueType::Double;
  switch (n.op) {
    case Op::Add: return real ? Value::of_double(a.as_double() + b.as_double()) : Value::of_int(a.i + b.i);
    case Op::Sub: return real ? Value::of_double(a.as_double() - b.as_double()) : Value::of_int(a.i - b.i);
    case Op::Mul: return real ? Value::of_double(a.as_double() * b.as_double()) : Value::of_int(a.i * b.i);
    case Op::Div: return Value::of_double(a.as_double() / b.as_double());
    case Op::Lt: return Value::of_bool(real ? a.as_double() < b.as_double() : a.i < b.i);
    case Op::Le: return Value::of_bool(real ? a.as_double() <= b.as_double() : a.i <= b.i);
    case Op::Gt: return Value::of_bool(real ? a.as_double() > b.as_double() : a.i > b.i);
    case Op::Ge: return Value::of_bool(real ? a.as_double() >= b.as_double() : a.i >= b.i);
    case Op::Eq: return Value::of_bool(real ? a.as_double() == b.as_double() : a.i == b.i);
    case Op::Ne: return Value::of_bool(real ? a.as_double() != b.as_double() : a.i != b.i);
    default: break;
  }
  throw AnalysisError("cannot evaluate expression node");
}

std::optional<std::size_t> CompiledProgram::var_index(const std::string& name) const {
  auto it = var_slots_.find(name);
  if (it == var_slots_.end()) return std::nullopt;
  return it->second;
}

Node CompiledProgram::compile(const Expr& e, const std::vector<std::string>* label_names) const {
  std::vector<std::string> expanding;
  return compile_rec(e, label_names, expanding);
}

Node CompiledProgram::compile_rec(const Expr& e, const std::vector<std::string>* label_names,
                                  std::vector<std::string>& expanding) const {
  Node n;
  n.op = e.op;
  switch (e.op) {
    case Op::IntLit: {
      std::int64_t v = 0;
      try {
        v = std::stoll(e.text);
      } catch (const std::exception&) {
        type_error(e, "integer literal out of range");
      }
      return literal(Value::of_int(v));
    }
    case Op::DoubleLit: return literal(Value::of_double(parse_double(e.text)));
    case Op::BoolLit: return literal(Value::of_bool(e.text == "true"));
    case Op::Ident: {
      if (auto it = var_slots_.find(e.text); it != var_slots_.end()) {
        n.slot = it->second;
        n.type = vars_[n.slot].is_bool ? ValueType::Bool : ValueType::Int;
        return n;
      }
      if (auto it = consts_.find(e.text); it != consts_.end()) return literal(it->second);
      if (auto it = formulas_.find(e.text); it != formulas_.end()) {
        if (std::find(expanding.begin(), expanding.end(), e.text) != expanding.end()) {
          std::string chain;
          for (const auto& f : expanding) chain += f + " -> ";
          throw ModelError(e.pos.str() + ": cyclic formula definition: " + chain + e.text);
        }
        expanding.push_back(e.text);
        Node inner = compile_rec(*it->second, label_names, expanding);
        expanding.pop_back();
        return inner;
      }
      type_error(e, "unknown identifier " + e.text);
    }
    case Op::Label: {
      if (label_names) {
        auto it = std::find(label_names->begin(), label_names->end(), e.text);
        if (it == label_names->end()) type_error(e, "unknown label \"" + e.text + "\"");
        n.slot = static_cast<std::size_t>(it - label_names->begin());
        n.type = ValueType::Bool;
        return n;
      }
      auto it = label_exprs_.find(e.text);
      if (it == label_exprs_.end()) type_error(e, "unknown label \"" + e.text + "\"");
      return compile_rec(*it->second, label_names, expanding);
    }
    default: break;
  }
  for (const auto& a : e.args) n.args.push_back(compile_rec(*a, label_names, expanding));
  auto t = [&](std::size_t k) { return n.args[k].type; };
  switch (e.op) {
    case Op::Not:
      if (t(0) != ValueType::Bool) type_error(e, "operand of ! must be bool");
      n.type = ValueType::Bool;
      break;
    case Op::Neg:
      if (!numeric(t(0))) type_error(e, "operand of unary - must be numeric");
      n.type = t(0);
      break;
    case Op::And:
    case Op::Or:
    case Op::Iff:
    case Op::Implies:
      if (t(0) != ValueType::Bool || t(1) != ValueType::Bool) type_error(e, "boolean operator applied to numbers");
      n.type = ValueType::Bool;
      break;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
      if (!numeric(t(0)) || !numeric(t(1))) type_error(e, "arithmetic on bool");
      n.type = (t(0) == ValueType::Double || t(1) == ValueType::Double) ? ValueType::Double : ValueType::Int;
      break;
    case Op::Div:
      if (!numeric(t(0)) || !numeric(t(1))) type_error(e, "arithmetic on bool");
      if (t(0) == ValueType::Int && t(1) == ValueType::Int) type_error(e, "integer division is not supported");
      n.type = ValueType::Double;
      break;
    case Op::Lt:
    case Op::Le:
    case Op::Gt:
    case Op::Ge:
      if (!numeric(t(0)) || !numeric(t(1))) type_error(e, "relational operator on bool");
      n.type = ValueType::Bool;
      break;
    case Op::Eq:
    case Op::Ne:
      if (numeric(t(0)) != numeric(t(1))) type_error(e, "comparison of bool with number");
      n.type = ValueType::Bool;
      break;
    case Op::Ite:
      if (t(0) != ValueType::Bool) type_error(e, "condition of ?: must be bool");
      if (t(1) == t(2)) {
        n.type = t(1);
      } else if (numeric(t(1)) && numeric(t(2))) {
        n.type = ValueType::Double;
      } else {
        type_error(e, "arms of ?: have incompatible types");
      }
      break;
    default: break;
  }
  if (std::all_of(n.args.begin(), n.args.end(), is_literal)) {
    Value v = eval(n, EvalContext{});
    if (n.type == ValueType::Double && v.type != ValueType::Double) v = Value::of_double(v.as_double());
    return literal(v);
  }
  return n;
}

CompiledProgram::CompiledProgram(const GclProgram& prog, const std::map<std::string, Value>& overrides) {
  std::set<std::string> declared;
  for (const auto& c : prog.constants) declared.insert(c.name);
  for (const auto& [name, v] : overrides)
    if (!declared.count(name)) throw ModelError("no constant named " + name + " to define");

  for (const auto& f : prog.formulas) formulas_[f.name] = f.expr;
  for (const auto& l : prog.labels) label_exprs_[l.name] = l.expr;

  auto coerce = [](const ConstDecl& c, Value v) {
    if (c.type == ValueType::Double && v.type == ValueType::Int) return Value::of_double(static_cast<double>(v.i));
    if (v.type != c.type)
      throw ModelError(c.pos.str() + ": constant " + c.name + " of type " + type_name(c.type) + " given a " +
                       type_name(v.type) + " value");
    return v;
  };
  for (const auto& c : prog.constants) {
    if (auto it = overrides.find(c.name); it != overrides.end()) {
      consts_[c.name] = coerce(c, it->second);
    } else if (c.value) {
      Node n = compile(*c.value);
      if (!is_literal(n)) throw ModelError(c.pos.str() + ": constant " + c.name + " is not a constant expression");
      consts_[c.name] = coerce(c, n.constant);
    } else {
      throw ModelError(c.pos.str() + ": constant " + c.name + " is undefined");
    }
  }

  auto int_const = [&](const ExprPtr& e, const std::string& what) -> int {
    Node n = compile(*e);
    if (!is_literal(n) || n.type != ValueType::Int) throw ModelError(e->pos.str() + ": " + what + " must be a constant integer");
    return static_cast<int>(n.constant.i);
  };
  auto add_var = [&](const VarDecl& v) {
    VarInfo info{v.name, v.is_bool, 0, 1};
    int init = 0;
    if (!v.is_bool) {
      info.low = int_const(v.low, "lower bound of " + v.name);
      info.high = int_const(v.high, "upper bound of " + v.name);
      if (info.low > info.high) throw ModelError(v.pos.str() + ": empty range for variable " + v.name);
      init = v.init ? int_const(v.init, "initial value of " + v.name) : info.low;
      if (init < info.low || init > info.high)
        throw ModelError(v.pos.str() + ": initial value of " + v.name + " out of range");
    } else if (v.init) {
      Node n = compile(*v.init);
      if (!is_literal(n) || n.type != ValueType::Bool)
        throw ModelError(v.pos.str() + ": initial value of " + v.name + " must be a constant bool");
      init = n.constant.as_bool() ? 1 : 0;
    }
    var_slots_[v.name] = vars_.size();
    vars_.push_back(info);
    var_modules_.push_back(v.module);
    init_.push_back(init);
  };
  for (const auto& v : prog.globals) add_var(v);
  for (const auto& m : prog.modules)
    for (const auto& v : m.vars) add_var(v);

  for (std::size_t mi = 0; mi < prog.modules.size(); ++mi) {
    const Module& m = prog.modules[mi];
    modules_.push_back(m.name);
    for (const auto& c : m.commands) {
      CompiledCommand cc;
      cc.module = mi;
      cc.pos = c.pos;
      if (!c.action.empty()) {
        auto it = std::find(actions_.begin(), actions_.end(), c.action);
        if (it == actions_.end()) it = actions_.insert(actions_.end(), c.action);
        cc.action = static_cast<std::size_t>(it - actions_.begin());
      }
      cc.guard = compile(*c.guard);
      if (cc.guard.type != ValueType::Bool) type_error(*c.guard, "guard must be bool");
      for (const auto& b : c.branches) {
        CompiledCommand::Branch cb;
        if (b.prob) {
          cb.prob = compile(*b.prob);
          if (!numeric(cb.prob.type)) type_error(*b.prob, "probability must be numeric");
        } else {
          cb.prob = literal(Value::of_int(1));
        }
        std::set<std::size_t> written;
        for (const auto& a : b.updates) {
          auto slot = var_index(a.var);
          if (!slot) throw ModelError(c.pos.str() + ": update of undeclared variable " + a.var);
          const std::string& owner = var_modules_[*slot];
          if (!owner.empty() && owner != m.name)
            throw ModelError(c.pos.str() + ": module " + m.name + " cannot write variable " + a.var + " of module " +
                             owner);
          if (!written.insert(*slot).second)
            throw ModelError(c.pos.str() + ": variable " + a.var + " assigned twice in one update");
          Node val = compile(*a.value);
          bool want_bool = vars_[*slot].is_bool;
          if (want_bool ? val.type != ValueType::Bool : val.type != ValueType::Int)
            type_error(*a.value, std::string("value for ") + a.var + " must be " + (want_bool ? "bool" : "int"));
          cb.updates.emplace_back(*slot, std::move(val));
        }
        cc.branches.push_back(std::move(cb));
      }
      commands_.push_back(std::move(cc));
    }
  }

  for (const auto& l : prog.labels) {
    Node n = compile(*l.expr);
    if (n.type != ValueType::Bool) type_error(*l.expr, "label \"" + l.name + "\" must be bool");
    labels_.push_back(Labelled{l.name, std::move(n)});
  }

  for (const auto& r : prog.rewards) {
    Reward cr;
    cr.name = r.name;
    for (const auto& item : r.items) {
      Reward::Item ci;
      ci.transition = item.action.has_value();
      if (item.action) ci.action = *item.action;
      ci.guard = compile(*item.guard);
      if (ci.guard.type != ValueType::Bool) type_error(*item.guard, "reward guard must be bool");
      ci.value = compile(*item.value);
      if (!numeric(ci.value.type)) type_error(*item.value, "reward value must be numeric");
      cr.items.push_back(std::move(ci));
    }
    rewards_.push_back(std::move(cr));
  }
}

Value eval_expr(const GclProgram& program, const std::map<std::string, int>& valuation, std::string_view text) {
  CompiledProgram cp(program);
  std::vector<int> state = cp.initial_state();
  for (const auto& [name, v] : valuation) {
    auto slot = cp.var_index(name);
    if (!slot) throw ModelError("unknown variable " + name);
    state[*slot] = v;
  }
  Node n = cp.compile(*parse_expression(text));
  EvalContext ctx;
  ctx.vars = state.data();
  return eval(n, ctx);
}

}  // namespace riskctl::gcl
