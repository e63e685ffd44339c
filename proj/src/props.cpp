#include "gcl_syntax.hpp"
#include "riskctl/synthesis.hpp"

namespace riskctl {

namespace {

using gcl::detail::Parser;
using gcl::detail::Tok;

bool is_cmp(const Parser& p) { return p.at("<") || p.at("<=") || p.at(">") || p.at(">="); }

Cmp cmp_of(const std::string& s) {
  if (s == "<") return Cmp::Lt;
  if (s == "<=") return Cmp::Le;
  if (s == ">") return Cmp::Gt;
  return Cmp::Ge;
}

const char* cmp_text(Cmp c) {
  switch (c) {
    case Cmp::Lt: return "<";
    case Cmp::Le: return "<=";
    case Cmp::Gt: return ">";
    case Cmp::Ge: return ">=";
    default: return "=?";
  }
}

// "=?", "max=?", "min=?" or a comparison with a threshold.
void operator_suffix(Parser& p, Query& q) {
  if (p.accept("max")) {
    q.opt = Objective::Max;
  } else if (p.accept("min")) {
    q.opt = Objective::Min;
  }
  if (p.accept("=")) {
    p.expect("?");
    return;
  }
  if (q.opt) p.fail("expected '=?' after max/min");
  if (!is_cmp(p)) p.fail("expected '=?' or a comparison");
  q.cmp = cmp_of(p.next().text);
  q.threshold = p.expr();
}

gcl::ExprPtr step_bound(Parser& p) {
  if (p.at("<")) p.fail("unsupported feature: strict step bound (use <=)");
  if (!p.accept("<=")) return nullptr;
  return p.expr();
}

PathFormula path(Parser& p) {
  PathFormula f;
  if (p.at("F") || p.at("G") || p.at("X")) {
    std::string op = p.next().text;
    f.kind = op == "F" ? PathFormula::Kind::Eventually : op == "G" ? PathFormula::Kind::Globally : PathFormula::Kind::Next;
    if (f.kind != PathFormula::Kind::Next) f.steps = step_bound(p);
    f.right = p.expr();
    return f;
  }
  f.left = p.expr();
  if (p.accept("U")) {
    f.kind = PathFormula::Kind::Until;
  } else if (p.accept("W")) {
    f.kind = PathFormula::Kind::WeakUntil;
  } else if (p.at("R")) {
    p.fail("unsupported feature: release operator");
  } else {
    p.fail("expected a path formula (F, G, X, U or W)");
  }
  f.steps = step_bound(p);
  f.right = p.expr();
  return f;
}

Query query(Parser& p) {
  Query q;
  const auto& t = p.peek();
  if (t.kind != Tok::Ident) p.fail("expected a property");
  std::string head = t.text;
  if (head == "P" || head == "Pmax" || head == "Pmin") {
    p.next();
    q.kind = Query::Kind::Prob;
    if (head == "Pmax") q.opt = Objective::Max;
    if (head == "Pmin") q.opt = Objective::Min;
    if (q.opt) {
      p.expect("=");
      p.expect("?");
    } else {
      operator_suffix(p, q);
    }
    p.expect("[");
    q.path = path(p);
    p.expect("]");
    return q;
  }
  if (head == "R" || head == "Rmax" || head == "Rmin") {
    p.next();
    q.kind = Query::Kind::Reward;
    if (head == "R" && p.accept("{")) {
      if (p.peek().kind != Tok::String) p.fail("unsupported feature: reward structure index (use a quoted name)");
      q.reward = p.next().text;
      p.expect("}");
    }
    if (head == "Rmax") q.opt = Objective::Max;
    if (head == "Rmin") q.opt = Objective::Min;
    if (q.opt) {
      p.expect("=");
      p.expect("?");
    } else {
      operator_suffix(p, q);
    }
    p.expect("[");
    if (!p.accept("C")) {
      const auto& r = p.peek();
      p.fail("unsupported feature: reward operator " + (r.kind == Tok::End ? std::string("<end>") : r.text) +
             " (only C and C<=t)");
    }
    q.horizon = step_bound(p);
    p.expect("]");
    return q;
  }
  if (head == "multi") {
    p.next();
    q.kind = Query::Kind::Multi;
    p.expect("(");
    do {
      q.args.push_back(query(p));
    } while (p.accept(","));
    p.expect(")");
    return q;
  }
  if (head == "filter") {
    p.next();
    q.kind = Query::Kind::Filter;
    p.expect("(");
    q.filter_op = p.expect_ident("filter operator");
    p.expect(",");
    q.args.push_back(query(p));
    if (p.accept(",")) {
      q.states = p.expr();
    } else {
      q.states = gcl::detail::make(gcl::Op::BoolLit, t.pos, {}, "true");
    }
    p.expect(")");
    return q;
  }
  if (head == "S" || head == "E" || head == "A") p.fail("unsupported feature: operator " + head);
  p.fail("expected P, R, multi or filter but found '" + head + "'");
}

}  // namespace

std::string to_string(const Query& q) {
  auto op = [&] {
    if (q.cmp != Cmp::Query) return std::string(cmp_text(q.cmp)) + gcl::to_string(*q.threshold);
    if (q.opt) return std::string(*q.opt == Objective::Max ? "max" : "min") + "=?";
    return std::string("=?");
  };
  auto bound = [](const gcl::ExprPtr& b) { return b ? "<=" + gcl::to_string(*b) : std::string(); };
  switch (q.kind) {
    case Query::Kind::Prob: {
      const auto& f = q.path;
      std::string body;
      switch (f.kind) {
        case PathFormula::Kind::Next: body = "X " + gcl::to_string(*f.right); break;
        case PathFormula::Kind::Eventually: body = "F" + bound(f.steps) + " " + gcl::to_string(*f.right); break;
        case PathFormula::Kind::Globally: body = "G" + bound(f.steps) + " " + gcl::to_string(*f.right); break;
        case PathFormula::Kind::Until:
          body = gcl::to_string(*f.left) + " U" + bound(f.steps) + " " + gcl::to_string(*f.right);
          break;
        case PathFormula::Kind::WeakUntil:
          body = gcl::to_string(*f.left) + " W" + bound(f.steps) + " " + gcl::to_string(*f.right);
          break;
      }
      return "P" + op() + " [ " + body + " ]";
    }
    case Query::Kind::Reward:
      return "R" + (q.reward.empty() ? std::string() : "{\"" + q.reward + "\"}") + op() + " [ C" + bound(q.horizon) +
             " ]";
    case Query::Kind::Multi: {
      std::vector<std::string> parts;
      for (const auto& a : q.args) parts.push_back(to_string(a));
      return "multi(" + join(parts, ", ") + ")";
    }
    case Query::Kind::Filter:
      return "filter(" + q.filter_op + ", " + to_string(q.args[0]) + ", " + gcl::to_string(*q.states) + ")";
  }
  return {};
}

PropertyFile parse_properties(std::string_view text, const std::string& file) {
  Parser p(gcl::detail::lex(text, file));
  PropertyFile out;
  while (!p.at_end()) {
    if (p.at("const")) {
      gcl::ConstDecl c;
      c.pos = p.next().pos;
      if (p.accept("double")) {
        c.type = gcl::ValueType::Double;
      } else if (p.accept("bool")) {
        c.type = gcl::ValueType::Bool;
      } else {
        p.accept("int");
      }
      c.name = p.expect_ident("constant name");
      if (p.accept("=")) c.value = p.expr();
      p.expect(";");
      out.constants.push_back(std::move(c));
      continue;
    }
    if (p.peek().kind == Tok::String && p.at(":", 1)) {
      p.next();
      p.next();
    }
    Query q = query(p);
    q.text = to_string(q);
    out.queries.push_back(std::move(q));
    p.accept(";");
  }
  return out;
}

Query parse_query(std::string_view text, const std::string& file) {
  Parser p(gcl::detail::lex(text, file));
  Query q = query(p);
  if (!p.at_end()) p.fail("unexpected '" + p.peek().text + "' after property");
  q.text = to_string(q);
  return q;
}

}  // namespace riskctl
