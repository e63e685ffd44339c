#include "gcl_syntax.hpp"

#include <cctype>

namespace riskctl::gcl {

namespace detail {

std::vector<Token> lex(std::string_view text, const std::string& file) {
  std::vector<Token> out;
  std::size_t i = 0, line = 1, col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < text.size(); ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  auto digit = [&](std::size_t k) { return k < text.size() && std::isdigit(static_cast<unsigned char>(text[k])); };
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    SourcePos pos{file, line, col};
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
      out.push_back({Tok::Ident, std::string(text.substr(i, j - i)), pos});
      advance(j - i);
      continue;
    }
    if (digit(i) || (c == '.' && digit(i + 1))) {
      std::size_t j = i;
      bool real = false;
      while (digit(j)) ++j;
      if (j < text.size() && text[j] == '.' && !(j + 1 < text.size() && text[j + 1] == '.')) {
        real = true;
        ++j;
        while (digit(j)) ++j;
      }
      if (j < text.size() && (text[j] == 'e' || text[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < text.size() && (text[k] == '+' || text[k] == '-')) ++k;
        if (digit(k)) {
          real = true;
          j = k;
          while (digit(j)) ++j;
        }
      }
      out.push_back({real ? Tok::Double : Tok::Int, std::string(text.substr(i, j - i)), pos});
      advance(j - i);
      continue;
    }
    if (c == '"') {
      std::size_t j = i + 1;
      while (j < text.size() && text[j] != '"' && text[j] != '\n') ++j;
      if (j >= text.size() || text[j] != '"') throw ParseError(pos, "unterminated string");
      out.push_back({Tok::String, std::string(text.substr(i + 1, j - i - 1)), pos});
      advance(j + 1 - i);
      continue;
    }
    static const char* multi[] = {"<=>", "->", "=>", "<=", ">=", "!=", ".."};
    bool matched = false;
    for (const char* m : multi) {
      std::string_view mv(m);
      if (text.substr(i, mv.size()) == mv) {
        out.push_back({Tok::Punct, std::string(mv), pos});
        advance(mv.size());
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (std::string_view("()[]{};:,'=<>+-*/&|!?").find(c) != std::string_view::npos) {
      out.push_back({Tok::Punct, std::string(1, c), pos});
      advance(1);
      continue;
    }
    throw ParseError(pos, std::string("unexpected character '") + c + "'");
  }
  out.push_back({Tok::End, "", SourcePos{file, line, col}});
  return out;
}

const Token& Parser::peek(std::size_t k) const {
  std::size_t j = i_ + k;
  return j < toks_.size() ? toks_[j] : toks_.back();
}

bool Parser::at(std::string_view s, std::size_t k) const {
  const Token& t = peek(k);
  return (t.kind == Tok::Punct || t.kind == Tok::Ident) && t.text == s;
}

bool Parser::accept(std::string_view s) {
  if (!at(s)) return false;
  ++i_;
  return true;
}

const Token& Parser::next() {
  const Token& t = peek();
  if (t.kind != Tok::End) ++i_;
  return t;
}

const Token& Parser::expect(std::string_view s) {
  if (!at(s)) {
    const Token& t = peek();
    fail("expected '" + std::string(s) + "' but found " + (t.kind == Tok::End ? "end of input" : "'" + t.text + "'"));
  }
  return next();
}

std::string Parser::expect_ident(const char* what) {
  if (peek().kind != Tok::Ident) fail(std::string("expected ") + what);
  return next().text;
}

std::string Parser::expect_string(const char* what) {
  if (peek().kind != Tok::String) fail(std::string("expected ") + what);
  return next().text;
}

void Parser::fail(const std::string& msg) const { throw ParseError(peek().pos, msg); }
void Parser::fail_at(const Token& t, const std::string& msg) const { throw ParseError(t.pos, msg); }

ExprPtr make(Op op, SourcePos pos, std::vector<ExprPtr> args, std::string text) {
  auto e = std::make_shared<Expr>();
  e->op = op;
  e->pos = std::move(pos);
  e->args = std::move(args);
  e->text = std::move(text);
  return e;
}

ExprPtr Parser::expr() { return ite(); }

ExprPtr Parser::ite() {
  ExprPtr c = implies();
  if (!at("?")) return c;
  SourcePos pos = next().pos;
  ExprPtr a = implies();
  expect(":");
  ExprPtr b = ite();
  return make(Op::Ite, pos, {c, a, b});
}

ExprPtr Parser::implies() {
  ExprPtr l = iff();
  if (!at("=>")) return l;
  SourcePos pos = next().pos;
  return make(Op::Implies, pos, {l, implies()});
}

ExprPtr Parser::iff() {
  ExprPtr l = disj();
  while (at("<=>")) {
    SourcePos pos = next().pos;
    l = make(Op::Iff, pos, {l, disj()});
  }
  return l;
}

ExprPtr Parser::disj() {
  ExprPtr l = conj();
  while (at("|")) {
    SourcePos pos = next().pos;
    l = make(Op::Or, pos, {l, conj()});
  }
  return l;
}

ExprPtr Parser::conj() {
  ExprPtr l = negation();
  while (at("&")) {
    SourcePos pos = next().pos;
    l = make(Op::And, pos, {l, negation()});
  }
  return l;
}

ExprPtr Parser::negation() {
  if (!at("!")) return equality();
  SourcePos pos = next().pos;
  return make(Op::Not, pos, {negation()});
}

ExprPtr Parser::equality() {
  ExprPtr l = relational();
  while (at("=") || at("!=")) {
    const Token& t = next();
    l = make(t.text == "=" ? Op::Eq : Op::Ne, t.pos, {l, relational()});
  }
  return l;
}

ExprPtr Parser::relational() {
  ExprPtr l = additive();
  while (at("<") || at("<=") || at(">") || at(">=")) {
    const Token& t = next();
    Op op = t.text == "<" ? Op::Lt : t.text == "<=" ? Op::Le : t.text == ">" ? Op::Gt : Op::Ge;
    l = make(op, t.pos, {l, additive()});
  }
  return l;
}

ExprPtr Parser::additive() {
  ExprPtr l = multiplicative();
  while (at("+") || at("-")) {
    const Token& t = next();
    l = make(t.text == "+" ? Op::Add : Op::Sub, t.pos, {l, multiplicative()});
  }
  return l;
}

ExprPtr Parser::multiplicative() {
  ExprPtr l = unary();
  while (at("*") || at("/")) {
    const Token& t = next();
    l = make(t.text == "*" ? Op::Mul : Op::Div, t.pos, {l, unary()});
  }
  return l;
}

ExprPtr Parser::unary() {
  if (!at("-")) return primary();
  SourcePos pos = next().pos;
  return make(Op::Neg, pos, {unary()});
}

ExprPtr Parser::primary() {
  const Token& t = peek();
  switch (t.kind) {
    case Tok::Int: next(); return make(Op::IntLit, t.pos, {}, t.text);
    case Tok::Double: next(); return make(Op::DoubleLit, t.pos, {}, t.text);
    case Tok::String: next(); return make(Op::Label, t.pos, {}, t.text);
    case Tok::Ident: {
      if (t.text == "true" || t.text == "false") {
        next();
        return make(Op::BoolLit, t.pos, {}, t.text);
      }
      if (at("(", 1)) fail("unsupported feature: function call " + t.text + "(...)");
      next();
      return make(Op::Ident, t.pos, {}, t.text);
    }
    case Tok::Punct:
      if (t.text == "(") {
        next();
        ExprPtr e = expr();
        expect(")");
        return e;
      }
      fail("unexpected '" + t.text + "' in expression");
    case Tok::End: fail("unexpected end of input in expression");
  }
  fail("bad expression");
}

}  // namespace detail

namespace {

int level(Op op) noexcept {
  switch (op) {
    case Op::Ite: return 1;
    case Op::Implies: return 2;
    case Op::Iff: return 3;
    case Op::Or: return 4;
    case Op::And: return 5;
    case Op::Not: return 6;
    case Op::Eq:
    case Op::Ne: return 7;
    case Op::Lt:
    case Op::Le:
    case Op::Gt:
    case Op::Ge: return 8;
    case Op::Add:
    case Op::Sub: return 9;
    case Op::Mul:
    case Op::Div: return 10;
    case Op::Neg: return 11;
    default: return 12;
  }
}

const char* symbol(Op op) {
  switch (op) {
    case Op::Mul: return "*";
    case Op::Div: return "/";
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Lt: return "<";
    case Op::Le: return "<=";
    case Op::Gt: return ">";
    case Op::Ge: return ">=";
    case Op::Eq: return "=";
    case Op::Ne: return "!=";
    case Op::And: return "&";
    case Op::Or: return "|";
    case Op::Iff: return "<=>";
    case Op::Implies: return "=>";
    default: return "?";
  }
}

std::string wrap(const Expr& e, bool paren) {
  std::string s = to_string(e);
  return paren ? "(" + s + ")" : s;
}

}  // namespace

int precedence(Op op) noexcept { return level(op); }

std::string to_string(const Expr& e) {
  int lv = level(e.op);
  switch (e.op) {
    case Op::IntLit:
    case Op::DoubleLit:
    case Op::BoolLit:
    case Op::Ident: return e.text;
    case Op::Label: return "\"" + e.text + "\"";
    case Op::Not: return "!" + wrap(*e.args[0], level(e.args[0]->op) < lv);
    case Op::Neg: return "-" + wrap(*e.args[0], level(e.args[0]->op) < lv);
    case Op::Ite:
      return wrap(*e.args[0], level(e.args[0]->op) <= lv) + "?" + wrap(*e.args[1], level(e.args[1]->op) <= lv) +
             ":" + wrap(*e.args[2], level(e.args[2]->op) < lv);
    case Op::Implies:
      return wrap(*e.args[0], level(e.args[0]->op) <= lv) + "=>" + wrap(*e.args[1], level(e.args[1]->op) < lv);
    default: {
      std::string sep = symbol(e.op);
      if (e.op == Op::And || e.op == Op::Or || e.op == Op::Iff) sep = " " + sep + " ";
      return wrap(*e.args[0], level(e.args[0]->op) < lv) + sep + wrap(*e.args[1], level(e.args[1]->op) <= lv);
    }
  }
}

ExprPtr parse_expression(std::string_view text, const std::string& file) {
  detail::Parser p(detail::lex(text, file));
  ExprPtr e = p.expr();
  if (!p.at_end()) p.fail("unexpected '" + p.peek().text + "' after expression");
  return e;
}

}  // namespace riskctl::gcl
