#pragma once

// Lexer and recursive-descent expression parser shared by the model and
// property parsers. Not installed.

#include <string>
#include <string_view>
#include <vector>

#include "riskctl/gcl.hpp"

namespace riskctl::gcl::detail {

enum class Tok { Ident, Int, Double, String, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourcePos pos;
};

std::vector<Token> lex(std::string_view text, const std::string& file);

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  const Token& peek(std::size_t k = 0) const;
  bool at_end() const { return peek().kind == Tok::End; }
  /// True when the next token is the punctuation or identifier `s`.
  bool at(std::string_view s, std::size_t k = 0) const;
  bool accept(std::string_view s);
  const Token& expect(std::string_view s);
  const Token& next();
  std::string expect_ident(const char* what);
  std::string expect_string(const char* what);
  [[noreturn]] void fail(const std::string& msg) const;
  [[noreturn]] void fail_at(const Token& t, const std::string& msg) const;

  ExprPtr expr();

 private:
  ExprPtr ite();
  ExprPtr implies();
  ExprPtr iff();
  ExprPtr disj();
  ExprPtr conj();
  ExprPtr negation();
  ExprPtr equality();
  ExprPtr relational();
  ExprPtr additive();
  ExprPtr multiplicative();
  ExprPtr unary();
  ExprPtr primary();

  std::vector<Token> toks_;
  std::size_t i_ = 0;
};

ExprPtr make(Op op, SourcePos pos, std::vector<ExprPtr> args, std::string text = {});

}  // namespace riskctl::gcl::detail
