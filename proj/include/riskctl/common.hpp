#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace riskctl {

struct SourcePos {
  std::string file;
  std::size_t line = 0;
  std::size_t column = 0;

  std::string str() const;
  auto operator<=>(const SourcePos&) const = default;
};

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Syntax error in one of the input languages; the message carries the position.
class ParseError : public Error {
 public:
  ParseError(SourcePos pos, const std::string& message);
  const SourcePos& pos() const noexcept { return pos_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  SourcePos pos_;
  std::string detail_;
};

/// Semantic error in a model (unresolved names, cycles, type errors).
class ModelError : public Error {
 public:
  using Error::Error;
};

/// Failure of an analysis step (state cap, nonconvergence, bad probabilities).
class AnalysisError : public Error {
 public:
  using Error::Error;
};

enum class Severity { Warning, Error };

struct Diagnostic {
  SourcePos pos;
  Severity severity = Severity::Error;
  std::string message;

  std::string str() const;
  bool operator==(const Diagnostic&) const = default;
};

/// Shortest decimal text that parses back to the same double. Integral values
/// are printed without a decimal point ("1", not "1.0").
std::string format_double(double value);

/// Like format_double but always keeps a fractional part ("5.0").
std::string format_real(double value);

/// Parses a full-string decimal number; throws Error on trailing garbage.
double parse_double(std::string_view text);

/// Exact decimal complement 1 - p for a decimal literal p in [0,1], e.g.
/// "0.05" -> "0.95". Avoids binary rounding ("0.7" -> "0.3").
std::string decimal_complement(std::string_view p);

/// Normalises a decimal literal (".05" -> "0.05", "5." -> "5").
std::string normalize_decimal(std::string_view text);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace riskctl
