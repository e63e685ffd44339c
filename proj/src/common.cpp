#include "riskctl/common.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <system_error>

namespace riskctl {

std::string SourcePos::str() const {
  std::string out = file.empty() ? std::string("<input>") : file;
  out += ':' + std::to_string(line) + ':' + std::to_string(column);
  return out;
}

ParseError::ParseError(SourcePos pos, const std::string& message)
    : Error(pos.str() + ": " + message), pos_(std::move(pos)), detail_(message) {}

std::string Diagnostic::str() const {
  return pos.str() + (severity == Severity::Error ? ": error: " : ": warning: ") + message;
}

std::string format_double(double value) {
  if (value == 0.0) return "0";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string format_real(double value) {
  std::string s = format_double(value);
  if (std::isfinite(value) && s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

double parse_double(std::string_view text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  // from_chars rejects a leading '+', and ".5" parses fine
  auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last)
    throw Error("not a number: '" + std::string(text) + "'");
  return value;
}

namespace {

struct Decimal {
  std::string int_part;
  std::string frac_part;
};

Decimal split_decimal(std::string_view text) {
  Decimal d;
  auto dot = text.find('.');
  d.int_part = std::string(text.substr(0, dot));
  if (dot != std::string_view::npos) d.frac_part = std::string(text.substr(dot + 1));
  auto digits = [](const std::string& s) {
    return std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
  };
  if (!digits(d.int_part) || !digits(d.frac_part) || (d.int_part.empty() && d.frac_part.empty()))
    throw Error("not a plain decimal literal: '" + std::string(text) + "'");
  return d;
}

}  // namespace

std::string normalize_decimal(std::string_view text) {
  Decimal d = split_decimal(text);
  auto first = d.int_part.find_first_not_of('0');
  d.int_part = first == std::string::npos ? "0" : d.int_part.substr(first);
  while (!d.frac_part.empty() && d.frac_part.back() == '0') d.frac_part.pop_back();
  return d.frac_part.empty() ? d.int_part : d.int_part + "." + d.frac_part;
}

std::string decimal_complement(std::string_view p) {
  Decimal d = split_decimal(normalize_decimal(p));
  if (d.int_part == "1" && d.frac_part.empty()) return "0";
  if (d.int_part != "0") throw Error("probability out of [0,1]: '" + std::string(p) + "'");
  if (d.frac_part.empty()) return "1";
  // 10^k - frac, written with k fractional digits
  std::string frac = d.frac_part;
  std::string out(frac.size(), '0');
  int borrow = 0;
  for (std::size_t i = frac.size(); i-- > 0;) {
    int minuend = (i + 1 == frac.size()) ? 10 : 9;
    int digit = minuend - (frac[i] - '0') - borrow;
    borrow = 0;
    out[i] = static_cast<char>('0' + digit);
  }
  while (!out.empty() && out.back() == '0') out.pop_back();
  return out.empty() ? "1" : "0." + out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace riskctl
