#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "riskctl/dsl.hpp"

namespace riskctl {
namespace {

enum class Tok { Ident, Number, String, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourcePos pos;
};

class Lexer {
 public:
  Lexer(std::string_view text, std::string file) : src_(text), file_(std::move(file)) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t;
      t.pos = here();
      if (i_ >= src_.size()) {
        t.kind = Tok::End;
        out.push_back(t);
        return out;
      }
      char c = src_[i_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        t.kind = Tok::Ident;
        while (i_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[i_])) || src_[i_] == '_'))
          t.text += take();
      } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                 (c == '.' && i_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_ + 1])))) {
        t.kind = Tok::Number;
        while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) t.text += take();
        if (i_ < src_.size() && src_[i_] == '.') {
          t.text += take();
          while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) t.text += take();
        }
        if (i_ < src_.size() && (src_[i_] == 'e' || src_[i_] == 'E')) {
          t.text += take();
          if (i_ < src_.size() && (src_[i_] == '+' || src_[i_] == '-')) t.text += take();
          while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) t.text += take();
        }
      } else if (c == '"') {
        t.kind = Tok::String;
        take();
        for (;;) {
          if (i_ >= src_.size()) throw ParseError(t.pos, "unterminated string literal");
          char d = take();
          if (d == '"') break;
          if (d == '\\' && i_ < src_.size()) d = take();
          t.text += d;
        }
      } else if (std::string_view("{}();,.=:|-").find(c) != std::string_view::npos) {
        t.kind = Tok::Punct;
        t.text = std::string(1, take());
      } else {
        throw ParseError(t.pos, std::string("unexpected character '") + c + "'");
      }
      out.push_back(std::move(t));
    }
  }

 private:
  SourcePos here() const { return SourcePos{file_, line_, col_}; }

  char take() {
    char c = src_[i_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_space() {
    while (i_ < src_.size()) {
      char c = src_[i_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        take();
      } else if (c == '/' && i_ + 1 < src_.size() && src_[i_ + 1] == '/') {
        while (i_ < src_.size() && src_[i_] != '\n') take();
      } else if (c == '/' && i_ + 1 < src_.size() && src_[i_ + 1] == '*') {
        SourcePos start = here();
        take();
        take();
        while (i_ + 1 < src_.size() && !(src_[i_] == '*' && src_[i_ + 1] == '/')) take();
        if (i_ + 1 >= src_.size()) throw ParseError(start, "unterminated comment");
        take();
        take();
      } else {
        break;
      }
    }
  }

  std::string_view src_;
  std::string file_;
  std::size_t i_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

class Parser {
 public:
  Parser(std::vector<Token> tokens, std::string stem, Model& model)
      : toks_(std::move(tokens)), stem_(std::move(stem)), m_(model) {}

  void parse_file() {
    while (!at_end()) toplevel();
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(p_ + ahead, toks_.size() - 1)];
  }
  bool at_end() const { return peek().kind == Tok::End; }
  bool is_punct(const char* s, std::size_t ahead = 0) const {
    return peek(ahead).kind == Tok::Punct && peek(ahead).text == s;
  }
  bool is_ident(const char* s, std::size_t ahead = 0) const {
    return peek(ahead).kind == Tok::Ident && peek(ahead).text == s;
  }
  Token next() { return toks_[std::min(p_++, toks_.size() - 1)]; }

  [[noreturn]] void fail(const std::string& what) const {
    const Token& t = peek();
    std::string got = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw ParseError(t.pos, what + ", found " + got);
  }

  void expect(const char* punct) {
    if (!is_punct(punct)) fail(std::string("expected '") + punct + "'");
    next();
  }
  bool accept(const char* punct) {
    if (!is_punct(punct)) return false;
    next();
    return true;
  }
  std::string ident(const char* what = "identifier") {
    if (peek().kind != Tok::Ident) fail(std::string("expected ") + what);
    return next().text;
  }
  std::string string_lit() {
    if (peek().kind != Tok::String) fail("expected string literal");
    return next().text;
  }
  std::string number_text() {
    bool neg = accept("-");
    if (peek().kind != Tok::Number) fail("expected number");
    return (neg ? "-" : "") + next().text;
  }
  double number() {
    SourcePos pos = peek().pos;
    std::string text = number_text();
    try {
      return parse_double(text);
    } catch (const Error&) {
      throw ParseError(pos, "malformed number '" + text + "'");
    }
  }
  int integer() {
    SourcePos pos = peek().pos;
    std::string text = number_text();
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != text.size()) throw ParseError(pos, "expected integer, found '" + text + "'");
    return v;
  }

  void toplevel() {
    const Token& t = peek();
    if (t.kind != Tok::Ident) fail("expected declaration");
    if (t.text == "Activity") return activity_block();
    if (t.text == "Application") return application_block();
    if (t.text == "Weights") return weights_block();
    if (t.text == "Distances") return distances_block();
    if (t.text == "mode") return mode_decl();
    if (is_ident("type", 1)) return item_decl();
    if (is_punct("{", 1) || (peek(1).kind == Tok::Ident && is_punct("{", 2)))
      throw ParseError(t.pos, "unknown block keyword '" + t.text + "'");
    factor_decl("");
  }

  void end_block() {
    expect("}");
    accept(";");
  }

  void activity_block() {
    SourcePos pos = next().pos;
    Activity a;
    a.pos = pos;
    a.name = peek().kind == Tok::Ident ? next().text : stem_;
    if (a.name.empty()) throw ParseError(pos, "unnamed Activity block without a file name");
    if (m_.activities.count(a.name)) throw ParseError(pos, "duplicate declaration of activity " + a.name);
    expect("{");
    m_.activities[a.name] = a;
    while (!is_punct("}")) {
      if (at_end()) fail("expected '}'");
      if (is_ident("include") || is_ident("successor")) {
        bool include = next().text == "include";
        auto& list = include ? m_.activities[a.name].includes : m_.activities[a.name].successors;
        do {
          list.push_back(ident("activity name"));
        } while (accept(","));
        expect(";");
      } else if (is_ident("mode")) {
        mode_decl();
      } else {
        std::string f = factor_decl(a.name);
        m_.activities[a.name].factors.push_back(f);
      }
    }
    end_block();
  }

  void application_block() {
    next();
    if (peek().kind == Tok::Ident) {
      std::string name = next().text;
      if (m_.application_name.empty()) m_.application_name = name;
    }
    expect("{");
    while (!is_punct("}")) {
      if (at_end()) fail("expected '}'");
      if (is_ident("mode")) {
        mode_decl();
      } else if (is_ident("type", 1)) {
        item_decl();
      } else {
        ApplicationEntry e;
        e.pos = peek().pos;
        e.name = ident("formula name");
        expect("=");
        e.text = string_lit();
        expect(";");
        if (m_.find_application(e.name))
          throw ParseError(e.pos, "duplicate declaration of application formula " + e.name);
        m_.application.push_back(std::move(e));
      }
    }
    end_block();
  }

  void weights_block() {
    next();
    if (peek().kind == Tok::Ident) next();  // block name, e.g. `rewards`
    expect("{");
    if (!is_ident("guard")) fail("expected column header starting with 'guard'");
    next();
    std::vector<std::string> columns;
    while (!is_punct(";")) columns.push_back(ident("column name"));
    expect(";");
    std::set<std::string> seen_here;
    while (!is_punct("}")) {
      if (at_end()) fail("expected '}'");
      SourcePos pos = peek().pos;
      std::string action = ident("action label");
      expect(":");
      std::vector<std::string> cells;
      while (peek().kind == Tok::String) cells.push_back(next().text);
      expect(";");
      if (cells.size() != columns.size() + 1)
        throw ParseError(pos, "row " + action + " has " + std::to_string(cells.size()) +
                                  " entries, expected " + std::to_string(columns.size() + 1));
      if (!seen_here.insert(action).second)
        throw ParseError(pos, "duplicate declaration of weight row " + action);
      merge_row(pos, action, columns, cells);
    }
    end_block();
  }

  void merge_row(const SourcePos& pos, const std::string& action,
                 const std::vector<std::string>& columns, const std::vector<std::string>& cells) {
    WeightTable& w = m_.weights;
    std::vector<std::size_t> idx;
    for (const auto& c : columns) {
      auto k = w.column_index(c);
      if (!k) {
        w.columns.push_back(c);
        for (auto& r : w.rows) r.values.push_back("none");
        k = w.columns.size() - 1;
      }
      idx.push_back(*k);
    }
    WeightRow* row = nullptr;
    for (auto& r : w.rows)
      if (r.action == action) row = &r;
    if (!row) {
      WeightRow fresh;
      fresh.action = action;
      fresh.guard = cells[0];
      fresh.pos = pos;
      fresh.values.assign(w.columns.size(), "none");
      w.rows.push_back(std::move(fresh));
      row = &w.rows.back();
    } else if (row->guard != cells[0]) {
      throw ParseError(pos, "conflicting guard for weight row " + action);
    }
    for (std::size_t i = 0; i < columns.size(); ++i) {
      std::string& slot = row->values[idx[i]];
      if (slot != "none" && cells[i + 1] != "none" && slot != cells[i + 1])
        throw ParseError(pos, "conflicting value for " + action + " in column " + columns[i]);
      if (cells[i + 1] != "none") slot = cells[i + 1];
    }
  }

  void distances_block() {
    SourcePos pos = next().pos;
    std::string dim = ident("matrix dimension");
    if (m_.matrices.count(dim)) throw ParseError(pos, "duplicate declaration of matrix " + dim);
    expect("{");
    std::vector<std::string> labels;
    std::vector<std::vector<int>> rows;
    while (!is_punct("}")) {
      if (at_end()) fail("expected '}'");
      labels.push_back(ident("mode label"));
      expect(":");
      std::vector<int> row;
      while (!is_punct(";")) row.push_back(integer());
      expect(";");
      rows.push_back(std::move(row));
    }
    end_block();
    try {
      m_.matrices[dim] = complete_matrix(dim, labels, rows);
    } catch (const ModelError& e) {
      throw ParseError(pos, e.what());
    }
  }

  ModeRef mode_ref() {
    ModeRef r;
    if (accept(".")) {
      r.dotted = true;
      r.mode = ident("mode name");
      return r;
    }
    std::string first = ident("mode name");
    if (accept(".")) {
      r.dotted = true;
      r.tag = first;
      r.mode = ident("mode name");
    } else {
      r.mode = first;
    }
    return r;
  }

  std::vector<ModeRef> mode_ref_list() {
    std::vector<ModeRef> out;
    expect("(");
    if (!is_punct(")")) {
      do {
        out.push_back(mode_ref());
      } while (accept(","));
    }
    expect(")");
    return out;
  }

  std::vector<std::string> name_list() {
    std::vector<std::string> out;
    expect("(");
    if (!is_punct(")")) {
      do {
        out.push_back(ident("factor name"));
      } while (accept(","));
    }
    expect(")");
    return out;
  }

  std::string factor_decl(const std::string& owner) {
    RiskFactor f;
    f.pos = peek().pos;
    f.name = ident("factor name");
    f.owner = owner;
    if (m_.factors.count(f.name)) throw ParseError(f.pos, "duplicate declaration of factor " + f.name);
    while (!accept(";")) {
      if (peek().kind != Tok::Ident) fail("expected factor attribute or ';'");
      Token key = next();
      const std::string& k = key.text;
      if (k == "final") {
        f.final = true;
        continue;
      }
      accept("=");
      if (k == "desc") {
        f.desc = string_lit();
      } else if (k == "guard") {
        f.guard = string_lit();
      } else if (k == "detectedBy") {
        f.detected_by = mode_ref_list();
      } else if (k == "mitigatedBy") {
        f.mitigated_by = mode_ref_list();
      } else if (k == "resumedBy") {
        f.resumed_by = mode_ref_list();
      } else if (k == "requires") {
        f.requires_ = name_list();
      } else if (k == "prevents") {
        f.prevents = name_list();
      } else if (k == "mitPreventsMit") {
        f.mit_prevents_mit = name_list();
      } else if (k == "requiresNOf") {
        RequiresNOf r;
        expect("(");
        r.threshold = integer();
        expect("|");
        do {
          r.factors.push_back(ident("factor name"));
        } while (accept(","));
        expect(")");
        f.requires_n_of = std::move(r);
      } else if (k == "mis") {
        f.mis = peek().kind == Tok::String ? string_lit() : ident("action label");
      } else if (k == "prob") {
        SourcePos pos = peek().pos;
        std::string text = number_text();
        try {
          f.prob = normalize_decimal(text);
        } catch (const Error&) {
          throw ParseError(pos, "prob must be a plain decimal literal, found '" + text + "'");
        }
      } else if (k == "sev") {
        f.sev = number();
      } else {
        throw ParseError(key.pos, "unknown factor attribute '" + k + "'");
      }
    }
    m_.factors[f.name] = f;
    return f.name;
  }

  void mode_decl() {
    next();
    Mode md;
    md.pos = peek().pos;
    md.name = ident("mode name");
    if (m_.modes.count(md.name)) throw ParseError(md.pos, "duplicate declaration of mode " + md.name);
    while (!accept(";")) {
      if (peek().kind != Tok::Ident) fail("expected mode attribute or ';'");
      Token key = next();
      const std::string& k = key.text;
      accept("=");
      if (k == "desc") {
        md.desc = string_lit();
      } else if (k == "guard") {
        md.guard = string_lit();
      } else if (k == "update") {
        md.update = string_lit();
      } else if (k == "target") {
        expect("(");
        ModeTarget t;
        t.variable = ident("state variable");
        expect("=");
        t.value = ident("mode value");
        expect(")");
        md.target = t;
      } else if (k == "embodiedBy") {
        bool paren = accept("(");
        do {
          md.embodied_by.push_back(ident("item name"));
        } while (accept(","));
        if (paren) expect(")");
      } else if (k == "disruption") {
        md.disruption = number();
      } else if (k == "nuisance") {
        md.nuisance = number();
      } else if (k == "effort") {
        md.effort = number();
      } else {
        throw ParseError(key.pos, "unknown mode attribute '" + k + "'");
      }
    }
    m_.modes[md.name] = md;
  }

  static std::vector<std::string> split_bar(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
      if (c == '|') {
        if (!cur.empty()) out.push_back(cur);
        cur.clear();
      } else if (!std::isspace(static_cast<unsigned char>(c))) {
        cur += c;
      }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
  }

  void item_decl() {
    Item it;
    it.pos = peek().pos;
    it.name = ident("item name");
    next();  // type
    SourcePos kpos = peek().pos;
    std::string kind = ident("item kind");
    if (kind == "AGENT") {
      it.kind = ItemKind::Agent;
    } else if (kind == "CONTROLLER") {
      it.kind = ItemKind::Controller;
    } else {
      throw ParseError(kpos, "unknown item kind '" + kind + "' (expected AGENT or CONTROLLER)");
    }
    if (m_.items.count(it.name)) throw ParseError(it.pos, "duplicate declaration of item " + it.name);
    while (!accept(";")) {
      std::string key = ident("item attribute");
      expect("=");
      std::string value = string_lit();
      if (key == "validActs") {
        it.valid_acts = split_bar(value);
      } else if (key == "hooks") {
        it.hooks = split_bar(value);
      } else {
        it.locals.emplace_back(key, value);
      }
    }
    m_.items[it.name] = it;
  }

  std::vector<Token> toks_;
  std::size_t p_ = 0;
  std::string stem_;
  Model& m_;
};

std::string file_stem(const std::string& filename) {
  return std::filesystem::path(filename).stem().string();
}

}  // namespace

Model parse_model(const std::vector<SourceFile>& sources) {
  Model m;
  for (const auto& src : sources) {
    Lexer lex(src.text, src.filename);
    Parser p(lex.run(), file_stem(src.filename), m);
    p.parse_file();
  }
  return m;
}

Model load_model_files(const std::vector<std::filesystem::path>& paths) {
  if (paths.empty()) throw Error("no model files given");
  std::vector<SourceFile> sources;
  std::set<std::filesystem::path> loaded;
  auto read = [&](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("cannot open model file " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    sources.push_back(SourceFile{p.string(), ss.str()});
    loaded.insert(std::filesystem::weakly_canonical(p));
  };
  for (const auto& p : paths) read(p);
  const std::filesystem::path dir = paths.front().parent_path();
  for (;;) {
    Model m = parse_model(sources);
    std::vector<std::filesystem::path> pending;
    auto want = [&](const std::string& name) {
      if (m.activities.count(name)) return;
      auto candidate = dir / (name + ".yap");
      if (!std::filesystem::exists(candidate)) return;
      if (loaded.count(std::filesystem::weakly_canonical(candidate))) return;
      if (std::find(pending.begin(), pending.end(), candidate) == pending.end()) pending.push_back(candidate);
    };
    for (const auto& [name, a] : m.activities) {
      for (const auto& i : a.includes) want(i);
      for (const auto& s : a.successors) want(s);
    }
    if (pending.empty()) return m;
    for (const auto& p : pending) read(p);
  }
}

}  // namespace riskctl
