#include "riskctl/io_formats.hpp"

#include <climits>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>

namespace riskctl {

namespace {

[[noreturn]] void malformed(const std::string& file, std::size_t line, const std::string& msg) {
  throw ParseError(SourcePos{file, line, 1}, msg);
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(line);
  }
  return out;
}

std::vector<std::string> fields(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  std::string f;
  while (in >> f) out.push_back(f);
  return out;
}

bool blank(const std::string& s) { return s.find_first_not_of(" \t") == std::string::npos; }

std::optional<std::size_t> parse_index(const std::string& s) {
  if (s.empty() || s.size() > 18 || s.find_first_not_of("0123456789") != std::string::npos) return std::nullopt;
  return static_cast<std::size_t>(std::stoull(s));
}

std::optional<int> parse_int(const std::string& s) {
  std::size_t k = (!s.empty() && s[0] == '-') ? 1 : 0;
  if (s.size() == k || s.size() > 10 || s.find_first_not_of("0123456789", k) != std::string::npos) return std::nullopt;
  long long v = std::stoll(s);
  if (v < INT32_MIN || v > INT32_MAX) return std::nullopt;
  return static_cast<int>(v);
}

// "(a,b,c)" -> {"a","b","c"}
std::optional<std::vector<std::string>> tuple(const std::string& s) {
  if (s.size() < 2 || s.front() != '(' || s.back() != ')') return std::nullopt;
  std::vector<std::string> out;
  std::string inner = s.substr(1, s.size() - 2);
  if (inner.empty()) return out;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = inner.find(',', start);
    out.push_back(inner.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  for (auto& f : out)
    if (f.empty() || f.find_first_of(" \t") != std::string::npos) return std::nullopt;
  return out;
}

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

std::string edge_label(const std::string& action, double prob) {
  return action.empty() ? format_double(prob) : action + ":" + format_double(prob);
}

void size_warning(std::size_t n, std::vector<Diagnostic>* warnings) {
  if (warnings && n > 1000)
    warnings->push_back(Diagnostic{SourcePos{}, Severity::Warning,
                                   "DOT output with " + std::to_string(n) + " states is hard to read beyond ~1000"});
}

}  // namespace

AdversaryText format_adversary(const Dtmc& d) {
  AdversaryText out;
  std::ostringstream tra, sta, lab;
  tra << d.num_states() << ' ' << d.num_transitions() << '\n';
  for (std::size_t s = 0; s < d.num_states(); ++s)
    for (const auto& t : d.rows[s]) {
      tra << s << ' ' << t.target << ' ' << format_double(t.prob);
      if (!t.action.empty()) tra << ' ' << t.action;
      tra << '\n';
    }
  sta << '(';
  for (std::size_t i = 0; i < d.vars.size(); ++i) sta << (i ? "," : "") << d.vars[i].name;
  sta << ")\n";
  for (std::size_t s = 0; s < d.num_states(); ++s) sta << s << ':' << format_valuation(d.vars, d.states[s]) << '\n';
  for (std::size_t l = 0; l < d.label_names.size(); ++l) lab << (l ? " " : "") << l << "=\"" << d.label_names[l] << '"';
  lab << '\n';
  for (std::size_t s = 0; s < d.num_states(); ++s) {
    std::string line;
    for (std::size_t l = 0; l < d.label_names.size(); ++l)
      if (d.labels[l][s]) line += ' ' + std::to_string(l);
    if (!line.empty()) lab << s << ':' << line << '\n';
  }
  out.tra = tra.str();
  out.sta = sta.str();
  out.lab = lab.str();
  return out;
}

Dtmc parse_adversary(const AdversaryText& text, const std::string& tra_name, const std::string& sta_name,
                     const std::string& lab_name) {
  Dtmc d;

  // States
  auto sl = lines_of(text.sta);
  if (sl.empty()) malformed(sta_name, 1, "missing variable header");
  auto names = tuple(sl[0]);
  if (!names) malformed(sta_name, 1, "expected '(var1,var2,...)'");
  std::vector<std::vector<std::string>> raw;
  for (std::size_t i = 1; i < sl.size(); ++i) {
    if (blank(sl[i])) continue;
    auto colon = sl[i].find(':');
    if (colon == std::string::npos) malformed(sta_name, i + 1, "expected 'index:(values)'");
    auto idx = parse_index(sl[i].substr(0, colon));
    auto vals = tuple(sl[i].substr(colon + 1));
    if (!idx || !vals) malformed(sta_name, i + 1, "expected 'index:(values)'");
    if (*idx != raw.size()) malformed(sta_name, i + 1, "state index " + std::to_string(*idx) + " out of order");
    if (vals->size() != names->size())
      malformed(sta_name, i + 1, "expected " + std::to_string(names->size()) + " values");
    raw.push_back(std::move(*vals));
  }
  const std::size_t n = raw.size();
  for (std::size_t v = 0; v < names->size(); ++v) {
    VarInfo info;
    info.name = (*names)[v];
    info.is_bool = n > 0 && (raw[0][v] == "true" || raw[0][v] == "false");
    info.low = info.is_bool ? 0 : INT32_MAX;
    info.high = info.is_bool ? 1 : INT32_MIN;
    d.vars.push_back(info);
  }
  d.states.assign(n, std::vector<int>(names->size()));
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t v = 0; v < names->size(); ++v) {
      const std::string& f = raw[s][v];
      VarInfo& info = d.vars[v];
      if (info.is_bool) {
        if (f != "true" && f != "false") malformed(sta_name, s + 2, "value " + f + " of " + info.name + " is not a bool");
        d.states[s][v] = f == "true";
      } else {
        auto x = parse_int(f);
        if (!x) malformed(sta_name, s + 2, "value " + f + " of " + info.name + " is not an integer");
        d.states[s][v] = *x;
        info.low = std::min(info.low, *x);
        info.high = std::max(info.high, *x);
      }
    }
  for (auto& info : d.vars)
    if (!info.is_bool && n == 0) info.low = info.high = 0;

  // Transitions
  auto tl = lines_of(text.tra);
  if (tl.empty()) malformed(tra_name, 1, "missing header");
  auto head = fields(tl[0]);
  if (head.size() != 2 || !parse_index(head[0]) || !parse_index(head[1]))
    malformed(tra_name, 1, "expected '<states> <transitions>'");
  if (*parse_index(head[0]) != n)
    malformed(tra_name, 1, "header declares " + head[0] + " states but the state file lists " + std::to_string(n));
  std::size_t declared = *parse_index(head[1]), count = 0;
  d.rows.resize(n);
  for (std::size_t i = 1; i < tl.size(); ++i) {
    if (blank(tl[i])) continue;
    auto f = fields(tl[i]);
    if (f.size() != 3 && f.size() != 4) malformed(tra_name, i + 1, "expected 'src dst prob [action]'");
    auto src = parse_index(f[0]), dst = parse_index(f[1]);
    if (!src || !dst) malformed(tra_name, i + 1, "state indices must be non-negative integers");
    if (*src >= n || *dst >= n)
      malformed(tra_name, i + 1, "dangling state index " + std::to_string(std::max(*src, *dst)));
    double p;
    try {
      p = parse_double(f[2]);
    } catch (const Error&) {
      malformed(tra_name, i + 1, "bad probability " + f[2]);
    }
    if (!(p >= 0.0 && p <= 1.0)) malformed(tra_name, i + 1, "probability " + f[2] + " outside [0,1]");
    d.rows[*src].push_back({*dst, p, f.size() == 4 ? f[3] : ""});
    ++count;
  }
  if (count != declared)
    malformed(tra_name, 1, "header declares " + std::to_string(declared) + " transitions but " + std::to_string(count) +
                               " follow");
  for (std::size_t s = 0; s < n; ++s) {
    double sum = 0.0;
    for (const auto& t : d.rows[s]) sum += t.prob;
    if (std::fabs(sum - 1.0) > 1e-9)
      throw AnalysisError(tra_name + ": probabilities of state " + std::to_string(s) + " sum to " + format_double(sum));
  }

  // Labels
  auto ll = lines_of(text.lab);
  if (ll.empty()) malformed(lab_name, 1, "missing label header");
  for (const auto& f : fields(ll[0])) {
    auto eq = f.find('=');
    auto idx = eq == std::string::npos ? std::nullopt : parse_index(f.substr(0, eq));
    std::string name = eq == std::string::npos ? "" : f.substr(eq + 1);
    if (!idx || name.size() < 2 || name.front() != '"' || name.back() != '"')
      malformed(lab_name, 1, "expected index=\"name\" entries");
    if (*idx != d.label_names.size()) malformed(lab_name, 1, "label indices must be consecutive from 0");
    d.label_names.push_back(name.substr(1, name.size() - 2));
  }
  d.labels.assign(d.label_names.size(), std::vector<bool>(n, false));
  for (std::size_t i = 1; i < ll.size(); ++i) {
    if (blank(ll[i])) continue;
    auto colon = ll[i].find(':');
    auto s = colon == std::string::npos ? std::nullopt : parse_index(ll[i].substr(0, colon));
    if (!s) malformed(lab_name, i + 1, "expected 'index: labels'");
    if (*s >= n) malformed(lab_name, i + 1, "dangling state index " + std::to_string(*s));
    for (const auto& f : fields(ll[i].substr(colon + 1))) {
      auto l = parse_index(f);
      if (!l || *l >= d.label_names.size()) malformed(lab_name, i + 1, "unknown label index " + f);
      d.labels[*l][*s] = true;
    }
  }
  if (auto init = d.label_index("init"))
    for (std::size_t s = 0; s < n; ++s)
      if (d.labels[*init][s]) {
        d.initial = s;
        break;
      }
  return d;
}

void export_policy(const Dtmc& d, const std::filesystem::path& stem) {
  AdversaryText t = format_adversary(d);
  std::filesystem::path base = stem;
  write_file(base.string() + ".tra", t.tra);
  write_file(base.string() + ".sta", t.sta);
  write_file(base.string() + ".lab", t.lab);
}

void export_policy(const Policy& p, const std::filesystem::path& stem) { export_policy(p.dtmc, stem); }

Dtmc import_policy(const std::filesystem::path& tra, const std::filesystem::path& sta,
                   const std::filesystem::path& lab) {
  return parse_adversary(AdversaryText{read_file(tra), read_file(sta), read_file(lab)}, tra.string(), sta.string(),
                         lab.string());
}

std::string export_dot(const Mdp& m, std::vector<Diagnostic>* warnings) {
  size_warning(m.num_states(), warnings);
  std::ostringstream os;
  os << "digraph mdp {\n  node [shape=box];\n";
  for (std::size_t s = 0; s < m.num_states(); ++s)
    os << "  " << s << " [label=\"" << s << "\\n" << dot_escape(format_valuation(m.vars, m.states[s])) << "\"];\n";
  for (std::size_t s = 0; s < m.num_states(); ++s)
    for (const auto& c : m.choices[s])
      for (const auto& t : c.dist)
        os << "  " << s << " -> " << t.target << " [label=\"" << dot_escape(edge_label(c.action, t.prob)) << "\"];\n";
  os << "}\n";
  return os.str();
}

std::string export_dot(const Dtmc& d, std::vector<Diagnostic>* warnings) {
  size_warning(d.num_states(), warnings);
  std::ostringstream os;
  os << "digraph dtmc {\n  node [shape=box];\n";
  for (std::size_t s = 0; s < d.num_states(); ++s)
    os << "  " << s << " [label=\"" << s << "\\n" << dot_escape(format_valuation(d.vars, d.states[s])) << "\"];\n";
  for (std::size_t s = 0; s < d.num_states(); ++s)
    for (const auto& t : d.rows[s])
      os << "  " << s << " -> " << t.target << " [label=\"" << dot_escape(edge_label(t.action, t.prob)) << "\"];\n";
  os << "}\n";
  return os.str();
}

ArtefactPaths artefact_paths(const std::filesystem::path& stem) {
  std::string s = stem.string();
  return ArtefactPaths{s + ".prism", s + ".props", s + "_pol.props"};
}

std::filesystem::path adversary_stem(const std::filesystem::path& dir, const std::string& stem, std::size_t n) {
  return dir / (stem + "-adv" + std::to_string(n));
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  if (p.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(p.parent_path(), ec);
  }
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  out << text;
  if (!out.flush()) throw Error("cannot write " + p.string());
}

}  // namespace riskctl
