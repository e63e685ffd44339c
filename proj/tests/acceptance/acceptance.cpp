// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "../support/cobot.hpp"
#include "../support/oracles.hpp"
#include "cli.hpp"
#include "riskctl/codegen.hpp"
#include "riskctl/common.hpp"
#include "riskctl/dsl.hpp"
#include "riskctl/gcl.hpp"
#include "riskctl/gradients.hpp"
#include "riskctl/io_formats.hpp"
#include "riskctl/risk_space.hpp"
#include "riskctl/synthesis.hpp"

using namespace riskctl;
namespace fs = std::filesystem;
using oracle::command_text;
using oracle::strip_spaces;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

fs::path scratch() {
  static fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("riskctl-acceptance-" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

const fs::path kDemo = fs::path(RISKCTL_MODELS) / "workcell";

std::string mishaps(const GeneratedArtefacts& a) {
  std::string out;
  for (const auto& [module, text] : a.mishap_commands) out += text;
  return out;
}

Outcome codegen_goldens() {
  Outcome o;
  auto a = generate(fixture::cobot());
  auto m = mishaps(a);
  o.require(strip_spaces(command_text(m, "h_exitCell")) == strip_spaces(fixture::kMishapHC), "HC mishap command");
  o.require(strip_spaces(command_text(m, "h_placeWorkpieceLeft")) == strip_spaces(fixture::kMishapHRW),
            "HRW mishap command");
  auto sev = a.rewards.find("rewards \"risk_sev\"");
  o.require(sev != std::string::npos &&
                strip_spaces(command_text(a.rewards, "h_exitCell", sev)) == strip_spaces(fixture::kSeverityHC),
            "severity reward line");
  for (const auto& expected : fixture::kSafmodSwitches) {
    std::string action = expected.substr(1, expected.find(']') - 1);
    o.require(strip_spaces(command_text(a.controller_module, action)) == strip_spaces(expected), action);
  }
  o.detail = o.ok ? "2 mishap commands, severity line, 5 safmod switches" : o.detail;
  return o;
}

Outcome gradient_facts() {
  Outcome o;
  auto act = complete_matrix("act", {"off", "idle", "exchWrkp", "welding"}, {{0}, {1, 0}, {3, 2, 0}, {5, 4, 2, 0}});
  o.require(gradient(act, "welding", "exchWrkp") == 2, "act welding->exchWrkp");
  const auto& safmod = *fixture::cobot().matrix("safmod");
  o.require(gradient(safmod, "srmst", "ssmon") == -2, "safmod srmst->ssmon");
  std::mt19937_64 rng(1);
  for (int round = 0; round < 1000 && o.ok; ++round) {
    std::size_t n = std::uniform_int_distribution<std::size_t>(1, 10)(rng);
    std::vector<std::string> labels;
    std::vector<std::vector<int>> rows(n);
    for (std::size_t k = 0; k < n; ++k) {
      labels.push_back("m" + std::to_string(k));
      for (std::size_t j = 0; j < k; ++j) rows[k].push_back(std::uniform_int_distribution<int>(-9, 9)(rng));
      rows[k].push_back(0);
    }
    auto g = complete_matrix("x", labels, rows);
    for (std::size_t i = 0; i < n; ++i) {
      o.require(g.at(i, i) == 0, "zero diagonal");
      for (std::size_t j = 0; j < n; ++j) o.require(g.at(i, j) == -g.at(j, i), "skew symmetry");
    }
  }
  if (o.ok) o.detail = "2 facts, 1000 random triangles";
  return o;
}

Outcome override_reproduction() {
  Outcome o;
  Model m = fixture::cobot();
  RiskSpace space(m);
  RiskState s = space.initial();
  s.set(space.factor_index("HS"), Phase::Act);
  s.set(space.factor_index("HRW"), Phase::Mit);
  std::string target = override_target(m.factors.at("HRW"), "normal", s, "normal", m);
  o.require(target == "ssmon", "override chose " + target);
  auto a = generate(m);
  std::string tail = strip_spaces(fixture::kResumptionTail);
  bool found = false;
  for (std::size_t pos = 0; (pos = a.controller_module.find("[si_HRWressafmod]", pos)) != std::string::npos; ++pos) {
    std::string c = strip_spaces(command_text(a.controller_module, "si_HRWressafmod", pos));
    if (c.find("(HSp=act|HSp=mit)") != std::string::npos && c.size() >= tail.size() &&
        c.compare(c.size() - tail.size(), tail.size(), tail) == 0)
      found = true;
  }
  o.require(found, "no HRW resumption command ending in " + std::string(fixture::kResumptionTail));
  if (o.ok) o.detail = "ssmon";
  return o;
}

Outcome solver_oracle() {
  Outcome o;
  std::mt19937_64 rng(4242);
  std::size_t policies = 0, points = 0;
  for (int round = 0; round < 100 && o.ok; ++round) {
    Mdp m = oracle::random_acyclic_mdp(rng, 200);
    std::string tag = " (MDP " + std::to_string(round) + ")";
    auto expected = oracle::best_values(m, "r1", true);
    auto v = value_iterate(m, "r1", Objective::Max);
    for (std::size_t s = 0; s < m.num_states(); ++s)
      o.require(std::abs(v[s] - expected[s]) <= 1e-5, "value_iterate differs at state " + std::to_string(s) + tag);
    auto p = extract_policy(m, "r1", v, Objective::Max);
    std::vector<std::size_t> choice(m.num_states(), 0);
    for (std::size_t s = 0; s < m.num_states(); ++s) {
      o.require(m.choices[s].empty() || p.choice[s], "unresolved state" + tag);
      choice[s] = p.choice[s].value_or(0);
    }
    auto achieved = oracle::evaluate(m, m.rewards.at("r1"), choice);
    for (std::size_t s = 0; s < m.num_states(); ++s)
      o.require(std::abs(achieved[s] - expected[s]) <= 1e-5, "extracted policy is suboptimal" + tag);

    auto all = oracle::all_points(m, "r1", "r2");
    policies += all.size();
    auto front = pareto_sweep(m, {"r1", Objective::Max}, {"r2", Objective::Max}, 11);
    o.require(!front.empty(), "empty front" + tag);
    for (const auto& pt : front) {
      ++points;
      oracle::Point x{pt.r1, pt.r2};
      for (const auto& q : all) o.require(!oracle::dominates(q, x, 1e-5), "dominated Pareto point" + tag);
    }
  }
  if (o.ok)
    o.detail = "100 MDPs, " + std::to_string(policies) + " policies enumerated, " + std::to_string(points) +
               " Pareto points";
  return o;
}

Outcome dtmc_checker() {
  Outcome o;
  double chain = check_dtmc(oracle::chain_095(), "P=? [ F \"goal\" ]");
  o.require(chain == 0.95, "chain gave " + format_double(chain));
  double f = check_dtmc(oracle::recovery_fixture(),
                        "filter(avg, P=? [ !\"ACCIDENT\" W \"SAFE\" ], \"ANYREC\" & !\"MISHAP\")");
  o.require(std::abs(f - oracle::kRecoveryFilterAvg) <= 1e-9, "filter gave " + format_double(f));
  if (o.ok) o.detail = "0.95 exact, filter " + format_double(f);
  return o;
}

Outcome risk_counts() {
  Outcome o;
  auto factor = [](const std::string& n, const std::string& extra = "") {
    return "  " + n + " guard \"true\" detectedBy (." + n + "det) mitigatedBy (." + n + "mit) resumedBy (." + n +
           "res) " + extra + ";\n";
  };
  auto count = [](const std::string& body) {
    return RiskSpace(parse_model({{"m.yap", "Activity a {\n" + body + "}\n"}})).explore().states.size();
  };
  std::size_t one = count(factor("F")), mis = count(factor("F", "mis=\"x\" prob=0.1 sev=1")),
              two = count(factor("F") + factor("G"));
  o.require(one == 4, "one factor: " + std::to_string(one));
  o.require(mis == 5, "with mishap: " + std::to_string(mis));
  o.require(two == 16, "two factors: " + std::to_string(two));
  RiskSpace dep(parse_model({{"m.yap", "Activity a {\n" + factor("HW") + factor("HRW", "requires (HW)") + "}\n"}}));
  RiskEvent up{EventKind::Endangerment, dep.factor_index("HRW"), 0};
  o.require(!dep.is_enabled(dep.initial(), up), "HRW activates while HW is inactive");
  auto lts = dep.explore();
  for (const auto& t : lts.transitions)
    if (t.event == up && lts.states[t.from].phase(dep.factor_index("HW")) == Phase::Inact)
      o.require(false, "HRW endangerment reachable with HW inactive");
  if (o.ok) o.detail = "4/5/16, requires blocks";
  return o;
}

int cli(std::vector<std::string> args, std::string* out = nullptr) {
  std::ostringstream buf;
  auto* old = std::cout.rdbuf(buf.rdbuf());
  int code = cli::run(args);
  std::cout.rdbuf(old);
  if (out) *out = buf.str();
  return code;
}

Outcome end_to_end() {
  Outcome o;
  const std::string filter = "filter(avg, P=? [ !\"ACCIDENT\" W \"SAFE\" ], \"ANYREC\" & !\"MISHAP\")";
  std::vector<std::string> values;
  std::size_t states = 0;
  for (int run = 0; run < 2 && o.ok; ++run) {
    fs::path dir = scratch() / ("e2e" + std::to_string(run));
    fs::path stem = dir / "workcell";
    o.require(cli({"synthesise", "-m", (kDemo / "workcell.yap").string(), "-t", (kDemo / "workcell.prism").string(),
                   "-o", stem.string(), "-f", "prism", "-d", "multi-event-concurrent"}) == 0,
              "synthesise failed");
    if (!o.ok) break;
    Mdp mdp = gcl::build_state_space(gcl::parse_gcl(read_file(stem.string() + ".prism")));
    states = mdp.num_states();
    o.require(states < 50000, "state space has " + std::to_string(states) + " states");
    fs::path adv = dir / "adv";
    o.require(cli({"solve", "-M", stem.string() + ".prism", "--query",
                   "multi(R{\"effort\"}max=? [ C ], R{\"nuisance\"}max=? [ C ])", "--export-adv", adv.string()}) == 0,
              "solve failed");
    fs::path base = adv / "workcell-adv1";
    o.require(fs::exists(base.string() + ".tra"), "no adversary exported");
    if (!o.ok) break;
    std::string out;
    o.require(cli({"check-policy", "--tra", base.string() + ".tra", "--sta", base.string() + ".sta", "--lab",
                   base.string() + ".lab", "--props", stem.string() + "_pol.props"},
                  &out) == 0,
              "check-policy failed");

    Dtmc d = import_policy(base.string() + ".tra", base.string() + ".sta", base.string() + ".lab");
    auto text = format_adversary(d);
    o.require(text.tra == read_file(base.string() + ".tra") && text.sta == read_file(base.string() + ".sta") &&
                  text.lab == read_file(base.string() + ".lab"),
              "adversary files do not round-trip");
    for (const auto& row : d.rows)
      for (const auto& t : row) o.require(!t.action.empty() || row.size() == 1, "unlabelled policy transition");
    double v = check_dtmc(d, filter);
    o.require(v >= 0.0 && v <= 1.0, "filter value " + format_double(v) + " outside [0,1]");
    auto pos = out.find(filter + ": ");
    o.require(pos != std::string::npos, "check-policy did not report the filter query");
    if (!o.ok) break;
    std::string printed = out.substr(pos + filter.size() + 2);
    printed = printed.substr(0, printed.find('\n'));
    o.require(printed == format_double(v), "printed " + printed + " but computed " + format_double(v));
    values.push_back(printed);
  }
  if (o.ok) {
    o.require(values.size() == 2 && values[0] == values[1], "filter value differs between runs");
    o.detail = std::to_string(states) + " states, filter " + values[0];
  }
  return o;
}

Outcome round_trips() {
  Outcome o;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(fs::path(RISKCTL_FIXTURES) / "cobot")) files.push_back(e.path());
  files.push_back(kDemo / "workcell.yap");
  for (const auto& f : files) {
    Model m = load_model_files({f});
    std::string printed = print_model(m);
    Model again = parse_model({{f.filename().string(), printed}});
    o.require(structurally_equal(m, again) && print_model(again) == printed, "DSL fixpoint fails on " + f.string());
  }
  std::mt19937_64 rng(8);
  for (int round = 0; round < 20; ++round) {
    Mdp m = oracle::random_acyclic_mdp(rng, 80);
    std::vector<std::optional<std::size_t>> choice(m.num_states());
    for (std::size_t s = 0; s < m.num_states(); ++s)
      if (!m.choices[s].empty()) choice[s] = std::uniform_int_distribution<std::size_t>(0, m.choices[s].size() - 1)(rng);
    Policy p = induce_policy(m, choice);
    fs::path stem = scratch() / ("rt" + std::to_string(round));
    export_policy(p, stem);
    Dtmc back = import_policy(stem.string() + ".tra", stem.string() + ".sta", stem.string() + ".lab");
    o.require(structurally_equal(p.dtmc, back), "policy export/import differs (round " + std::to_string(round) + ")");
  }
  for (const auto& m : {fixture::cobot(), resolve_includes(load_model_files({kDemo / "workcell.yap"}))}) {
    try {
      check_fragments(generate(m));
    } catch (const Error& e) {
      o.require(false, e.what());
    }
  }
  if (o.ok) o.detail = std::to_string(files.size()) + " DSL files, 20 policies, 2 fragment sets";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
  };
  std::vector<Criterion> criteria{
      {1, "codegen goldens", 1, codegen_goldens},
      {2, "gradient facts", 1, gradient_facts},
      {3, "override reproduction", 1, override_reproduction},
      {4, "solver oracle equivalence", 60, solver_oracle},
      {5, "DTMC checker", 1, dtmc_checker},
      {6, "risk-space counts", 1, risk_counts},
      {7, "end-to-end", 30, end_to_end},
      {8, "round-trips", 60, round_trips},
  };
  bool all = true;
  for (const auto& c : criteria) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (o.ok && secs >= c.limit_s) {
      o.ok = false;
      o.detail = "too slow";
    }
    all = all && o.ok;
    std::printf("criterion %d %-26s %s  %.3fs (limit %gs)  %s\n", c.id, c.name, o.ok ? "PASS" : "FAIL", secs,
                c.limit_s, o.detail.c_str());
  }
  fs::remove_all(scratch());
  return all ? 0 : 1;
}
