#include <algorithm>
#include <set>

#include "doctest.h"
#include "riskctl/common.hpp"
#include "riskctl/gcl.hpp"

using namespace riskctl;
using namespace riskctl::gcl;

namespace {

using Valuation = std::map<std::string, int>;

Valuation valuation(const Mdp& m, std::size_t s) {
  Valuation v;
  for (std::size_t i = 0; i < m.vars.size(); ++i) v[m.vars[i].name] = m.states[s][i];
  return v;
}

// State-index-free description of an MDP: every state by valuation with its
// choices as sorted (action, target valuation, probability) lists.
using Canon = std::map<Valuation, std::multiset<std::pair<std::string, std::vector<std::pair<Valuation, double>>>>>;

Canon canonical(const Mdp& m) {
  Canon out;
  for (std::size_t s = 0; s < m.num_states(); ++s) {
    auto& entry = out[valuation(m, s)];
    for (const auto& c : m.choices[s]) {
      std::vector<std::pair<Valuation, double>> dist;
      for (const auto& t : c.dist) dist.emplace_back(valuation(m, t.target), t.prob);
      std::sort(dist.begin(), dist.end());
      entry.insert({c.action, dist});
    }
  }
  return out;
}

}  // namespace

TEST_CASE("minimal module") {
  auto p = parse_gcl("mdp module m x: [0..2] init 0; [a] x<2 -> (x'=x+1); endmodule");
  REQUIRE(p.modules.size() == 1);
  CHECK(p.modules[0].commands.size() == 1);
  Mdp m = build_state_space(p);
  CHECK(m.num_states() == 3);
  CHECK(m.label_names[0] == "init");
  CHECK(m.label_names[1] == "deadlock");
  CHECK(m.initial == 0);
}

TEST_CASE("mishap command shape") {
  auto p = parse_gcl(
      "mdp module h HCp : [0..4] init 0;\n"
      "[h_exitCell] true -> ((!HCp=4 & (true | false))?0.05:0):(HCp'=4) + ((!HCp=4 & (true | false))?0.95:1):true;\n"
      "endmodule");
  const auto& c = p.modules[0].commands.at(0);
  CHECK(c.branches.size() == 2);
  CHECK(c.branches[0].prob->op == Op::Ite);
}

TEST_CASE("action rewards") {
  auto p = parse_gcl("mdp module m HCp : [0..1] init 1; [rw_weldStep] true -> true; endmodule\n"
                     "rewards \"risk_HC\" [rw_weldStep] HCp=1 : 10; endrewards");
  REQUIRE(p.rewards.size() == 1);
  CHECK(p.rewards[0].name == "risk_HC");
  REQUIRE(p.rewards[0].items.size() == 1);
  CHECK(p.rewards[0].items[0].action == std::optional<std::string>("rw_weldStep"));
  Mdp m = build_state_space(p);
  CHECK(m.reward("risk_HC").total(0, 0) == 10.0);
}

TEST_CASE("synchronisation multiplies branch probabilities") {
  auto p = parse_gcl(
      "mdp\n"
      "module m1 x : [0..1] init 0; [a] x=0 -> 0.9:(x'=1) + 0.1:true; endmodule\n"
      "module m2 y : [0..1] init 0; [a] y=0 -> 0.95:(y'=1) + 0.05:true; endmodule\n");
  Mdp m = build_state_space(p);
  REQUIRE(m.choices[0].size() == 1);
  std::vector<double> probs;
  for (const auto& t : m.choices[0][0].dist) probs.push_back(t.prob);
  std::sort(probs.begin(), probs.end());
  // Cross product enumerated by hand: 0.1*0.05, 0.9*0.05, 0.1*0.95, 0.9*0.95.
  std::vector<double> expected{0.1 * 0.05, 0.9 * 0.05, 0.1 * 0.95, 0.9 * 0.95};
  REQUIRE(probs.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(probs[i] == doctest::Approx(expected[i]).epsilon(1e-12));
  std::vector<double> listed{0.005, 0.045, 0.095, 0.855};
  for (std::size_t i = 0; i < 4; ++i) CHECK(probs[i] == doctest::Approx(listed[i]).epsilon(1e-12));
}

TEST_CASE("guard false at the start gives a deadlock") {
  Mdp m = build_state_space(parse_gcl("mdp module m x : bool init false; [a] x -> (x'=false); endmodule"));
  CHECK(m.num_states() == 1);
  CHECK(m.choices[0].empty());
  CHECK(m.has_label("deadlock", 0));
}

TEST_CASE("sensor reports near in 95 percent of the combined mass") {
  auto p = parse_gcl(
      "mdp\n"
      "module mover hloc : [0..1] init 0; [h_enterCell] hloc=0 -> (hloc'=1); endmodule\n"
      "module sensor rngDet : [0..2] init 0; [h_enterCell] true -> .95:(rngDet'=1)+.05:true; endmodule\n");
  Mdp m = build_state_space(p);
  REQUIRE(m.choices[0].size() == 1);
  double near = 0.0;
  for (const auto& t : m.choices[0][0].dist)
    if (valuation(m, t.target).at("rngDet") == 1) near += t.prob;
  CHECK(near == doctest::Approx(0.95).epsilon(1e-12));
}

TEST_CASE("expression evaluation") {
  auto p = parse_gcl(
      "mdp\nformula CE_HC = x=1;\nformula ANYOCC = CE_HC | false;\n"
      "module m x : [0..1] init 0; [a] true -> true; endmodule\n");
  CHECK(eval_expr(p, {}, "(true?0.9:0.2)").as_double() == 0.9);
  CHECK(eval_expr(p, {{"x", 0}}, "x=0").as_bool());
  CHECK(eval_expr(p, {{"x", 1}}, "ANYOCC").as_bool());
  CHECK_FALSE(eval_expr(p, {{"x", 0}}, "ANYOCC").as_bool());
}

TEST_CASE("distributions are stochastic") {
  auto p = parse_gcl(
      "mdp\n"
      "module a x : [0..3] init 0; [go] x<3 -> 0.25:(x'=x+1) + 0.75:(x'=(x+2>3?3:x+2)); [] x=3 -> (x'=0); endmodule\n"
      "module b y : [0..2] init 0; [go] true -> 0.5:(y'=0) + 0.5:(y'=2); [] y>0 -> (y'=y-1); endmodule\n");
  Mdp m = build_state_space(p);
  for (const auto& cs : m.choices)
    for (const auto& c : cs) {
      REQUIRE_FALSE(c.dist.empty());
      double total = 0.0;
      for (const auto& t : c.dist) total += t.prob;
      CHECK(std::abs(total - 1.0) < 1e-9);
    }
}

TEST_CASE("module order does not matter") {
  const char* a = "module a x : [0..2] init 0; [s] x<2 -> 0.3:(x'=x+1) + 0.7:true; [] x=2 -> (x'=0); endmodule\n";
  const char* b = "module b y : bool init false; [s] !y -> 0.6:(y'=true) + 0.4:true; [t] y -> (y'=false); endmodule\n";
  const char* c = "module c z : [0..1] init 0; [t] true -> (z'=1-z); [] z=1 & x=2 -> (z'=0); endmodule\n";
  Mdp abc = build_state_space(parse_gcl(std::string("mdp\n") + a + b + c));
  Mdp cab = build_state_space(parse_gcl(std::string("mdp\n") + c + a + b));
  Mdp bca = build_state_space(parse_gcl(std::string("mdp\n") + b + c + a));
  CHECK(abc.num_states() == cab.num_states());
  CHECK(canonical(abc) == canonical(cab));
  CHECK(canonical(abc) == canonical(bca));
}

TEST_CASE("state cap and bad probabilities") {
  auto p = parse_gcl("mdp module m x : [0..100] init 0; [] x<100 -> (x'=x+1); endmodule");
  BuildOptions small;
  small.state_cap = 10;
  CHECK_THROWS_AS(build_state_space(p, small), Error);
  auto bad = parse_gcl("mdp module m x : [0..1] init 0; [] x=0 -> 0.5:(x'=1) + 0.4:true; endmodule");
  CHECK_THROWS_AS(build_state_space(bad), Error);
}

TEST_CASE("unsupported constructs are named") {
  try {
    parse_gcl("ctmc module m x : bool; endmodule");
    FAIL("accepted");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("ctmc") != std::string::npos);
  }
}
