#include <set>

#include "doctest.h"
#include "riskctl/dsl.hpp"
#include "riskctl/risk_space.hpp"

using namespace riskctl;

namespace {

std::string factor(const std::string& name, const std::string& extra = "") {
  return "  " + name + " guard \"true\" detectedBy (." + name + "det) mitigatedBy (." + name + "mit) resumedBy (." +
         name + "res) " + extra + ";\n";
}

Model model_of(const std::string& factors) { return parse_model({{"m.yap", "Activity a {\n" + factors + "}\n"}}); }

}  // namespace

TEST_CASE("one factor cycles through four phases") {
  RiskSpace space(model_of(factor("F")));
  auto lts = space.explore();
  CHECK(lts.states.size() == 4);
  std::set<Phase> seen;
  for (const auto& s : lts.states) seen.insert(s.phase(0));
  CHECK(seen == std::set<Phase>{Phase::Inact, Phase::Act, Phase::Mit, Phase::Sfd});
}

TEST_CASE("a mishap adds one absorbing state") {
  RiskSpace space(model_of(factor("F", "mis=\"hit\" prob=0.1 sev=2")));
  auto lts = space.explore();
  CHECK(lts.states.size() == 5);
  for (std::size_t i = 0; i < lts.states.size(); ++i)
    if (lts.states[i].phase(0) == Phase::Mis)
      for (const auto& t : lts.transitions) CHECK(t.from != i);
}

TEST_CASE("independent factors multiply") {
  RiskSpace space(model_of(factor("F") + factor("G")));
  CHECK(space.explore().states.size() == 16);
}

TEST_CASE("requires blocks activation") {
  RiskSpace space(model_of(factor("HW") + factor("HRW", "requires (HW)")));
  std::size_t hw = space.factor_index("HW"), hrw = space.factor_index("HRW");
  RiskState s = space.initial();
  CHECK(space.is_enabled(s, {EventKind::Endangerment, hw, 0}));
  CHECK_FALSE(space.is_enabled(s, {EventKind::Endangerment, hrw, 0}));
  CHECK_THROWS_AS(space.step(s, {EventKind::Endangerment, hrw, 0}), ModelError);
  s = space.step(s, {EventKind::Endangerment, hw, 0});
  CHECK(space.is_enabled(s, {EventKind::Endangerment, hrw, 0}));
  auto lts = space.explore();
  for (const auto& t : lts.transitions)
    if (t.event.kind == EventKind::Endangerment && t.event.factor == hrw)
      CHECK(lts.states[t.from].phase(hw) != Phase::Inact);
}

TEST_CASE("requires one of several") {
  RiskSpace space(model_of(factor("HRW") + factor("HS") + factor("HC") + factor("RT", "requiresNOf (1|HRW,HS,HC)")));
  RiskState s = space.initial();
  std::size_t rt = space.factor_index("RT");
  CHECK_FALSE(space.is_enabled(s, {EventKind::Endangerment, rt, 0}));
  s.set(space.factor_index("HS"), Phase::Act);
  CHECK(space.is_enabled(s, {EventKind::Endangerment, rt, 0}));
}

TEST_CASE("step updates a single phase") {
  RiskSpace space(model_of(factor("HRW") + factor("HC", "mis=\"x\" prob=0.05 sev=5")));
  std::size_t hrw = space.factor_index("HRW"), hc = space.factor_index("HC");
  RiskState s = space.initial();
  s.set(hrw, Phase::Mit);
  auto r = space.step(s, {EventKind::Resumption, hrw, 0});
  CHECK(r.phase(hrw) == Phase::Sfd);
  CHECK(r.phase(hc) == Phase::Inact);
  s = space.initial();
  s.set(hc, Phase::Act);
  CHECK(space.step(s, {EventKind::Mishap, hc, 0}).phase(hc) == Phase::Mis);
}

TEST_CASE("simulation") {
  RiskSpace space(model_of(factor("F") + factor("G", "mis=\"y\" prob=0.2 sev=1")));
  auto zero = space.simulate(3, 0);
  REQUIRE(zero.size() == 1);
  CHECK(zero[0].state == space.initial());
  CHECK_FALSE(zero[0].event);
  CHECK(format_trace(space, space.simulate(42, 25)) == format_trace(space, space.simulate(42, 25)));
  // Replay: every step takes an event enabled in its source state.
  auto trace = space.simulate(11, 30);
  for (std::size_t i = 0; i + 1 < trace.size(); ++i) {
    REQUIRE(trace[i].event);
    CHECK(space.is_enabled(trace[i].state, *trace[i].event));
    CHECK(space.step(trace[i].state, *trace[i].event) == trace[i + 1].state);
  }
}

TEST_CASE("single factor walk follows the only chain") {
  RiskSpace space(model_of(factor("F")));
  auto trace = space.simulate(5, 3);
  REQUIRE(trace.size() == 4);
  CHECK(trace[1].state.phase(0) == Phase::Act);
  CHECK(trace[2].state.phase(0) == Phase::Mit);
  CHECK(trace[3].state.phase(0) == Phase::Sfd);
}

TEST_CASE("risk DOT") {
  RiskSpace space(model_of(factor("F")));
  std::string dot = export_risk_dot(space, space.explore());
  CHECK(dot.rfind("digraph", 0) == 0);
}
