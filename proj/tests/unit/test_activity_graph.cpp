#include <filesystem>

#include "doctest.h"
#include "riskctl/activity_graph.hpp"
#include "riskctl/dsl.hpp"

using namespace riskctl;

namespace {

// Naive fixpoint over the successor relation.
std::set<std::string> closure(const Model& m, const std::string& start) {
  std::set<std::string> seen{start};
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& [name, a] : m.activities)
      if (seen.count(name))
        for (const auto& s : a.successors) grew |= seen.insert(s).second;
  }
  return seen;
}

}  // namespace

TEST_CASE("successor edges") {
  Model m = resolve_includes(load_model_files({std::filesystem::path(RISKCTL_FIXTURES) / "cobot" / "exchWrkp.yap"}));
  auto lts = reachable_activities(m, "exchWrkp");
  for (const char* to : {"welding", "off", "idle"}) CHECK(lts.edges.count({"exchWrkp", to}));
  CHECK(lts.nodes == closure(m, "exchWrkp"));
  std::string dot = export_activity_dot(lts);
  CHECK(dot.find("exchWrkp -> welding") != std::string::npos);
}

TEST_CASE("isolated activity") {
  Model m = parse_model({{"a.yap", "Activity solo { }"}});
  auto lts = reachable_activities(m, "solo");
  CHECK(lts.nodes.size() == 1);
  CHECK(lts.edges.empty());
  std::string dot = export_activity_dot(lts);
  CHECK(dot.rfind("digraph", 0) == 0);
  CHECK(dot.find("solo") != std::string::npos);
}

TEST_CASE("cycles terminate") {
  Model m = parse_model({{"a.yap", "Activity off { successor idle; } Activity idle { successor off; }"}});
  auto lts = reachable_activities(m, "off");
  CHECK(lts.nodes == std::set<std::string>{"idle", "off"});
  CHECK(lts.edges.size() == 2);
  CHECK_THROWS_AS(reachable_activities(m, "nowhere"), ModelError);
}
