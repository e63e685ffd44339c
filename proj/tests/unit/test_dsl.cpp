#include <filesystem>

#include "doctest.h"
#include "riskctl/activity_graph.hpp"
#include "riskctl/dsl.hpp"

using namespace riskctl;
namespace fs = std::filesystem;

namespace {

std::vector<fs::path> fixture_files(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".yap") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

bool has_message(const std::vector<Diagnostic>& d, const std::string& text) {
  return std::any_of(d.begin(), d.end(), [&](const Diagnostic& x) { return x.message.find(text) != std::string::npos; });
}

}  // namespace

TEST_CASE("unnamed activity takes the file stem") {
  Model m = parse_model({{"exchWrkp.yap", "Activity { include moving; successor welding; successor off; successor idle; }"}});
  REQUIRE(m.activities.count("exchWrkp"));
  const auto& a = m.activities.at("exchWrkp");
  CHECK(a.includes == std::vector<std::string>{"moving"});
  CHECK(a.successors == std::vector<std::string>{"welding", "off", "idle"});
}

TEST_CASE("distances give the lower-left triangle") {
  Model m = parse_model({{"d.yap", "Distances safmod { normal: 0; hguid: -2 0; }"}});
  const auto* g = m.matrix("safmod");
  REQUIRE(g);
  CHECK(g->labels() == std::vector<std::string>{"normal", "hguid"});
  CHECK(g->lower_left() == std::vector<std::vector<int>>{{0}, {-2, 0}});
}

TEST_CASE("empty source") {
  Model m = parse_model({{"e.yap", ""}});
  CHECK(m.activities.empty());
  CHECK(m.factors.empty());
  CHECK(m.modes.empty());
  CHECK(m.items.empty());
}

TEST_CASE("syntax errors carry a position") {
  try {
    parse_model({{"bad.yap", "Activity a {\n  successor ;\n}"}});
    FAIL("no error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("bad.yap:2") != std::string::npos);
  }
}

TEST_CASE("includes are inherited") {
  Model m = parse_model({{"x.yap", "Activity a { include b; } Activity b { successor off; } Activity off { }"}});
  Model r = resolve_includes(m);
  const auto& s = r.activities.at("a").successors;
  CHECK(std::find(s.begin(), s.end(), "off") != s.end());
  CHECK(resolve_includes(parse_model({{"y.yap", "Activity c { }"}})).activities.at("c").successors.empty());
  CHECK_THROWS_AS(resolve_includes(parse_model({{"z.yap", "Activity a { include b; } Activity b { include a; }"}})),
                  ModelError);
}

TEST_CASE("validation") {
  Model dangling = parse_model({{"a.yap", "Activity a { HRW guard \"true\" requires (HW); }"}});
  CHECK(has_message(validate(dangling), "unresolved factor reference HW"));
  Model prob = parse_model({{"a.yap", "Activity a { HC guard \"true\" prob=0.05; }"}});
  CHECK(has_message(validate(prob), "prob without mis"));
}

TEST_CASE("demo model validates cleanly") {
  Model m = resolve_includes(load_model_files({fs::path(RISKCTL_MODELS) / "workcell" / "workcell.yap"}));
  CHECK(validate(m, ValidateOptions{true}).empty());
}

TEST_CASE("cobot fixture validates cleanly") {
  Model m = resolve_includes(load_model_files(fixture_files(fs::path(RISKCTL_FIXTURES) / "cobot")));
  for (const auto& d : validate(m, ValidateOptions{true})) MESSAGE(d.str());
  CHECK(validate(m, ValidateOptions{true}).empty());
}

TEST_CASE("print then parse is a fixpoint on every fixture") {
  std::vector<fs::path> files = fixture_files(fs::path(RISKCTL_FIXTURES) / "cobot");
  files.push_back(fs::path(RISKCTL_MODELS) / "workcell" / "workcell.yap");
  for (const auto& f : files) {
    CAPTURE(f.string());
    Model m = load_model_files({f});
    std::string once = print_model(m);
    Model again = parse_model({{f.filename().string(), once}});
    CHECK(structurally_equal(m, again));
    CHECK(print_model(again) == once);
  }
}

TEST_CASE("sibling activity files are loaded on demand") {
  Model m = load_model_files({fs::path(RISKCTL_FIXTURES) / "cobot" / "off.yap"});
  CHECK(m.activities.count("welding"));
  CHECK(m.activities.count("exchWrkp"));
}
