#include <filesystem>
#include <iostream>
#include <sstream>
#include <unistd.h>

#include "cli.hpp"
#include "doctest.h"
#include "riskctl/io_formats.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(std::vector<std::string> args) {
  std::ostringstream buf;
  auto* old = std::cout.rdbuf(buf.rdbuf());
  int code = riskctl::cli::run(args);
  std::cout.rdbuf(old);
  return {code, buf.str()};
}

fs::path workdir() {
  auto dir = fs::temp_directory_path() / ("riskctl-cli-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

const fs::path kDemo = fs::path(RISKCTL_MODELS) / "workcell";

}  // namespace

TEST_CASE("activity graph from the command line") {
  auto out = workdir() / "off-act.dot";
  auto off = fs::path(RISKCTL_FIXTURES) / "cobot" / "off.yap";
  CHECK(run({"show-activities", "-m", off.string(), "-o", out.string(), "--start", "off"}).code == 0);
  std::string dot = riskctl::read_file(out);
  CHECK(dot.find("off") != std::string::npos);
  auto legacy = workdir() / "legacy.dot";
  CHECK(run({"-m", off.string(), "-o", legacy.string(), "--showmodel", "activities"}).code == 0);
  CHECK(riskctl::read_file(legacy) == dot);
}

TEST_CASE("usage errors") {
  auto yap = (kDemo / "workcell.yap").string();
  auto tmpl = (kDemo / "workcell.prism").string();
  auto stem = (workdir() / "x").string();
  CHECK(run({}).code == 2);
  CHECK(run({"synthesise", "-m", yap, "-t", tmpl, "-o", stem, "-f", "smv"}).code == 2);
  CHECK(run({"synthesise", "-m", yap, "-t", tmpl, "-o", stem, "-d", "single"}).code == 2);
  CHECK(run({"--showmodel", "colours", "-m", yap}).code == 2);
  CHECK(run({"solve", "-M", stem + ".prism"}).code == 2);
}

TEST_CASE("missing inputs are errors") {
  CHECK(run({"show-risk", "-m", (workdir() / "absent.yap").string()}).code == 1);
}

TEST_CASE("synthesise, solve and check a policy") {
  auto dir = workdir() / "e2e";
  auto stem = dir / "workcell";
  auto r = run({"synthesise", "-m", (kDemo / "workcell.yap").string(), "-t", (kDemo / "workcell.prism").string(), "-o",
                stem.string(), "-f", "prism", "-d", "multi-event-concurrent"});
  REQUIRE(r.code == 0);
  for (const char* ext : {".prism", ".props"}) CHECK(fs::exists(stem.string() + ext));
  CHECK(fs::exists(stem.string() + "_pol.props"));

  auto adv = dir / "adv";
  auto s = run({"solve", "-M", stem.string() + ".prism", "--query",
                "multi(R{\"effort\"}max=? [ C ], R{\"nuisance\"}max=? [ C ])", "--export-adv", adv.string()});
  REQUIRE(s.code == 0);
  CHECK(s.out.find("multi(") != std::string::npos);
  auto base = adv / "workcell-adv1";
  REQUIRE(fs::exists(base.string() + ".tra"));

  auto c = run({"check-policy", "--tra", base.string() + ".tra", "--sta", base.string() + ".sta", "--lab",
                base.string() + ".lab", "--props", stem.string() + "_pol.props"});
  CHECK(c.code == 0);
  CHECK(c.out.find("filter(avg, P=? [ !\"ACCIDENT\" W \"SAFE\" ], \"ANYREC\" & !\"MISHAP\"): ") != std::string::npos);
}

TEST_CASE("simulation is reproducible") {
  auto yap = (kDemo / "workcell.yap").string();
  auto a = run({"simulate", "-m", yap, "--seed", "9", "--steps", "12"});
  auto b = run({"simulate", "-m", yap, "--seed", "9", "--steps", "12"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK_FALSE(a.out.empty());
}
