#include <random>

#include "../support/oracles.hpp"
#include "doctest.h"
#include "riskctl/common.hpp"
#include "riskctl/synthesis.hpp"

using namespace riskctl;

TEST_CASE("one-step reachability") {
  CHECK(check_dtmc(oracle::chain_095(), "P=? [ F \"goal\" ]") == 0.95);
  CHECK(check_dtmc(oracle::chain_095(), "P>=0.9 [ F \"goal\" ]") == 1.0);
  CHECK(check_dtmc(oracle::chain_095(), "P=? [ X \"goal\" ]") == 0.95);
  CHECK(check_dtmc(oracle::chain_095(), "P=? [ G !\"goal\" ]") == doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("weak until holds immediately where the right side does") {
  auto d = oracle::chain_095();
  d.labels[2][0] = true;
  CHECK(check_dtmc(d, "P=? [ false W \"goal\" ]") == 1.0);
}

TEST_CASE("accident-freedom filter") {
  auto d = oracle::recovery_fixture();
  auto q = "filter(avg, P=? [ !\"ACCIDENT\" W \"SAFE\" ], \"ANYREC\" & !\"MISHAP\")";
  CHECK(std::abs(check_dtmc(d, q) - oracle::kRecoveryFilterAvg) <= 1e-9);
  auto values = dtmc_values(d, parse_query("P=? [ !\"ACCIDENT\" W \"SAFE\" ]"));
  CHECK(std::abs(values[0] - 0.6875) <= 1e-9);
  CHECK(std::abs(values[1] - 0.775) <= 1e-9);
  CHECK(check_dtmc(d, "filter(min, P=? [ !\"ACCIDENT\" W \"SAFE\" ], \"ANYREC\")") == doctest::Approx(0.6875));
  CHECK_THROWS_AS(check_dtmc(d, "filter(avg, P=? [ F \"SAFE\" ], \"SAFE\" & \"ACCIDENT\")"), AnalysisError);
}

TEST_CASE("bounded and cumulative forms") {
  auto d = oracle::recovery_fixture();
  d.rewards["steps"] = {1, 1, 0, 0};
  // Expected visits to s0/s1 before absorption: y0 = 1 + 0.5 y1, y1 = 1 + 0.4 y0.
  double y0 = 1.5 / 0.8;
  CHECK(check_dtmc(d, "R{\"steps\"}=? [ C ]") == doctest::Approx(y0).epsilon(1e-12));
  CHECK(check_dtmc(d, "R{\"steps\"}=? [ C<=1 ]") == 1.0);
  CHECK(check_dtmc(d, "P=? [ F<=1 \"SAFE\" ]") == doctest::Approx(0.3));
  CHECK(check_dtmc(d, "P=? [ F<=2 \"SAFE\" ]") == doctest::Approx(0.3 + 0.5 * 0.5));
  d.rewards["loop"] = {0, 0, 1, 0};
  CHECK(std::isinf(check_dtmc(d, "R{\"loop\"}=? [ C ]")));
}

TEST_CASE("constants in bounds") {
  auto d = oracle::chain_095();
  Constants c{{"p", gcl::Value::of_double(0.96)}};
  CHECK(check_dtmc(d, "P>=p [ F \"goal\" ]", c) == 0.0);
  CHECK_THROWS_AS(check_dtmc(d, "P>=q [ F \"goal\" ]"), Error);
  CHECK_THROWS_AS(check_dtmc(d, "P>=1.5 [ F \"goal\" ]"), ModelError);
}

TEST_CASE("unsupported operators are named") {
  try {
    parse_query("S=? [ \"goal\" ]");
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("unsupported") != std::string::npos);
  }
}

TEST_CASE("reachability lies in [0,1] and grows with the target") {
  std::mt19937_64 rng(3);
  for (int round = 0; round < 50; ++round) {
    Mdp m = oracle::random_acyclic_mdp(rng, 30);
    std::vector<std::optional<std::size_t>> choice(m.num_states());
    for (std::size_t s = 0; s < m.num_states(); ++s)
      if (!m.choices[s].empty()) choice[s] = s % m.choices[s].size();
    Dtmc d = induce_policy(m, choice).dtmc;
    std::vector<bool> small(d.num_states()), large(d.num_states());
    for (std::size_t s = 0; s < d.num_states(); ++s) {
      small[s] = s % 5 == 4;
      large[s] = small[s] || s % 3 == 2;
    }
    d.label_names.push_back("a");
    d.labels.push_back(small);
    d.label_names.push_back("b");
    d.labels.push_back(large);
    auto pa = dtmc_values(d, parse_query("P=? [ F \"a\" ]"));
    auto pb = dtmc_values(d, parse_query("P=? [ F \"b\" ]"));
    for (std::size_t s = 0; s < d.num_states(); ++s) {
      CHECK(pa[s] >= 0.0);
      CHECK(pb[s] <= 1.0 + 1e-12);
      CHECK(pa[s] <= pb[s] + 1e-12);
    }
  }
}

TEST_CASE("property files") {
  auto pf = parse_properties("const double s;\nconst int t = 3;\n\"first\": P=? [ F \"goal\" ];\nR{\"x\"}<=s [ C<=t ]\n");
  CHECK(pf.constants.size() == 2);
  REQUIRE(pf.queries.size() == 2);
  CHECK(to_string(pf.queries[0]) == "P=? [ F \"goal\" ]");
  auto c = resolve_constants(pf, {{"s", gcl::Value::of_double(0.5)}});
  CHECK(c.at("t").as_double() == 3.0);
  CHECK(to_string(parse_query("multi(R{\"effort\"}max=? [ C ], R{\"nuisance\"}max=? [ C ])")) ==
        "multi(R{\"effort\"}max=? [ C ], R{\"nuisance\"}max=? [ C ])");
}
