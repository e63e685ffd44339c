#include <random>

#include "doctest.h"
#include "riskctl/common.hpp"
#include "riskctl/gradients.hpp"

using namespace riskctl;

namespace {

GradientMatrix act_matrix() {
  return complete_matrix("act", {"off", "idle", "exchWrkp", "welding"}, {{0}, {1, 0}, {3, 2, 0}, {5, 4, 2, 0}});
}

GradientMatrix safmod_matrix() {
  return complete_matrix("safmod", {"normal", "hguid", "ssmon", "pflim", "srmst", "stopped"},
                         {{0}, {-2, 0}, {-1, 1, 0}, {-2, 0, -1, 0}, {-3, -1, -2, -1, 0}, {-4, -2, -3, -2, -1, 0}});
}

}  // namespace

TEST_CASE("activity gradients") {
  auto g = act_matrix();
  CHECK(gradient(g, "welding", "exchWrkp") == 2);
  CHECK(gradient(g, "exchWrkp", "welding") == -2);
  CHECK(gradient(g, "off", "off") == 0);
}

TEST_CASE("safety-mode gradients") {
  auto g = safmod_matrix();
  CHECK(gradient(g, "srmst", "ssmon") == -2);
  CHECK(gradient(g, "ssmon", "srmst") == 2);
  CHECK(gradient(g, "stopped", "stopped") == 0);
  CHECK_THROWS_AS(gradient(g, "normal", "warp"), ModelError);
}

TEST_CASE("single label") {
  auto g = complete_matrix("x", {"a"}, {{0}});
  CHECK(g.values() == std::vector<std::vector<int>>{{0}});
}

TEST_CASE("malformed matrices are rejected") {
  CHECK_THROWS_AS(complete_matrix("x", {"a", "b"}, {{0}, {1}}), ModelError);
  CHECK_THROWS_AS(complete_matrix("x", {"a", "b"}, {{1}, {1, 0}}), ModelError);
  CHECK_THROWS_AS(complete_matrix("x", {"a", "b"}, {{0, 2}, {1, 0}}), ModelError);
  auto full = complete_matrix("x", {"a", "b"}, {{0, -1}, {1, 0}});
  CHECK(full.at(1, 0) == 1);
}

TEST_CASE("completion is skew-symmetric with a zero diagonal") {
  std::mt19937_64 rng(7);
  for (int round = 0; round < 1000; ++round) {
    std::size_t n = std::uniform_int_distribution<std::size_t>(1, 12)(rng);
    std::vector<std::string> labels;
    std::vector<std::vector<int>> rows(n);
    for (std::size_t k = 0; k < n; ++k) {
      labels.push_back("m" + std::to_string(k));
      for (std::size_t j = 0; j < k; ++j) rows[k].push_back(std::uniform_int_distribution<int>(-9, 9)(rng));
      rows[k].push_back(0);
    }
    auto g = complete_matrix("x", labels, rows);
    REQUIRE(g.size() == n);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(g.at(i, i) == 0);
      for (std::size_t j = 0; j < n; ++j) CHECK(g.at(i, j) == -g.at(j, i));
      for (std::size_t j = 0; j <= i; ++j) CHECK(g.at(i, j) == rows[i][j]);
    }
    CHECK(g.lower_left() == rows);
  }
}

TEST_CASE("override picks the demanded mode closest to the current one") {
  auto g = safmod_matrix();
  CHECK(override_target(g, "normal", {"ssmon", "srmst", "stopped"}, "normal") == "ssmon");
  CHECK(override_target(g, "normal", {}, "normal") == "normal");
  CHECK(override_target(g, "normal", {"srmst", "srmst", "stopped"}, "normal") == "srmst");
}

TEST_CASE("override ignores demands that are farther than the current best") {
  auto g = safmod_matrix();
  std::vector<std::string> demanded{"srmst", "ssmon"};
  auto base = override_target(g, "normal", demanded, "normal");
  demanded.push_back("stopped");
  CHECK(override_target(g, "normal", demanded, "normal") == base);
}
