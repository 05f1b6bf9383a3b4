#include <doctest.h>

#include <random>
#include <set>

#include "qaia/descent.hpp"
#include "qaia/io.hpp"
#include "qaia/oracle.hpp"
#include "support/reference.hpp"

using namespace qaia;

TEST_CASE("degenerate ferromagnetic pair") {
  auto inst = IsingInstance::create(InstanceData{2, {0, 0}, {{0, 1, -1.0}}, 0.0, {}});
  auto ex = brute_force(inst);
  CHECK(ex.ground_energy == -1.0);
  CHECK(ex.evaluations == 4);
  REQUIRE(ex.ground_configs.size() == 2);
  std::set<std::string> got;
  for (auto& c : ex.ground_configs) got.insert(c.to_string());
  CHECK(got == std::set<std::string>{"++", "--"});
}

TEST_CASE("single spin with offset") {
  auto inst = IsingInstance::create(InstanceData{1, {1.0}, {}, 3.0, {}});
  auto ex = brute_force(inst);
  CHECK(ex.ground_energy == 2.0);
  REQUIRE(ex.ground_configs.size() == 1);
  CHECK(ex.ground_configs[0][0] == -1);
}

TEST_CASE("brute force agrees with the naive evaluator") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto inst = seed % 2 ? generate_random_instance(InstanceKind::spin_glass, 10, seed)
                         : qaia::testing::random_instance(10, seed, 0.5);
    auto ex = brute_force(inst);
    auto naive = qaia::testing::naive_ground(inst);
    CHECK(std::abs(ex.ground_energy - naive.energy) <= kEnergyTolerance);
    REQUIRE(ex.ground_configs.size() == naive.masks.size());
    std::set<SpinConfig> a(ex.ground_configs.begin(), ex.ground_configs.end());
    std::set<SpinConfig> b;
    for (auto m : naive.masks) b.insert(config_from_mask(m, 10));
    CHECK(a == b);
  }
}

TEST_CASE("cap is enforced") {
  auto big = generate_random_instance(InstanceKind::ferro_ring, 25, 0);
  CHECK_THROWS_WITH_AS(brute_force(big), doctest::Contains("cap is 24"), OracleCapError);
  auto mid = generate_random_instance(InstanceKind::ferro_ring, 17, 0);
  CHECK_THROWS_AS(enumerate_local_minima(mid), OracleCapError);
}

TEST_CASE("n = 20 ring") {
  auto inst = generate_random_instance(InstanceKind::ferro_ring, 20, 0);
  auto ex = brute_force(inst);
  CHECK(ex.ground_energy == -20.0);
  CHECK(ex.ground_configs.size() == 2);
}

TEST_CASE("zero-field ground sets are closed under global flip") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto inst = generate_random_instance(InstanceKind::spin_glass, 9, seed);
    auto ex = brute_force(inst);
    std::set<SpinConfig> s(ex.ground_configs.begin(), ex.ground_configs.end());
    for (auto& c : ex.ground_configs) CHECK(s.count(c.negated()) == 1);
  }
}

TEST_CASE("brute force is invariant under spin permutation") {
  std::mt19937_64 rng(4);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto inst = qaia::testing::random_instance(9, seed, 0.7);
    auto perm = qaia::testing::random_permutation(9, rng);
    auto a = brute_force(inst);
    auto b = brute_force(qaia::testing::permuted(inst, perm));
    CHECK(std::abs(a.ground_energy - b.ground_energy) <= kEnergyTolerance);
    std::set<SpinConfig> moved;
    for (auto& c : a.ground_configs) {
      std::vector<std::int8_t> s(9);
      for (std::size_t i = 0; i < 9; ++i) s[perm[i]] = c[i];
      moved.insert(SpinConfig(s));
    }
    CHECK(moved == std::set<SpinConfig>(b.ground_configs.begin(), b.ground_configs.end()));
  }
}

TEST_CASE("local minima enumeration") {
  SUBCASE("flat landscape lists everything") {
    auto flat = IsingInstance::create(InstanceData{3, {0, 0, 0}, {}, 0.0, {}});
    CHECK(enumerate_local_minima(flat).size() == 8);
  }
  SUBCASE("ring n=4 includes both aligned states first") {
    auto ring = generate_random_instance(InstanceKind::ferro_ring, 4, 0);
    auto mins = enumerate_local_minima(ring);
    REQUIRE(mins.size() >= 2);
    CHECK(mins[0].energy == -4.0);
    CHECK(mins[1].energy == -4.0);
  }
  SUBCASE("sorted, and a superset of the ground states") {
    auto inst = qaia::testing::random_instance(10, 77);
    auto mins = enumerate_local_minima(inst);
    for (std::size_t k = 1; k < mins.size(); ++k) CHECK(mins[k - 1].energy <= mins[k].energy);
    std::set<SpinConfig> all;
    for (auto& m : mins) all.insert(m.config);
    for (auto& g : brute_force(inst).ground_configs) CHECK(all.count(g) == 1);
  }
  SUBCASE("every descent from every start lands in the list") {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      auto inst = qaia::testing::random_instance(8, 300 + seed, 0.6);
      auto mins = enumerate_local_minima(inst);
      std::set<SpinConfig> all;
      for (auto& m : mins) all.insert(m.config);
      for (std::uint64_t m = 0; m < 256; ++m) {
        REQUIRE(all.count(steepest_descent(inst, config_from_mask(m, 8)).config) == 1);
      }
    }
  }
}
