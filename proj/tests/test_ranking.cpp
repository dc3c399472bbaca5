#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "iglearn/ranking.hpp"
#include "support.hpp"

using namespace iglearn;
using namespace iglearn::ranking;

namespace {

// λ = (½, ½), both levels f({1}) = .7, f({2}) = .4, f({1,2}) = .8.
SequentialObjective example() {
  auto f = std::make_shared<support::TableSet>(2, Vec{0.0, 0.7, 0.4, 0.8});
  return SequentialObjective({0.5, 0.5}, {f, f});
}

// OPT over every slot vector in {0..n}^n.
double brute_opt(const SequentialObjective& f) {
  const int n = f.n();
  std::vector<int> s(n, 0);
  double best = 0.0;
  while (true) {
    best = std::max(best, f.eval(s));
    int c = 0;
    while (c < n && ++s[c] > n) s[c++] = 0;
    if (c == n) break;
  }
  return best;
}

}  // namespace

TEST_CASE("objective examples") {
  const auto f = example();
  CHECK(f.eval(std::vector<int>{1, 2}) == doctest::Approx(0.75));
  CHECK(f.eval(std::vector<int>{0, 0}) == 0.0);
  CHECK(brute_opt(f) == doctest::Approx(0.75));
  CHECK(f.eval(std::vector<int>{2, 1}) < 0.75);
}

TEST_CASE("payoff at the first position") {
  const auto f = example();
  const auto pi = make_ranking({0, 0});
  CHECK(support::linf(rank_payoff(ActionDistribution::point_mass(2, 0), pi, f, 0), Vec{0.0, 0.3}) < 1e-15);
  for (double p : rank_payoff(ActionDistribution::point_mass(2, 0), pi, f, 0)) CHECK(p >= 0.0);
  auto zero = std::make_shared<support::TableSet>(2, Vec{0, 0, 0, 0});
  SequentialObjective flat({0.5, 0.5}, {zero, zero});
  CHECK(rank_payoff(ActionDistribution::uniform(2), pi, flat, 0) == Vec{0.0, 0.0});
}

TEST_CASE("exploration sampler") {
  const auto branches = rank_explore_support(ActionDistribution::uniform(2), make_ranking({0, 0}), 0);
  REQUIRE(branches.size() == 2);
  CHECK(branches[1].w == Vec{1.0, -1.0});
  CHECK(branches[1].z.idx == std::vector<int>{2, 0});
  const auto pm = rank_explore_support(ActionDistribution::point_mass(3, 2), make_ranking({0, 0, 0}), 1);
  CHECK(pm[2].w[2] == 0.0);

  Rng rng(1);
  for (int t = 0; t < 100; ++t) {
    const int n = 2 + rng.uniform_int(5);
    const auto f = sample_user_population(t % 2 ? "ferreira" : "asadpour", {n, 5, 0.7, 8, 0.35}, rng);
    const int i = rng.uniform_int(n);
    std::vector<int> slots(n, 0);
    for (int s = 0; s < i; ++s) slots[s] = rng.uniform_int(n + 1);
    const auto pi = make_ranking(slots);
    const auto th = support::random_theta(n, rng);
    CHECK(support::linf(support::support_mean(rank_explore_support(th, pi, i), f, n),
                        rank_payoff(th, pi, f, i)) <= 1e-12);
  }
}

TEST_CASE("ferreira population") {
  const auto one = ferreira_objective(2, {{1.0, {0.5, 0.5}, 2}});
  CHECK(one.level(1).of_mask(0b11) == doctest::Approx(0.75));
  const auto none = ferreira_objective(3, {{1.0, {0, 0, 0}, 2}, {2.0, {0, 0, 0}, 3}});
  CHECK(brute_opt(none) == 0.0);
  const auto sure = ferreira_objective(3, {{1.0, {0.2, 1.0, 0.1}, 2}});
  CHECK(sure.eval(std::vector<int>{1, 2, 0}) == doctest::Approx(1.0));
  CHECK(sure.eval(std::vector<int>{2, 0, 0}) == doctest::Approx(1.0));
  CHECK_THROWS_AS(ferreira_objective(2, {{1.0, {1.5, 0.1}, 1}}), BadParams);
}

TEST_CASE("ferreira click functions are monotone and submodular") {
  Rng rng(2);
  for (int t = 0; t < 20; ++t) {
    const int n = 2 + rng.uniform_int(5);
    const auto f = sample_user_population("ferreira", {n, 4, 0.9, 8, 0.35}, rng);
    for (int lvl = 0; lvl < n; ++lvl) {
      const auto& g = f.level(lvl);
      for (sm::Mask a = 0; a < (sm::Mask{1} << n); ++a)
        for (sm::Mask b = 0; b < (sm::Mask{1} << n); ++b) {
          CHECK(g.of_mask(a | b) + g.of_mask(a & b) <= g.of_mask(a) + g.of_mask(b) + 1e-12);
          if ((a & b) == a) CHECK(g.of_mask(a) <= g.of_mask(b) + 1e-12);
        }
    }
  }
}

TEST_CASE("offline greedy reaches half of OPT") {
  Rng rng(3);
  for (int t = 0; t < 60; ++t) {
    const int n = 2 + rng.uniform_int(4);
    const auto f = sample_user_population(t % 2 ? "ferreira" : "asadpour", {n, 5, 0.7, 8, 0.35}, rng);
    RankingInstance inst(n);
    const double opt = brute_opt(f);
    CHECK(expected_offline_value(inst, f) >= 0.5 * opt - 1e-9);
    // Permutations attain the same optimum.
    double perm = 0.0;
    for (const auto& z : inst.enumerate_candidates()) perm = std::max(perm, f(z));
    CHECK(perm == doctest::Approx(opt).epsilon(1e-12));
  }
}

TEST_CASE("population json") {
  const nlohmann::json j = {{"model", "ferreira"},
                            {"n", 2},
                            {"users", {{{"weight", 1.0}, {"click", {0.5, 0.5}}, {"window", 2}}}}};
  CHECK(population_from_json(j).eval(std::vector<int>{1, 2}) == doctest::Approx(0.75));
}
