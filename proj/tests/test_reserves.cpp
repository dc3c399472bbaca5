#include <doctest.h>

#include <cmath>

#include "iglearn/reserves.hpp"
#include "support.hpp"

using namespace iglearn;
using namespace iglearn::reserves;

namespace {

const Vec kV{0.8, 0.5, 0.2};

Vec random_profile(int n, Rng& rng) {
  Vec v(n);
  // Coarse values half the time so that ties and grid hits occur.
  for (double& x : v) x = rng.bernoulli(0.5) ? rng.uniform_int(5) / 4.0 : rng.uniform();
  return v;
}

}  // namespace

TEST_CASE("auction revenue") {
  CHECK(auction_revenue(Vec{0.6, 0, 0}, kV) == 0.6);
  CHECK(auction_revenue(Vec{0, 0, 0}, kV) == 0.5);
  CHECK(auction_revenue(Vec{0.9, 0, 0}, kV) == 0.2);
  CHECK(auction_revenue(Vec{0.9, 0.9, 0.9}, kV) == 0.0);
  CHECK(auction_revenue(Vec{0, 0, 0}, Vec{0.5, 0.5}) == 0.5);
}

TEST_CASE("revenue from reserves") {
  CHECK(revenue_from_reserves(0, 0.75, kV) == 0.75);
  CHECK(revenue_from_reserves(0, 0.25, kV) == 0.0);
  CHECK(revenue_from_reserves(0, 0.8, kV) == 0.8);
  CHECK(revenue_from_reserves(0, 0.85, kV) == 0.0);
  for (double r : {0.0, 0.3, 0.5, 0.9}) CHECK(revenue_from_reserves(1, r, kV) == 0.0);
}

TEST_CASE("revenue-from-reserves identity") {
  Rng rng(1);
  for (int t = 0; t < 10000; ++t) {
    const int n = 1 + rng.uniform_int(5);
    const Vec v = random_profile(n, rng);
    const int i = rng.uniform_int(n);
    const double r = rng.bernoulli(0.5) ? v[rng.uniform_int(n)] : rng.uniform();
    Vec all(n, r), drop(n, r);
    drop[i] = 0.0;
    CHECK(revenue_from_reserves(i, r, v) == auction_revenue(all, v) - auction_revenue(drop, v));
  }
}

TEST_CASE("payoff") {
  const auto grid = even_grid(4);
  CHECK(support::linf(mmr_payoff(ActionDistribution::point_mass(4, 3), 0, kV, grid),
                      Vec{0.75, 0.75, 0.75, 0.0}) < 1e-15);
  CHECK(mmr_payoff(ActionDistribution::uniform(4), 1, kV, grid) == Vec(4, 0.0));
  ReservesInstance inst(3, grid);
  AuctionOracle f(kV, grid);
  const auto best = inst.local_optimum(0, inst.initial_point(), f);
  CHECK(best.weights() == Vec{0, 0, 0, 1});
  for (double p : inst.payoff(0, best, inst.initial_point(), f)) CHECK(p >= 0.0);

  Rng rng(2);
  for (int t = 0; t < 500; ++t) {
    const Vec v = random_profile(3, rng);
    const int i = rng.uniform_int(3);
    const auto th = support::random_theta(4, rng);
    AuctionOracle g(v, grid);
    CHECK(support::linf(inst.payoff(i, th, inst.initial_point(), g), mmr_payoff(th, i, v, grid)) <= 1e-15);
  }
}

TEST_CASE("exploration sampler") {
  const auto grid = discretize_reserves(1);
  const auto b = mmr_explore_support(validate_distribution(Vec{0.3, 0.7}), 0, 3);
  REQUIRE(b.size() == 4);
  CHECK(b[2].prob == 0.25);
  CHECK(support::linf(b[2].w, Vec{2.8, -1.2}) < 1e-15);
  CHECK(b[2].z.idx == std::vector<int>{1, 1, 1});
  CHECK(b[3].z.idx == std::vector<int>{0, 1, 1});
  const auto pm = mmr_explore_support(ActionDistribution::point_mass(3, 1), 0, 2);
  CHECK(pm[2].w[1] == 0.0);

  Rng rng(3);
  for (int t = 0; t < 100; ++t) {
    const int n = 1 + rng.uniform_int(4), m = 1 + rng.uniform_int(5);
    const auto g = even_grid(m);
    const Vec v = random_profile(n, rng);
    const int i = rng.uniform_int(n);
    const auto th = support::random_theta(m, rng);
    AuctionOracle f(v, g);
    const auto sup = mmr_explore_support(th, i, n);
    CHECK(support::linf(support::support_mean(sup, f, m), mmr_payoff(th, i, v, g)) <= 1e-12);
    for (const auto& br : sup)
      for (double w : br.w) CHECK(std::abs(w) <= 2.0 * m);
  }
}

TEST_CASE("finalize coin") {
  Rng rng(4);
  int zeros = 0;
  const auto r = make_reserves({2, 1});
  for (int t = 0; t < 10000; ++t) zeros += mmr_finalize(r, rng).idx == std::vector<int>{0, 0};
  CHECK(zeros >= 4700);
  CHECK(zeros <= 5300);
  for (int t = 0; t < 10; ++t) CHECK(mmr_finalize(make_reserves({0, 0}), rng).idx == std::vector<int>{0, 0});

  ReservesInstance inst(3, even_grid(4));
  AuctionOracle f(kV, even_grid(4));
  const auto z = make_reserves({3, 0, 0});
  double mix = 0.0;
  for (const auto& w : inst.finalize_support(z)) mix += w.prob * f(w.z);
  CHECK(mix == doctest::Approx(0.5 * 0.5 + 0.5 * 0.75));
}

TEST_CASE("grids") {
  CHECK(discretize_reserves(4).rho == Vec{0, 0.25, 0.5, 0.75, 1});
  CHECK(discretize_reserves(1).rho == Vec{0, 1});
  CHECK(even_grid(4).rho == Vec{0, 0.25, 0.5, 0.75});
  CHECK_THROWS_AS(PriceGrid(Vec{0.1, 0.5}), BadParams);
  CHECK_THROWS_AS(PriceGrid(Vec{0, 0.5, 0.5}), BadParams);
}

TEST_CASE("discretization loses at most 1/m per profile") {
  Rng rng(5);
  for (int t = 0; t < 100; ++t) {
    Vec v(3);
    for (double& x : v) x = rng.uniform();
    const int m = 1 + rng.uniform_int(6);
    const auto grid = discretize_reserves(m);
    AuctionOracle f(v, grid);
    ReservesInstance inst(3, grid);
    double grid_opt = 0.0;
    for (const auto& z : inst.enumerate_candidates()) grid_opt = std::max(grid_opt, f(z));
    // Continuous reference: a fine sweep of one bidder's reserve, others at 0.
    double cont = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k <= 10000; ++k) {
        Vec r(3, 0.0);
        r[i] = k / 10000.0;
        cont = std::max(cont, auction_revenue(r, v));
      }
    CHECK(cont <= *std::max_element(v.begin(), v.end()) + 1e-15);
    CHECK(cont - grid_opt <= 1.0 / m + 1e-12);
  }
}

TEST_CASE("offline expected revenue reaches half of OPT") {
  Rng rng(6);
  for (int t = 0; t < 150; ++t) {
    const int n = 1 + rng.uniform_int(5), m = 1 + rng.uniform_int(4);
    const auto grid = even_grid(m);
    std::vector<std::unique_ptr<AuctionOracle>> fs;
    AverageOracle avg;
    const int k = 1 + rng.uniform_int(3);
    for (int s = 0; s < k; ++s) {
      fs.push_back(std::make_unique<AuctionOracle>(random_profile(n, rng), grid));
      avg.add(fs.back().get(), 1.0);
    }
    ReservesInstance inst(n, grid);
    double opt = 0.0;
    for (const auto& z : inst.enumerate_candidates()) opt = std::max(opt, avg(z));
    CHECK(expected_offline_value(inst, avg) >= 0.5 * opt - 1e-9);
  }
}
