#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "iglearn/blackwell.hpp"
#include "support.hpp"

using namespace iglearn;

namespace {

bool in_K(const Vec& w) {
  double n2 = 0.0;
  for (double x : w) {
    if (x > 1e-12) return false;
    n2 += x * x;
  }
  return n2 <= 1.0 + 1e-12;
}

// ⟨L, w⟩ + ½‖w‖_q²/η
double ftrl_objective(const OloState& s, const Vec& w) {
  double lin = 0.0, nq = 0.0;
  for (int i = 0; i < s.d; ++i) {
    lin += s.cum_loss[i] * w[i];
    nq += std::pow(std::abs(w[i]), s.q);
  }
  nq = std::pow(nq, 1.0 / s.q);
  return lin + 0.5 * nq * nq / s.eta;
}

Vec random_in_K(int d, Rng& rng) {
  Vec w(d);
  double n2 = 0.0;
  for (double& x : w) {
    x = -rng.uniform();
    n2 += x * x;
  }
  const double r = rng.uniform() / std::sqrt(n2);
  for (double& x : w) x *= r;
  return w;
}

}  // namespace

TEST_CASE("project_K examples") {
  CHECK(support::linf(project_K(Vec{0.5, -2.0}), Vec{0.0, -1.0}) < 1e-15);
  CHECK(project_K(Vec{-0.3, -0.4}) == Vec{-0.3, -0.4});
  CHECK(project_K(Vec{1.0, 1.0}) == Vec{0.0, 0.0});
  CHECK(support::linf(support::grid_projection(Vec{0.5, -2.0}), Vec{0.0, -1.0}) < 1e-6);
}

TEST_CASE("project_K matches grid projection for d <= 3") {
  Rng rng(4);
  for (int t = 0; t < 100; ++t) {
    const int d = 1 + t % 3;
    Vec x(d);
    for (double& v : x) v = rng.uniform(-2.0, 1.0);
    CHECK(support::linf(project_K(x), support::grid_projection(x)) <= 1e-6);
  }
}

TEST_CASE("q exponent and learning rate") {
  CHECK(q_exponent(2) == 2.0);
  CHECK(q_exponent(6) == 2.0);  // ln 6/(ln 6 − 1) > 2 falls back
  CHECK(q_exponent(32) == doctest::Approx(std::log(32.0) / (std::log(32.0) - 1.0)));
  for (int d : {2, 8, 32, 1000}) {
    CHECK(q_exponent(d) > 1.0);
    CHECK(q_exponent(d) <= 2.0);
  }
  CHECK(ftrl_eta(2, 1.0, 100) == doctest::Approx(std::sqrt(2.0 / (3.0 * std::log(2.0))) / 10.0));
}

TEST_CASE("ftrl_next examples with q = 2 and eta = 1") {
  OloState s = OloState::make(2, 1.0, 1);
  s.eta = 1.0;
  CHECK(ftrl_next(s) == Vec{0.0, 0.0});
  s.cum_loss = {1.0, 1.0};
  CHECK(support::linf(ftrl_next(s), Vec{-1 / std::sqrt(2.0), -1 / std::sqrt(2.0)}) < 1e-12);
  CHECK(support::linf(support::grid_projection(Vec{-1.0, -1.0}), ftrl_next(s)) < 1e-6);
  s.cum_loss = {-1.0, 1.0};
  CHECK(support::linf(ftrl_next(s), Vec{0.0, -1.0}) < 1e-12);
}

TEST_CASE("ftrl_next with q < 2 beats random and perturbed points of K") {
  Rng rng(8);
  for (int t = 0; t < 40; ++t) {
    const int d = t % 2 ? 32 : 64;
    OloState s = OloState::make(d, 1.0, 1000);
    REQUIRE(s.q < 2.0);
    const double mag = t < 20 ? 1.0 : 200.0;  // inside the ball, then on its boundary
    for (double& x : s.cum_loss) x = rng.uniform(-0.3, 1.0) * mag;
    FtrlStats st;
    const Vec w = ftrl_next(s, nullptr, &st);
    CHECK(in_K(w));
    const double fw = ftrl_objective(s, w);
    for (int k = 0; k < 500; ++k) CHECK(fw <= ftrl_objective(s, random_in_K(d, rng)) + 1e-9);
    for (int k = 0; k < 200; ++k) {
      Vec y = w;
      for (double& v : y) v += rng.uniform(-1e-3, 1e-3);
      CHECK(fw <= ftrl_objective(s, project_K(y)) + 1e-9);
    }
    CHECK(st.nonconvergence == 0);
  }
}

TEST_CASE("proportional response") {
  CHECK(support::linf(proportional_response(Vec{-0.2, -0.8}).weights(), Vec{0.2, 0.8}) < 1e-15);
  CHECK(proportional_response(Vec{0.0, 0.0}).weights() == Vec{0.5, 0.5});
  const auto th = proportional_response(Vec{-0.2, -0.8});
  const Vec y{0.9, 0.1};
  const auto p = pure_form_payoff(th, y);
  CHECK(std::abs(-0.2 * p[0] - 0.8 * p[1]) <= 1e-15);
}

TEST_CASE("proportional response makes pure-form payoffs orthogonal to w") {
  Rng rng(12);
  for (int d : {2, 8, 32})
    for (int t = 0; t < 1000; ++t) {
      const Vec w = random_in_K(d, rng);
      Vec y(d);
      for (double& v : y) v = rng.uniform();
      const auto p = pure_form_payoff(proportional_response(w), y);
      double ip = 0.0;
      for (int j = 0; j < d; ++j) ip += w[j] * p[j];
      CHECK(std::abs(ip) <= 1e-12);
    }
}

namespace {

// Vertices of {α0 = β1 = 0, α1, β0 ∈ [−1, 1], α1 + β0 ≥ 0}.
const std::vector<std::pair<Vec, Vec>> kA2Vertices = {
    {{0, 1}, {1, 0}}, {{0, 1}, {-1, 0}}, {{0, -1}, {1, 0}}};

double vertex_max(const ActionDistribution& th, const Vec& u) {
  double best = -1e300;
  for (const auto& [a, b] : kA2Vertices) best = std::max(best, saddle_objective(th, u, a, b));
  return best;
}

}  // namespace

TEST_CASE("saddle responder on m = 1 and m = 2") {
  const auto one = saddle_solve(Vec{1.0});
  CHECK(one.theta.weights() == Vec{1.0});
  CHECK(one.value == 0.0);

  const Vec u{0.0, 1.0};
  // Only θ = (1/4, 3/4) keeps the top coordinate nonnegative on every vertex.
  CHECK(vertex_max(validate_distribution(Vec{1.0, 3.0}), u) <= 1e-15);
  CHECK(vertex_max(ActionDistribution::point_mass(2, 1), u) == 0.5);
  const auto r = saddle_solve(u);
  CHECK(r.value <= 1e-6);
  CHECK(r.theta[0] == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(vertex_max(r.theta, u) <= 1e-9);
}

TEST_CASE("saddle responder against a theta grid over A2 vertices") {
  for (const Vec& u : {Vec{0.5, 0.5}, Vec{0.2, 0.8}, Vec{0.9, 0.1}}) {
    double grid_best = 1e300;
    for (int k = 0; k <= 100; ++k) {
      const auto th = validate_distribution(Vec{k / 100.0, 1.0 - k / 100.0 + 1e-300});
      grid_best = std::min(grid_best, vertex_max(th, u));
    }
    const auto r = saddle_solve(u);
    CHECK(vertex_max(r.theta, u) <= grid_best + 1e-9);
    CHECK(r.value == doctest::Approx(vertex_max(r.theta, u)).epsilon(1e-9));
    CHECK(r.value <= 1e-6);
  }
}

TEST_CASE("saddle value is certified by the primal program") {
  Rng rng(31);
  for (int t = 0; t < 200; ++t) {
    const int m = 2 + rng.uniform_int(6);
    const auto u = support::random_theta(m, rng).weights();
    const auto r = saddle_solve(u);
    CHECK(r.value <= kSaddleTol);
    CHECK(saddle_inner_max(r.theta, u) == doctest::Approx(r.value).epsilon(1e-7));
  }
}

TEST_CASE("algb_step") {
  BlackwellState s(2, 1.0, 100, Responder::proportional);
  CHECK(algb_step(s, nullptr).weights() == Vec{0.5, 0.5});
  const PayoffVector p{-1.0, 1.0};
  CHECK(algb_step(s, &p).weights() == Vec{1.0, 0.0});
  CHECK(s.fed() == 1);
}

TEST_CASE("fixed pure-form adversary is approached") {
  const long T = 10000;
  BlackwellState s(2, 1.0, T, Responder::proportional);
  const Vec y{0.9, 0.1};
  Vec sum(2, 0.0);
  for (long t = 0; t < T; ++t) {
    const auto p = pure_form_payoff(s.action(), y);
    for (int j = 0; j < 2; ++j) sum[j] += p[j];
    s.feed(p);
  }
  const double dist = payoff_nonneg_slack(Vec{sum[0] / T, sum[1] / T});
  CHECK(dist <= 3.0 * std::sqrt(std::log(2.0) / T));
}

TEST_CASE("hedge") {
  HedgeState eq(3, 100);
  for (int t = 0; t < 50; ++t) eq.step(Vec{0.4, 0.4, 0.4});
  CHECK(support::linf(eq.action().weights(), Vec(3, 1.0 / 3)) < 1e-12);

  HedgeState h(2, 100);
  for (int t = 0; t < 100; ++t) h.step(Vec{1.0, 0.0});
  CHECK(h.action()[0] > 0.99);
  const double eta = std::sqrt(8.0 * std::log(2.0) / 100.0);
  CHECK(h.action()[0] == doctest::Approx(std::exp(eta * 100) / (std::exp(eta * 100) + 1.0)));

  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 2 + rng.uniform_int(6);
    const long T = 2000;
    HedgeState s(m, T);
    Vec cum(m, 0.0);
    double got = 0.0;
    for (long t = 0; t < T; ++t) {
      Vec r(m);
      for (double& x : r) x = rng.uniform();
      got += s.action().dot(r);
      s.step(r);
      for (int j = 0; j < m; ++j) cum[j] += r[j];
    }
    const double regret = *std::max_element(cum.begin(), cum.end()) - got;
    CHECK(regret <= std::sqrt(T * std::log(m) / 2.0) + 1.0);
  }
}

TEST_CASE("hedge and the Blackwell learner have comparable regret on pure-form streams") {
  // Two arms with equal means and independent noise: any learner pays ~√T.
  const long T = 4096;
  double hedge_total = 0.0, algb_total = 0.0;
  for (int seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    HedgeState h(2, T);
    BlackwellState b(2, 1.0, T, Responder::proportional);
    Vec cum(2, 0.0);
    double gh = 0.0, gb = 0.0;
    for (long t = 0; t < T; ++t) {
      const Vec y{rng.bernoulli(0.5) ? 1.0 : 0.0, rng.bernoulli(0.5) ? 1.0 : 0.0};
      gh += h.action().dot(y);
      gb += b.action().dot(y);
      h.step(y);
      b.feed(pure_form_payoff(b.action(), y));
      cum[0] += y[0];
      cum[1] += y[1];
    }
    const double best = std::max(cum[0], cum[1]);
    hedge_total += best - gh;
    algb_total += best - gb;
  }
  REQUIRE(hedge_total > 0.0);
  REQUIRE(algb_total > 0.0);
  CHECK(algb_total / hedge_total <= 2.0);
  CHECK(algb_total / hedge_total >= 0.5);
}
