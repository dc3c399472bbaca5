#include "iglearn/reserves.hpp"

#include <cmath>

namespace iglearn::reserves {

PriceGrid::PriceGrid(Vec values) : rho(std::move(values)) {
  if (rho.empty() || rho[0] != 0.0) throw BadParams("price grid must start at 0");
  for (std::size_t j = 1; j < rho.size(); ++j)
    if (!(rho[j] > rho[j - 1])) throw BadParams("price grid must increase strictly");
  if (rho.back() > 1.0) throw BadParams("price grid exceeds 1");
}

PriceGrid discretize_reserves(int m) {
  if (m < 1) throw BadParams("m ≥ 1 required");
  Vec r(m + 1);
  for (int j = 0; j <= m; ++j) r[j] = static_cast<double>(j) / m;
  return PriceGrid(std::move(r));
}

PriceGrid even_grid(int m) {
  if (m < 1) throw BadParams("m ≥ 1 required");
  Vec r(m);
  for (int j = 0; j < m; ++j) r[j] = static_cast<double>(j) / m;
  return PriceGrid(std::move(r));
}

double auction_revenue(std::span<const double> r, std::span<const double> v) {
  int win = -1, second = -1;
  for (int j = 0; j < static_cast<int>(v.size()); ++j) {
    if (v[j] < r[j]) continue;
    if (win < 0 || v[j] > v[win]) {
      second = win;
      win = j;
    } else if (second < 0 || v[j] > v[second]) {
      second = j;
    }
  }
  if (win < 0) return 0.0;
  return std::max(r[win], second < 0 ? 0.0 : v[second]);
}

double revenue_from_reserves(int i, double r, std::span<const double> v) {
  double others = -1.0;
  for (int j = 0; j < static_cast<int>(v.size()); ++j) {
    if (j == i) continue;
    // i must be the winner: strictly above lower indices, weakly above higher.
    if (j < i ? v[j] >= v[i] : v[j] > v[i]) return 0.0;
    others = std::max(others, v[j]);
  }
  return (others < r && r <= v[i]) ? r : 0.0;
}

AuctionOracle::AuctionOracle(Vec v, PriceGrid grid)
    : v_(std::move(v)), grid_(std::move(grid)) {
  for (double x : v_)
    if (!(x >= 0.0 && x <= 1.0)) throw BadParams("valuation outside [0, 1]");
}

double AuctionOracle::value(const FeasiblePoint& z) const {
  Vec r(z.idx.size());
  for (std::size_t j = 0; j < r.size(); ++j) r[j] = grid_.rho[z.idx[j]];
  return auction_revenue(r, v_);
}

PayoffVector mmr_payoff(const ActionDistribution& theta, int i,
                        std::span<const double> v, const PriceGrid& grid) {
  Vec y(grid.size());
  for (int j = 0; j < grid.size(); ++j) y[j] = revenue_from_reserves(i, grid.rho[j], v);
  return pure_form_payoff(theta, y);
}

FeasiblePoint make_reserves(std::vector<int> grid_idx) {
  return {AppTag::reserves, std::move(grid_idx)};
}

std::vector<ExplorationBranch> mmr_explore_support(const ActionDistribution& theta,
                                                   int i, int n) {
  const int m = theta.size();
  std::vector<ExplorationBranch> out;
  out.reserve(2 * m);
  for (int j = 0; j < m; ++j) {
    PayoffVector w(m);
    for (int l = 0; l < m; ++l) w[l] = 2.0 * m * (theta[j] - (l == j ? 1.0 : 0.0));
    PayoffVector neg = w;
    for (double& x : neg) x = -x;
    std::vector<int> all(n, j), drop(n, j);
    drop[i] = 0;
    out.push_back({0.5 / m, std::move(w), make_reserves(std::move(all))});
    out.push_back({0.5 / m, std::move(neg), make_reserves(std::move(drop))});
  }
  return out;
}

ExplorationSample mmr_explore_sample(const ActionDistribution& theta, int i,
                                     int n, Rng& rng) {
  auto b = mmr_explore_support(theta, i, n);
  const int k = rng.uniform_int(static_cast<int>(b.size()));
  return {std::move(b[k].w), std::move(b[k].z)};
}

FeasiblePoint mmr_finalize(const FeasiblePoint& r, Rng& rng) {
  if (rng.bernoulli(0.5)) return make_reserves(std::vector<int>(r.idx.size(), 0));
  return r;
}

ReservesInstance::ReservesInstance(int n, PriceGrid grid)
    : n_(n), grid_(std::move(grid)) {
  if (n < 1) throw BadParams("need at least one bidder");
}

FeasiblePoint ReservesInstance::initial_point() const {
  return make_reserves(std::vector<int>(n_, 0));
}

bool ReservesInstance::is_feasible(const FeasiblePoint& z) const {
  if (z.tag != AppTag::reserves || static_cast<int>(z.idx.size()) != n_) return false;
  for (int j : z.idx)
    if (j < 0 || j >= grid_.size()) return false;
  return true;
}

Vec ReservesInstance::probe_values(int i, const ObjectiveOracle& f) const {
  const int m = grid_.size();
  Vec y(m);
  for (int j = 0; j < m; ++j) {
    std::vector<int> all(n_, j), drop(n_, j);
    drop[i] = 0;
    y[j] = f(make_reserves(std::move(all))) - f(make_reserves(std::move(drop)));
  }
  return y;
}

PayoffVector ReservesInstance::payoff(int i, const ActionDistribution& theta,
                                      const FeasiblePoint&,
                                      const ObjectiveOracle& f) const {
  return pure_form_payoff(theta, probe_values(i, f));
}

FeasiblePoint ReservesInstance::apply(int i, const FeasiblePoint& z, int j) const {
  FeasiblePoint out = z;
  out.idx[i] = j;
  return out;
}

std::vector<WeightedPoint> ReservesInstance::finalize_support(
    const FeasiblePoint& z) const {
  return {{0.5, make_reserves(std::vector<int>(n_, 0))}, {0.5, z}};
}

std::vector<ExplorationBranch> ReservesInstance::explore_support(
    int i, const ActionDistribution& theta, const FeasiblePoint&) const {
  return mmr_explore_support(theta, i, n_);
}

ActionDistribution ReservesInstance::local_optimum(int i, const FeasiblePoint&,
                                                   const ObjectiveOracle& f) const {
  return argmax_point_mass(probe_values(i, f));
}

std::vector<FeasiblePoint> ReservesInstance::enumerate_candidates() const {
  const int m = grid_.size();
  if (std::pow(static_cast<double>(m), n_) > 1e6)
    throw TooLargeToEnumerate("reserves brute force needs m^n ≤ 1e6");
  std::vector<FeasiblePoint> out;
  std::vector<int> idx(n_, 0);
  while (true) {
    out.push_back(make_reserves(idx));
    int c = 0;
    while (c < n_ && ++idx[c] == m) idx[c++] = 0;
    if (c == n_) break;
  }
  return out;
}

}  // namespace iglearn::reserves
