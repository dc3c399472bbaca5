#pragma once

#include <span>
#include <vector>

#include "iglearn/core.hpp"

namespace iglearn::reserves {

struct PriceGrid {
  Vec rho;  // rho[0] = 0, strictly increasing, within [0, 1]

  explicit PriceGrid(Vec values);
  int size() const { return static_cast<int>(rho.size()); }
};

// {0, 1/m, ..., 1}.
PriceGrid discretize_reserves(int m);
// {0, 1/m, ..., (m−1)/m}: m points.
PriceGrid even_grid(int m);

// Second-price auction with personalized reserves.
double auction_revenue(std::span<const double> r, std::span<const double> v);

// Incremental revenue bidder i brings with reserve r: r when i is the winner
// and max_{j≠i} v_j < r ≤ v_i, else 0.
double revenue_from_reserves(int i, double r, std::span<const double> v);

class AuctionOracle : public ObjectiveOracle {
 public:
  AuctionOracle(Vec v, PriceGrid grid);
  double value(const FeasiblePoint& z) const override;
  std::string tag() const override { return "auction"; }
  const Vec& valuations() const { return v_; }
  const PriceGrid& grid() const { return grid_; }

 private:
  Vec v_;
  PriceGrid grid_;
};

// Direct form: y_j = q^(i)(ρ_j).
PayoffVector mmr_payoff(const ActionDistribution& theta, int i,
                        std::span<const double> v, const PriceGrid& grid);
std::vector<ExplorationBranch> mmr_explore_support(
    const ActionDistribution& theta, int i, int n);
ExplorationSample mmr_explore_sample(const ActionDistribution& theta, int i,
                                     int n, Rng& rng);
FeasiblePoint mmr_finalize(const FeasiblePoint& r, Rng& rng);

FeasiblePoint make_reserves(std::vector<int> grid_idx);

class ReservesInstance : public GreedyInstance {
 public:
  ReservesInstance(int n, PriceGrid grid);

  AppTag tag() const override { return AppTag::reserves; }
  int subproblems() const override { return n_; }
  int action_count(int) const override { return grid_.size(); }
  FeasiblePoint initial_point() const override;
  bool is_feasible(const FeasiblePoint& z) const override;
  // Evaluated through the oracle: y_j = f(ρ_j·1) − f(ρ_j·(1 − e_i)).
  PayoffVector payoff(int i, const ActionDistribution& theta,
                      const FeasiblePoint& z,
                      const ObjectiveOracle& f) const override;
  FeasiblePoint apply(int i, const FeasiblePoint& z, int j) const override;
  std::vector<WeightedPoint> finalize_support(const FeasiblePoint& z) const override;
  std::vector<ExplorationBranch> explore_support(
      int i, const ActionDistribution& theta,
      const FeasiblePoint& z) const override;
  ActionDistribution local_optimum(int i, const FeasiblePoint& z,
                                   const ObjectiveOracle& f) const override;
  double payoff_diameter() const override { return 2.0; }
  double estimator_diameter() const override { return 2.0 * grid_.size(); }
  double gamma() const override { return 0.5; }
  // Every grid vector; m^n ≤ 1e6.
  std::vector<FeasiblePoint> enumerate_candidates() const override;

  const PriceGrid& grid() const { return grid_; }

 private:
  Vec probe_values(int i, const ObjectiveOracle& f) const;
  int n_;
  PriceGrid grid_;
};

}  // namespace iglearn::reserves
