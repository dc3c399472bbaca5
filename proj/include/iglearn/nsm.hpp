#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <json.hpp>

#include "iglearn/core.hpp"
#include "iglearn/sm.hpp"

namespace iglearn::nsm {

// f on the lattice {0..m−1}^n (grid indices of R = {ρ_1 < ... < ρ_m}).
class LatticeFunction : public ObjectiveOracle {
 public:
  LatticeFunction(int n, int m) : n_(n), m_(m) {}
  virtual double at(std::span<const int> x) const = 0;
  double value(const FeasiblePoint& z) const override { return at(z.idx); }
  std::string tag() const override { return "lattice"; }
  int n() const { return n_; }
  int m() const { return m_; }

 private:
  int n_, m_;
};

class LatticeTable : public LatticeFunction {
 public:
  LatticeTable(int n, int m, Vec table);
  double at(std::span<const int> x) const override;
  const Vec& table() const { return table_; }
  nlohmann::json to_json() const;
  static LatticeTable from_json(const nlohmann::json& j);

 private:
  Vec table_;  // index Σ x_i m^i
};

LatticeTable tabulate(const LatticeFunction& f);
// Random modular terms plus weighted pairwise cut terms, rescaled to [0, 1].
LatticeTable random_cut_plus_modular(int n, int m, Rng& rng);
// Nested-coverage function plus a coordinate-reflected one, rescaled.
LatticeTable random_coverage_complement(int n, int m, Rng& rng);
// Coordinates relabeled: g(x) = f(x ∘ σ), x_σ(i) read as coordinate i.
LatticeTable rotate_coordinates(const LatticeTable& f, int shift);

// R = {0, 1} embedding of a set function.
class SetLattice : public LatticeFunction {
 public:
  explicit SetLattice(std::shared_ptr<const sm::SetFunction> f);
  double at(std::span<const int> x) const override;

 private:
  std::shared_ptr<const sm::SetFunction> f_;
};

// Continuous f on [0,1]^n restricted to the grid {0, 1/levels, ..., 1}.
class GridLattice : public LatticeFunction {
 public:
  GridLattice(int n, int levels, std::function<double(std::span<const double>)> f);
  double at(std::span<const int> x) const override;

 private:
  std::function<double(std::span<const double>)> f_;
};

// Largest positive f(x+e_i+e_j) − f(x+e_i) − f(x+e_j) + f(x) over the lattice.
double submodularity_violation(const LatticeFunction& f);

FeasiblePoint make_lattice_point(std::vector<int> idx);
// Upper bound at frontier i: lower on coordinates < i, top level elsewhere.
FeasiblePoint upper_of(const FeasiblePoint& lower, int i, int m);

struct Marginals {
  Vec alpha;  // α(ρ_k) = f(ρ_k, lower_{−i}) − f(lower)
  Vec beta;   // β(ρ_k) = f(ρ_k, upper_{−i}) − f(upper)
};

Marginals nsm_marginals(const FeasiblePoint& lower, int i,
                        const ObjectiveOracle& f, int m);
double zeta(const Marginals& mg, int hat, int prime);
PayoffVector nsm_payoff(const ActionDistribution& theta, const Marginals& mg);
PayoffVector nsm_payoff(const ActionDistribution& theta,
                        const FeasiblePoint& lower, int i,
                        const ObjectiveOracle& f, int m);
ActionDistribution nsm_local_optimize(const Marginals& mg);
std::vector<ExplorationBranch> nsm_explore_support(
    const ActionDistribution& theta, const FeasiblePoint& lower, int i, int m);
ExplorationSample nsm_explore_sample(const ActionDistribution& theta,
                                     const FeasiblePoint& lower, int i, int m,
                                     Rng& rng);

class NsmInstance : public GreedyInstance {
 public:
  NsmInstance(int n, int m);

  AppTag tag() const override { return AppTag::nsm; }
  int subproblems() const override { return n_; }
  int action_count(int) const override { return m_; }
  FeasiblePoint initial_point() const override;
  bool is_feasible(const FeasiblePoint& z) const override;
  PayoffVector payoff(int i, const ActionDistribution& theta,
                      const FeasiblePoint& z,
                      const ObjectiveOracle& f) const override;
  FeasiblePoint apply(int i, const FeasiblePoint& z, int j) const override;
  std::vector<ExplorationBranch> explore_support(
      int i, const ActionDistribution& theta,
      const FeasiblePoint& z) const override;
  ActionDistribution local_optimum(int i, const FeasiblePoint& z,
                                   const ObjectiveOracle& f) const override;
  double payoff_diameter() const override { return 3.0; }
  double estimator_diameter() const override { return 6.0 * m_; }
  Responder responder() const override { return Responder::saddle; }
  double gamma() const override { return 0.5; }
  // Every lattice point; m^n ≤ 1e6.
  std::vector<FeasiblePoint> enumerate_candidates() const override;

 private:
  int n_, m_;
};

}  // namespace iglearn::nsm
