#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include <json.hpp>

#include "iglearn/core.hpp"

namespace iglearn::sm {

using Mask = std::uint64_t;

Mask to_mask(std::span<const int> elems);

class SetFunction {
 public:
  virtual ~SetFunction() = default;
  virtual int ground_size() const = 0;
  virtual double of_mask(Mask s) const = 0;
};

// f(S) = w(∪_{e∈S} covers[e]) / w(universe); universe of at most 64 items.
class CoverageFunction : public SetFunction {
 public:
  CoverageFunction(std::vector<Mask> covers, Vec weights);

  static CoverageFunction random(int n, int universe, double density, Rng& rng);
  static CoverageFunction from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  int ground_size() const override { return static_cast<int>(covers_.size()); }
  double of_mask(Mask s) const override;

  const std::vector<Mask>& covers() const { return covers_; }
  const Vec& weights() const { return weights_; }

 private:
  std::vector<Mask> covers_;
  Vec weights_;
  double total_;
};

// Set oracle over points whose idx lists distinct element ids.
class SetOracle : public ObjectiveOracle {
 public:
  explicit SetOracle(std::shared_ptr<const SetFunction> f, std::string name = "set")
      : f_(std::move(f)), name_(std::move(name)) {}
  double value(const FeasiblePoint& z) const override;
  std::string tag() const override { return name_; }
  const SetFunction& function() const { return *f_; }

 private:
  std::shared_ptr<const SetFunction> f_;
  std::string name_;
};

FeasiblePoint make_set(std::vector<int> elems);

// y_j = f(z ∪ {j}) − f(z).
Vec sm_marginals(const FeasiblePoint& z, const ObjectiveOracle& f, int n);
PayoffVector sm_payoff(const ActionDistribution& theta, const FeasiblePoint& z,
                       const ObjectiveOracle& f);
FeasiblePoint sm_local_update(const ActionDistribution& theta,
                              const FeasiblePoint& z, Rng& rng);
std::vector<ExplorationBranch> sm_explore_support(
    const ActionDistribution& theta, const FeasiblePoint& z);
ExplorationSample sm_explore_sample(const ActionDistribution& theta,
                                    const FeasiblePoint& z, Rng& rng);

class CardinalityInstance : public GreedyInstance {
 public:
  CardinalityInstance(int n, int k);

  AppTag tag() const override { return AppTag::monotone_sm; }
  int subproblems() const override { return k_; }
  int action_count(int) const override { return n_; }
  FeasiblePoint initial_point() const override { return make_set({}); }
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
  double payoff_diameter() const override { return 2.0; }
  double estimator_diameter() const override { return 2.0 * n_; }
  double gamma() const override;
  // All subsets of size ≤ k; n ≤ 12.
  std::vector<FeasiblePoint> enumerate_candidates() const override;

  int n() const { return n_; }
  int k() const { return k_; }

 private:
  int n_, k_;
};

}  // namespace iglearn::sm
