#pragma once

#include <memory>
#include <vector>

#include <json.hpp>

#include "iglearn/core.hpp"
#include "iglearn/sm.hpp"

namespace iglearn::ranking {

// f(π) = Σ_i λ_i f_i({π_1..π_i}), item ids 1..n, slot value 0 = empty.
class SequentialObjective : public ObjectiveOracle {
 public:
  SequentialObjective(Vec lambda,
                      std::vector<std::shared_ptr<const sm::SetFunction>> levels);

  double eval(std::span<const int> slots) const;
  double value(const FeasiblePoint& z) const override { return eval(z.idx); }
  std::string tag() const override { return "sequential"; }

  int n() const { return static_cast<int>(lambda_.size()); }
  const Vec& lambda() const { return lambda_; }
  const sm::SetFunction& level(int i) const { return *levels_[i]; }

 private:
  Vec lambda_;
  std::vector<std::shared_ptr<const sm::SetFunction>> levels_;
};

struct FerreiraUser {
  double weight = 1.0;  // population share
  Vec click;            // q_{u,j} per item
  int window = 1;       // inspects the top `window` slots
};

// κ(S) = 1 − Π_{j∈S}(1 − q_j), averaged with user weights.
class ClickFunction : public sm::SetFunction {
 public:
  ClickFunction(int n, std::vector<std::pair<double, Vec>> users);
  int ground_size() const override { return n_; }
  double of_mask(sm::Mask s) const override;

 private:
  int n_;
  std::vector<std::pair<double, Vec>> users_;  // weights sum to 1 (or empty)
};

SequentialObjective ferreira_objective(int n, const std::vector<FerreiraUser>& users);

struct PopulationParams {
  int n = 4;
  int users = 6;       // ferreira: number of user types
  double max_click = 0.6;
  int universe = 8;    // asadpour: coverage universe per level
  double density = 0.35;
};

// model: "ferreira" or "asadpour".
SequentialObjective sample_user_population(const std::string& model,
                                           const PopulationParams& params,
                                           Rng& rng);
SequentialObjective population_from_json(const nlohmann::json& j);

FeasiblePoint make_ranking(std::vector<int> slots);

// y_j = f(π + (j+1)·e_i) − f(π), for action j (item j+1).
Vec rank_marginals(const FeasiblePoint& pi, int i, const ObjectiveOracle& f, int n);
PayoffVector rank_payoff(const ActionDistribution& theta, const FeasiblePoint& pi,
                         const ObjectiveOracle& f, int i);
std::vector<ExplorationBranch> rank_explore_support(
    const ActionDistribution& theta, const FeasiblePoint& pi, int i);
ExplorationSample rank_explore_sample(const ActionDistribution& theta,
                                      const FeasiblePoint& pi, int i, Rng& rng);

class RankingInstance : public GreedyInstance {
 public:
  explicit RankingInstance(int n);

  AppTag tag() const override { return AppTag::ranking; }
  int subproblems() const override { return n_; }
  int action_count(int) const override { return n_; }
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
  double payoff_diameter() const override { return 2.0; }
  double estimator_diameter() const override { return 2.0 * n_; }
  double gamma() const override { return 0.5; }
  // Permutations only (they dominate rankings with gaps or duplicates); n ≤ 7.
  std::vector<FeasiblePoint> enumerate_candidates() const override;

 private:
  int n_;
};

}  // namespace iglearn::ranking
