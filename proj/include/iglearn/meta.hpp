#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "iglearn/bandit.hpp"
#include "iglearn/blackwell.hpp"
#include "iglearn/core.hpp"

namespace iglearn {

struct RoundTrace {
  FeasiblePoint chosen_point;
  double reward = 0.0;
  int exploring_subproblem = -1;
  std::vector<ActionDistribution> thetas;
};

// Full-information transform: one Blackwell learner per subproblem.
class OnlineIg {
 public:
  OnlineIg(const GreedyInstance& inst, long T, bool anytime = false);

  RoundTrace round(const ObjectiveOracle& f, Rng& rng);

  const BlackwellState& learner(int i) const { return learners_[i]; }
  int size() const { return static_cast<int>(learners_.size()); }
  long rounds() const { return round_; }

 private:
  const GreedyInstance& inst_;
  std::vector<BlackwellState> learners_;
  long round_ = 0;
};

// Bandit access to f_t: one evaluation per round. A second call throws.
class ValueOracle {
 public:
  explicit ValueOracle(const ObjectiveOracle& f, Rng* click_rng = nullptr)
      : f_(f), click_rng_(click_rng) {}

  double operator()(const FeasiblePoint& z);
  int calls() const { return calls_; }

 private:
  const ObjectiveOracle& f_;
  Rng* click_rng_;  // when set, returns a Bernoulli(f(z)) click instead
  int calls_ = 0;
};

struct BanditIgOptions {
  bool doubling = false;
  std::optional<double> q;
};

class BanditIg {
 public:
  BanditIg(const GreedyInstance& inst, long T, Rng rng,
           BanditIgOptions opts = {});

  RoundTrace round(ValueOracle& oracle, Rng& rng);

  const BanditLearner& learner(int i) const { return *learners_[i]; }
  int size() const { return static_cast<int>(learners_.size()); }
  long rounds() const { return round_; }

 private:
  const GreedyInstance& inst_;
  std::vector<std::unique_ptr<BanditLearner>> learners_;
  long round_ = 0;
};

inline RoundTrace online_ig_round(OnlineIg& s, const ObjectiveOracle& f,
                                  Rng& rng) {
  return s.round(f, rng);
}
inline RoundTrace bandit_ig_round(BanditIg& s, ValueOracle& oracle, Rng& rng) {
  return s.round(oracle, rng);
}

}  // namespace iglearn
