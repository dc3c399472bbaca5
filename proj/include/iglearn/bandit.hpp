#pragma once

#include <memory>
#include <optional>
#include <span>
#include <utility>

#include "iglearn/blackwell.hpp"

namespace iglearn {

// D_p^{-2/3} D_phat^{2/3} (ln d)^{1/3} T^{-1/3}, clamped to [1/T, 1].
double tune_q(double D_p, double D_phat, int d, long T);

struct BanditConfig {
  int d = 2;
  double D_p = 1.0;
  double D_phat = 1.0;
  long T = 1;
  Responder responder = Responder::proportional;
  std::optional<double> q;  // overrides tune_q; 0 disables exploration
};

class BanditLearner {
 public:
  virtual ~BanditLearner() = default;
  // Current θ and this round's exploration coin.
  virtual std::pair<ActionDistribution, bool> begin_round() = 0;
  virtual void feed(std::span<const double> phat) = 0;
  virtual long explored() const = 0;
  virtual const BlackwellState& inner() const = 0;
};

// Coin-flip exploration around a full-information learner that receives
// p̂/q on exploration rounds and is frozen otherwise.
class BanditState : public BanditLearner {
 public:
  BanditState(const BanditConfig& cfg, Rng rng);

  std::pair<ActionDistribution, bool> begin_round() override;
  void feed(std::span<const double> phat) override;
  long explored() const override { return explored_; }
  const BlackwellState& inner() const override { return inner_; }

  double q() const { return q_; }
  const ActionDistribution& action() const { return inner_.action(); }

 private:
  double q_;
  BlackwellState inner_;
  Rng rng_;
  bool awaiting_feed_ = false;
  long explored_ = 0;
};

// Horizon-free wrapper: restarts a fresh BanditState tuned for horizon
// guesses 1, 2, 4, ... .
class DoublingBandit : public BanditLearner {
 public:
  DoublingBandit(const BanditConfig& cfg, Rng rng);

  std::pair<ActionDistribution, bool> begin_round() override;
  void feed(std::span<const double> phat) override;
  long explored() const override;
  const BlackwellState& inner() const override { return current_->inner(); }

  // 1-based rounds at which epochs started, with their horizon guesses.
  const std::vector<long>& epoch_starts() const { return starts_; }
  const std::vector<long>& epoch_guesses() const { return guesses_; }

 private:
  BanditConfig cfg_;
  Rng rng_;
  std::unique_ptr<BanditState> current_;
  long round_ = 0;
  long epoch_end_ = 0;
  long explored_before_ = 0;
  std::vector<long> starts_, guesses_;
};

std::unique_ptr<BanditLearner> doubling_wrap(const BanditConfig& cfg, Rng rng);

}  // namespace iglearn
