#include "iglearn/bandit.hpp"

#include <algorithm>
#include <cmath>

namespace iglearn {

double tune_q(double D_p, double D_phat, int d, long T) {
  const double Td = static_cast<double>(std::max(1L, T));
  const double q = std::pow(D_p, -2.0 / 3.0) * std::pow(D_phat, 2.0 / 3.0) *
                   std::cbrt(std::log(static_cast<double>(std::max(d, 2)))) /
                   std::cbrt(Td);
  return std::clamp(q, 1.0 / Td, 1.0);
}

namespace {

double resolve_q(const BanditConfig& c) {
  if (c.q) {
    if (*c.q < 0.0 || *c.q > 1.0) throw BadParams("exploration probability outside [0, 1]");
    return *c.q;
  }
  return tune_q(c.D_p, c.D_phat, c.d, c.T);
}

BlackwellState make_inner(const BanditConfig& c, double q) {
  // The inner learner sees p̂/q on about qT rounds.
  const double qq = q > 0.0 ? q : 1.0;
  const long rounds = std::max(1L, static_cast<long>(std::ceil(qq * static_cast<double>(c.T))));
  return BlackwellState(c.d, c.D_phat / qq, rounds, c.responder);
}

}  // namespace

BanditState::BanditState(const BanditConfig& cfg, Rng rng)
    : q_(resolve_q(cfg)), inner_(make_inner(cfg, q_)), rng_(rng) {}

std::pair<ActionDistribution, bool> BanditState::begin_round() {
  const bool explore = q_ > 0.0 && rng_.bernoulli(q_);
  awaiting_feed_ = explore;
  return {inner_.action(), explore};
}

void BanditState::feed(std::span<const double> phat) {
  if (!awaiting_feed_) throw FeedWithoutExplore("feed on a non-exploration round");
  awaiting_feed_ = false;
  ++explored_;
  Vec scaled(phat.begin(), phat.end());
  for (double& v : scaled) v /= q_;
  inner_.feed(scaled);
}

DoublingBandit::DoublingBandit(const BanditConfig& cfg, Rng rng)
    : cfg_(cfg), rng_(rng) {}

std::pair<ActionDistribution, bool> DoublingBandit::begin_round() {
  ++round_;
  if (!current_ || round_ > epoch_end_) {
    const long guess = guesses_.empty() ? 1 : 2 * guesses_.back();
    if (current_) explored_before_ += current_->explored();
    BanditConfig c = cfg_;
    c.T = guess;
    current_ = std::make_unique<BanditState>(c, rng_.split(guesses_.size()));
    starts_.push_back(round_);
    guesses_.push_back(guess);
    epoch_end_ = round_ + guess - 1;
  }
  return current_->begin_round();
}

void DoublingBandit::feed(std::span<const double> phat) {
  if (!current_) throw FeedWithoutExplore("feed before any round");
  current_->feed(phat);
}

long DoublingBandit::explored() const {
  return explored_before_ + (current_ ? current_->explored() : 0);
}

std::unique_ptr<BanditLearner> doubling_wrap(const BanditConfig& cfg, Rng rng) {
  return std::make_unique<DoublingBandit>(cfg, rng);
}

}  // namespace iglearn
