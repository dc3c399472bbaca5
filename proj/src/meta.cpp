#include "iglearn/meta.hpp"

namespace iglearn {

OnlineIg::OnlineIg(const GreedyInstance& inst, long T, bool anytime)
    : inst_(inst) {
  for (int i = 0; i < inst.subproblems(); ++i)
    learners_.emplace_back(inst.action_count(i), inst.payoff_diameter(), T,
                           inst.responder(), anytime);
}

RoundTrace OnlineIg::round(const ObjectiveOracle& f, Rng& rng) {
  const int N = size();
  RoundTrace tr;
  std::vector<FeasiblePoint> before;
  before.reserve(N);
  FeasiblePoint z = inst_.initial_point();
  for (int i = 0; i < N; ++i) {
    tr.thetas.push_back(learners_[i].action());
    before.push_back(z);
    z = local_update(inst_, i, tr.thetas.back(), z, rng);
  }
  tr.chosen_point = finalize(inst_, z, rng);
  tr.reward = f(tr.chosen_point);
  for (int i = 0; i < N; ++i)
    learners_[i].feed(inst_.payoff(i, tr.thetas[i], before[i], f));
  ++round_;
  return tr;
}

double ValueOracle::operator()(const FeasiblePoint& z) {
  if (++calls_ > 1)
    throw BanditContractViolation("value oracle queried twice in one round");
  const double v = f_(z);
  if (click_rng_) return click_rng_->bernoulli(v) ? 1.0 : 0.0;
  return v;
}

BanditIg::BanditIg(const GreedyInstance& inst, long T, Rng rng,
                   BanditIgOptions opts)
    : inst_(inst) {
  for (int i = 0; i < inst.subproblems(); ++i) {
    BanditConfig c;
    c.d = inst.action_count(i);
    c.D_p = inst.payoff_diameter();
    c.D_phat = inst.estimator_diameter();
    c.T = T;
    c.responder = inst.responder();
    c.q = opts.q;
    if (opts.doubling)
      learners_.push_back(doubling_wrap(c, rng.split(i)));
    else
      learners_.push_back(std::make_unique<BanditState>(c, rng.split(i)));
  }
}

RoundTrace BanditIg::round(ValueOracle& oracle, Rng& rng) {
  const int N = size();
  RoundTrace tr;
  FeasiblePoint z = inst_.initial_point();
  for (int i = 0; i < N; ++i) {
    auto [theta, explore] = learners_[i]->begin_round();
    if (explore) {
      ExplorationSample s = explore_sample(inst_, i, theta, z, rng);
      const double v = oracle(s.z);
      for (double& w : s.w) w *= v;
      learners_[i]->feed(s.w);
      tr.thetas.push_back(std::move(theta));
      tr.chosen_point = std::move(s.z);
      tr.reward = v;
      tr.exploring_subproblem = i;
      break;
    }
    z = local_update(inst_, i, theta, z, rng);
    tr.thetas.push_back(std::move(theta));
  }
  if (tr.exploring_subproblem < 0) {
    tr.chosen_point = finalize(inst_, z, rng);
    tr.reward = oracle(tr.chosen_point);  // observed and ignored
  }
  if (oracle.calls() != 1)
    throw BanditContractViolation("value oracle not queried exactly once");
  ++round_;
  return tr;
}

}  // namespace iglearn
