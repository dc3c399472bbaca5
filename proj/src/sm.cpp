#include "iglearn/sm.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace iglearn::sm {

Mask to_mask(std::span<const int> elems) {
  Mask m = 0;
  for (int e : elems) m |= Mask{1} << e;
  return m;
}

CoverageFunction::CoverageFunction(std::vector<Mask> covers, Vec weights)
    : covers_(std::move(covers)), weights_(std::move(weights)), total_(0.0) {
  if (weights_.empty() || weights_.size() > 64)
    throw BadParams("coverage universe must have 1..64 items");
  for (double w : weights_) {
    if (!(w >= 0.0)) throw BadParams("negative coverage weight");
    total_ += w;
  }
  if (total_ <= 0.0) throw BadParams("coverage weights sum to zero");
  if (covers_.empty() || covers_.size() > 62) throw BadParams("bad ground set size");
}

CoverageFunction CoverageFunction::random(int n, int universe, double density,
                                          Rng& rng) {
  std::vector<Mask> covers(n, 0);
  Vec w(universe);
  for (int u = 0; u < universe; ++u) w[u] = rng.uniform(0.05, 1.0);
  for (int e = 0; e < n; ++e)
    for (int u = 0; u < universe; ++u)
      if (rng.bernoulli(density)) covers[e] |= Mask{1} << u;
  return CoverageFunction(std::move(covers), std::move(w));
}

double CoverageFunction::of_mask(Mask s) const {
  Mask covered = 0;
  while (s) {
    const int e = std::countr_zero(s);
    covered |= covers_[e];
    s &= s - 1;
  }
  double v = 0.0;
  while (covered) {
    v += weights_[std::countr_zero(covered)];
    covered &= covered - 1;
  }
  return std::min(1.0, v / total_);
}

nlohmann::json CoverageFunction::to_json() const {
  nlohmann::json sets = nlohmann::json::array();
  for (Mask c : covers_) {
    std::vector<int> items;
    for (int u = 0; u < 64; ++u)
      if (c >> u & 1) items.push_back(u);
    sets.push_back(items);
  }
  return {{"universe", weights_.size()}, {"sets", sets}, {"weights", weights_}};
}

CoverageFunction CoverageFunction::from_json(const nlohmann::json& j) {
  Vec w = j.at("weights").get<Vec>();
  std::vector<Mask> covers;
  for (const auto& s : j.at("sets")) {
    Mask m = 0;
    for (int u : s.get<std::vector<int>>()) {
      if (u < 0 || u >= static_cast<int>(w.size())) throw BadParams("coverage item out of range");
      m |= Mask{1} << u;
    }
    covers.push_back(m);
  }
  return CoverageFunction(std::move(covers), std::move(w));
}

double SetOracle::value(const FeasiblePoint& z) const {
  return f_->of_mask(to_mask(z.idx));
}

FeasiblePoint make_set(std::vector<int> elems) {
  std::sort(elems.begin(), elems.end());
  elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
  return {AppTag::monotone_sm, std::move(elems)};
}

namespace {

FeasiblePoint with(const FeasiblePoint& z, int j) {
  FeasiblePoint out = z;
  auto it = std::lower_bound(out.idx.begin(), out.idx.end(), j);
  if (it == out.idx.end() || *it != j) out.idx.insert(it, j);
  return out;
}

}  // namespace

Vec sm_marginals(const FeasiblePoint& z, const ObjectiveOracle& f, int n) {
  const double base = f(z);
  Vec y(n);
  for (int j = 0; j < n; ++j) y[j] = f(with(z, j)) - base;
  return y;
}

PayoffVector sm_payoff(const ActionDistribution& theta, const FeasiblePoint& z,
                       const ObjectiveOracle& f) {
  return pure_form_payoff(theta, sm_marginals(z, f, theta.size()));
}

FeasiblePoint sm_local_update(const ActionDistribution& theta,
                              const FeasiblePoint& z, Rng& rng) {
  return with(z, theta.sample(rng));
}

std::vector<ExplorationBranch> sm_explore_support(
    const ActionDistribution& theta, const FeasiblePoint& z) {
  std::vector<FeasiblePoint> probes;
  for (int j = 0; j < theta.size(); ++j) probes.push_back(with(z, j));
  return uniform_probe_support(theta, std::move(probes));
}

ExplorationSample sm_explore_sample(const ActionDistribution& theta,
                                    const FeasiblePoint& z, Rng& rng) {
  const int j = rng.uniform_int(theta.size());
  auto b = sm_explore_support(theta, z);
  return {std::move(b[j].w), std::move(b[j].z)};
}

CardinalityInstance::CardinalityInstance(int n, int k) : n_(n), k_(k) {
  if (k < 1 || k > n || n > 62) throw BadParams("need 1 ≤ k ≤ n ≤ 62");
}

bool CardinalityInstance::is_feasible(const FeasiblePoint& z) const {
  if (z.tag != AppTag::monotone_sm || static_cast<int>(z.idx.size()) > k_) return false;
  for (std::size_t a = 0; a < z.idx.size(); ++a) {
    if (z.idx[a] < 0 || z.idx[a] >= n_) return false;
    if (a > 0 && z.idx[a] <= z.idx[a - 1]) return false;
  }
  return true;
}

PayoffVector CardinalityInstance::payoff(int, const ActionDistribution& theta,
                                         const FeasiblePoint& z,
                                         const ObjectiveOracle& f) const {
  return sm_payoff(theta, z, f);
}

FeasiblePoint CardinalityInstance::apply(int, const FeasiblePoint& z, int j) const {
  return with(z, j);
}

std::vector<ExplorationBranch> CardinalityInstance::explore_support(
    int, const ActionDistribution& theta, const FeasiblePoint& z) const {
  return sm_explore_support(theta, z);
}

ActionDistribution CardinalityInstance::local_optimum(
    int, const FeasiblePoint& z, const ObjectiveOracle& f) const {
  return argmax_point_mass(sm_marginals(z, f, n_));
}

double CardinalityInstance::gamma() const { return 1.0 - std::exp(-1.0); }

std::vector<FeasiblePoint> CardinalityInstance::enumerate_candidates() const {
  if (n_ > 12) throw TooLargeToEnumerate("monotone_sm brute force needs n ≤ 12");
  std::vector<FeasiblePoint> out;
  for (Mask s = 0; s < (Mask{1} << n_); ++s) {
    if (std::popcount(s) > k_) continue;
    std::vector<int> elems;
    for (int e = 0; e < n_; ++e)
      if (s >> e & 1) elems.push_back(e);
    out.push_back(make_set(std::move(elems)));
  }
  return out;
}

}  // namespace iglearn::sm
