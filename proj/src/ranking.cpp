#include "iglearn/ranking.hpp"

#include <algorithm>
#include <numeric>

namespace iglearn::ranking {

namespace {

class ZeroFunction : public sm::SetFunction {
 public:
  explicit ZeroFunction(int n) : n_(n) {}
  int ground_size() const override { return n_; }
  double of_mask(sm::Mask) const override { return 0.0; }

 private:
  int n_;
};

}  // namespace

SequentialObjective::SequentialObjective(
    Vec lambda, std::vector<std::shared_ptr<const sm::SetFunction>> levels)
    : lambda_(std::move(lambda)), levels_(std::move(levels)) {
  if (lambda_.size() != levels_.size() || lambda_.empty())
    throw BadParams("need one level function per position");
  double s = 0.0;
  for (double l : lambda_) {
    if (!(l >= 0.0)) throw BadParams("negative patience weight");
    s += l;
  }
  if (s > 1.0 + 1e-12) throw BadParams("patience weights sum above 1");
}

double SequentialObjective::eval(std::span<const int> slots) const {
  sm::Mask seen = 0;
  double v = 0.0;
  for (int i = 0; i < n(); ++i) {
    if (slots[i] > 0) seen |= sm::Mask{1} << (slots[i] - 1);
    if (lambda_[i] > 0.0) v += lambda_[i] * levels_[i]->of_mask(seen);
  }
  return std::min(1.0, v);
}

ClickFunction::ClickFunction(int n, std::vector<std::pair<double, Vec>> users)
    : n_(n), users_(std::move(users)) {
  for (const auto& [w, q] : users_) {
    if (static_cast<int>(q.size()) != n) throw BadParams("click vector length");
    for (double x : q)
      if (!(x >= 0.0 && x <= 1.0)) throw BadParams("click probability outside [0, 1]");
    if (!(w >= 0.0)) throw BadParams("negative user weight");
  }
}

double ClickFunction::of_mask(sm::Mask s) const {
  double v = 0.0;
  for (const auto& [w, q] : users_) {
    double miss = 1.0;
    for (int j = 0; j < n_; ++j)
      if (s >> j & 1) miss *= 1.0 - q[j];
    v += w * (1.0 - miss);
  }
  return v;
}

SequentialObjective ferreira_objective(int n, const std::vector<FerreiraUser>& users) {
  double total = 0.0;
  for (const auto& u : users) {
    if (u.window < 1 || u.window > n) throw BadParams("window outside 1..n");
    if (!(u.weight >= 0.0)) throw BadParams("negative user weight");
    total += u.weight;
  }
  if (total <= 0.0) throw BadParams("population has zero mass");
  Vec lambda(n, 0.0);
  std::vector<std::vector<std::pair<double, Vec>>> groups(n);
  for (const auto& u : users) {
    lambda[u.window - 1] += u.weight / total;
    groups[u.window - 1].push_back({u.weight / total, u.click});
  }
  std::vector<std::shared_ptr<const sm::SetFunction>> levels;
  for (int i = 0; i < n; ++i) {
    if (lambda[i] <= 0.0) {
      levels.push_back(std::make_shared<ZeroFunction>(n));
      continue;
    }
    for (auto& g : groups[i]) g.first /= lambda[i];
    levels.push_back(std::make_shared<ClickFunction>(n, std::move(groups[i])));
  }
  return SequentialObjective(std::move(lambda), std::move(levels));
}

SequentialObjective sample_user_population(const std::string& model,
                                           const PopulationParams& p, Rng& rng) {
  if (p.n < 1 || p.n > 62) throw BadParams("ranking needs 1 ≤ n ≤ 62");
  if (model == "ferreira") {
    if (!(p.max_click >= 0.0 && p.max_click <= 1.0)) throw BadParams("max_click outside [0, 1]");
    std::vector<FerreiraUser> users(std::max(1, p.users));
    for (auto& u : users) {
      u.weight = rng.uniform(0.1, 1.0);
      u.window = 1 + rng.uniform_int(p.n);
      u.click.resize(p.n);
      for (double& q : u.click) q = rng.uniform(0.0, p.max_click);
    }
    return ferreira_objective(p.n, users);
  }
  if (model == "asadpour") {
    Vec lambda(p.n);
    double s = 0.0;
    for (double& l : lambda) s += (l = rng.uniform(0.1, 1.0));
    for (double& l : lambda) l /= s;
    std::vector<std::shared_ptr<const sm::SetFunction>> levels;
    for (int i = 0; i < p.n; ++i)
      levels.push_back(std::make_shared<sm::CoverageFunction>(
          sm::CoverageFunction::random(p.n, p.universe, p.density, rng)));
    return SequentialObjective(std::move(lambda), std::move(levels));
  }
  throw BadParams("unknown population model '" + model + "'");
}

SequentialObjective population_from_json(const nlohmann::json& j) {
  const std::string model = j.at("model").get<std::string>();
  const int n = j.at("n").get<int>();
  if (model == "ferreira") {
    std::vector<FerreiraUser> users;
    for (const auto& u : j.at("users"))
      users.push_back({u.value("weight", 1.0), u.at("click").get<Vec>(),
                       u.at("window").get<int>()});
    return ferreira_objective(n, users);
  }
  if (model == "asadpour") {
    std::vector<std::shared_ptr<const sm::SetFunction>> levels;
    for (const auto& f : j.at("levels"))
      levels.push_back(std::make_shared<sm::CoverageFunction>(sm::CoverageFunction::from_json(f)));
    return SequentialObjective(j.at("lambda").get<Vec>(), std::move(levels));
  }
  throw BadParams("unknown population model '" + model + "'");
}

FeasiblePoint make_ranking(std::vector<int> slots) {
  return {AppTag::ranking, std::move(slots)};
}

namespace {

FeasiblePoint placed(const FeasiblePoint& pi, int i, int item) {
  FeasiblePoint out = pi;
  out.idx[i] = item;
  return out;
}

}  // namespace

Vec rank_marginals(const FeasiblePoint& pi, int i, const ObjectiveOracle& f, int n) {
  const double base = f(pi);
  Vec y(n);
  for (int j = 0; j < n; ++j) y[j] = f(placed(pi, i, j + 1)) - base;
  return y;
}

PayoffVector rank_payoff(const ActionDistribution& theta, const FeasiblePoint& pi,
                         const ObjectiveOracle& f, int i) {
  return pure_form_payoff(theta, rank_marginals(pi, i, f, theta.size()));
}

std::vector<ExplorationBranch> rank_explore_support(
    const ActionDistribution& theta, const FeasiblePoint& pi, int i) {
  std::vector<FeasiblePoint> probes;
  for (int j = 0; j < theta.size(); ++j) probes.push_back(placed(pi, i, j + 1));
  return uniform_probe_support(theta, std::move(probes));
}

ExplorationSample rank_explore_sample(const ActionDistribution& theta,
                                      const FeasiblePoint& pi, int i, Rng& rng) {
  const int j = rng.uniform_int(theta.size());
  auto b = rank_explore_support(theta, pi, i);
  return {std::move(b[j].w), std::move(b[j].z)};
}

RankingInstance::RankingInstance(int n) : n_(n) {
  if (n < 1 || n > 62) throw BadParams("ranking needs 1 ≤ n ≤ 62");
}

FeasiblePoint RankingInstance::initial_point() const {
  return make_ranking(std::vector<int>(n_, 0));
}

bool RankingInstance::is_feasible(const FeasiblePoint& z) const {
  if (z.tag != AppTag::ranking || static_cast<int>(z.idx.size()) != n_) return false;
  return std::all_of(z.idx.begin(), z.idx.end(), [&](int s) { return s >= 0 && s <= n_; });
}

PayoffVector RankingInstance::payoff(int i, const ActionDistribution& theta,
                                     const FeasiblePoint& z,
                                     const ObjectiveOracle& f) const {
  return rank_payoff(theta, z, f, i);
}

FeasiblePoint RankingInstance::apply(int i, const FeasiblePoint& z, int j) const {
  return placed(z, i, j + 1);
}

std::vector<ExplorationBranch> RankingInstance::explore_support(
    int i, const ActionDistribution& theta, const FeasiblePoint& z) const {
  return rank_explore_support(theta, z, i);
}

ActionDistribution RankingInstance::local_optimum(int i, const FeasiblePoint& z,
                                                  const ObjectiveOracle& f) const {
  return argmax_point_mass(rank_marginals(z, i, f, n_));
}

std::vector<FeasiblePoint> RankingInstance::enumerate_candidates() const {
  if (n_ > 7) throw TooLargeToEnumerate("ranking brute force needs n ≤ 7");
  std::vector<int> perm(n_);
  std::iota(perm.begin(), perm.end(), 1);
  std::vector<FeasiblePoint> out;
  do {
    out.push_back(make_ranking(perm));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

}  // namespace iglearn::ranking
