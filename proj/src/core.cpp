#include "iglearn/core.hpp"

#include <cassert>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace iglearn {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed) : seed_(seed), eng_(splitmix64(seed)) {}

Rng Rng::split(std::uint64_t stream) const {
  return Rng(splitmix64(seed_ ^ splitmix64(stream + 0x632BE59BD9B4E019ULL)));
}

double Rng::uniform() {
  return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
}

int Rng::uniform_int(int n) {
  if (n <= 1) return 0;
  const std::uint64_t un = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % un;
  std::uint64_t x;
  do {
    x = eng_();
  } while (x >= limit);
  return static_cast<int>(x % un);
}

int Rng::categorical(std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  double u = uniform() * total;
  int last = 0;
  for (int j = 0; j < static_cast<int>(weights.size()); ++j) {
    if (weights[j] <= 0.0) continue;
    last = j;
    if (u < weights[j]) return j;
    u -= weights[j];
  }
  return last;
}

ActionDistribution ActionDistribution::uniform(int m) {
  if (m < 1) throw BadSimplexPoint("empty action set");
  return ActionDistribution(Vec(m, 1.0 / m));
}

ActionDistribution ActionDistribution::point_mass(int m, int j) {
  if (m < 1 || j < 0 || j >= m) throw BadSimplexPoint("point mass out of range");
  Vec w(m, 0.0);
  w[j] = 1.0;
  return ActionDistribution(std::move(w));
}

int ActionDistribution::sample(Rng& rng) const { return rng.categorical(w_); }

double ActionDistribution::dot(std::span<const double> y) const {
  double s = 0.0;
  for (int j = 0; j < size(); ++j) s += w_[j] * y[j];
  return s;
}

ActionDistribution validate_distribution(std::span<const double> weights) {
  if (weights.empty()) throw BadSimplexPoint("empty weight vector");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w))
      throw BadSimplexPoint("negative or non-finite weight");
    total += w;
  }
  if (total <= 0.0) throw BadSimplexPoint("zero total mass");
  Vec out(weights.begin(), weights.end());
  for (double& w : out) w /= total;
  return ActionDistribution(std::move(out));
}

double payoff_nonneg_slack(std::span<const double> v) {
  double worst = 0.0;
  for (double x : v) worst = std::max(worst, -x);
  return worst;
}

PayoffVector pure_form_payoff(const ActionDistribution& theta,
                              std::span<const double> y) {
  const double avg = theta.dot(y);
  PayoffVector p(y.size());
  for (std::size_t j = 0; j < y.size(); ++j) p[j] = avg - y[j];
  return p;
}

std::vector<ExplorationBranch> uniform_probe_support(
    const ActionDistribution& theta, std::vector<FeasiblePoint> probes) {
  const int m = theta.size();
  std::vector<ExplorationBranch> out;
  out.reserve(m);
  for (int j = 0; j < m; ++j) {
    PayoffVector w(m);
    for (int l = 0; l < m; ++l) w[l] = m * (theta[j] - (l == j ? 1.0 : 0.0));
    out.push_back({1.0 / m, std::move(w), std::move(probes[j])});
  }
  return out;
}

ActionDistribution argmax_point_mass(std::span<const double> y) {
  int best = 0;
  for (int j = 1; j < static_cast<int>(y.size()); ++j)
    if (y[j] > y[best]) best = j;
  return ActionDistribution::point_mass(static_cast<int>(y.size()), best);
}

std::string app_name(AppTag tag) {
  switch (tag) {
    case AppTag::monotone_sm: return "monotone_sm";
    case AppTag::ranking: return "ranking";
    case AppTag::reserves: return "reserves";
    case AppTag::nsm: return "nsm";
  }
  return "unknown";
}

AppTag app_from_name(const std::string& name) {
  for (AppTag t : {AppTag::monotone_sm, AppTag::ranking, AppTag::reserves,
                   AppTag::nsm})
    if (app_name(t) == name) return t;
  throw BadParams("unknown app '" + name + "'");
}

std::string FeasiblePoint::encode() const {
  std::string out;
  out.reserve(1 + 4 * idx.size());
  out.push_back(static_cast<char>(tag));
  for (int v : idx) {
    const auto u = static_cast<std::uint32_t>(v);
    for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((u >> (8 * b)) & 0xFF));
  }
  return out;
}

std::string FeasiblePoint::hex() const {
  std::string out;
  char buf[3];
  for (unsigned char c : encode()) {
    std::snprintf(buf, sizeof buf, "%02x", c);
    out += buf;
  }
  return out;
}

double ObjectiveOracle::operator()(const FeasiblePoint& z) const {
  const double v = value(z);
  assert(v >= -1e-12 && v <= 1.0 + 1e-12);
  return v;
}

FeasiblePoint local_update(const GreedyInstance& inst, int i,
                           const ActionDistribution& theta,
                           const FeasiblePoint& z, Rng& rng) {
  return inst.apply(i, z, theta.sample(rng));
}

FeasiblePoint finalize(const GreedyInstance& inst, const FeasiblePoint& z,
                       Rng& rng) {
  auto support = inst.finalize_support(z);
  if (support.size() == 1) return support.front().z;
  Vec p;
  for (const auto& s : support) p.push_back(s.prob);
  return support[rng.categorical(p)].z;
}

ExplorationSample explore_sample(const GreedyInstance& inst, int i,
                                 const ActionDistribution& theta,
                                 const FeasiblePoint& z, Rng& rng) {
  auto support = inst.explore_support(i, theta, z);
  Vec p;
  for (const auto& b : support) p.push_back(b.prob);
  auto& b = support[rng.categorical(p)];
  return {std::move(b.w), std::move(b.z)};
}

OfflineRun offline_ig_run(const GreedyInstance& inst, const ObjectiveOracle& f,
                          const LocalOptimizer& optimizer, Rng& rng) {
  OfflineRun run;
  FeasiblePoint z = inst.initial_point();
  for (int i = 0; i < inst.subproblems(); ++i) {
    ActionDistribution theta = optimizer(i, z, f);
    const PayoffVector p = inst.payoff(i, theta, z, f);
    if (payoff_nonneg_slack(p) > kNonnegTol)
      throw InfeasibleTheta("subproblem " + std::to_string(i) +
                            " optimizer returned a negative payoff");
    z = local_update(inst, i, theta, z, rng);
    if (!inst.is_feasible(z)) throw InfeasiblePoint("local update left C");
    run.trace.push_back({std::move(theta), z});
  }
  run.point = finalize(inst, z, rng);
  return run;
}

OfflineRun offline_ig_run(const GreedyInstance& inst, const ObjectiveOracle& f,
                          Rng& rng) {
  return offline_ig_run(
      inst, f,
      [&inst](int i, const FeasiblePoint& z, const ObjectiveOracle& g) {
        return inst.local_optimum(i, z, g);
      },
      rng);
}

namespace {

double expected_from(const GreedyInstance& inst, const ObjectiveOracle& f,
                     const LocalOptimizer& optimizer, int i,
                     const FeasiblePoint& z) {
  if (i == inst.subproblems()) {
    double v = 0.0;
    for (const auto& s : inst.finalize_support(z)) v += s.prob * f(s.z);
    return v;
  }
  const ActionDistribution theta = optimizer(i, z, f);
  double v = 0.0;
  for (int j = 0; j < theta.size(); ++j) {
    if (theta[j] <= 0.0) continue;
    v += theta[j] * expected_from(inst, f, optimizer, i + 1, inst.apply(i, z, j));
  }
  return v;
}

}  // namespace

double expected_offline_value(const GreedyInstance& inst,
                              const ObjectiveOracle& f,
                              const LocalOptimizer& optimizer) {
  return expected_from(inst, f, optimizer, 0, inst.initial_point());
}

double expected_offline_value(const GreedyInstance& inst,
                              const ObjectiveOracle& f) {
  return expected_offline_value(
      inst, f, [&inst](int i, const FeasiblePoint& z, const ObjectiveOracle& g) {
        return inst.local_optimum(i, z, g);
      });
}

void AverageOracle::add(const ObjectiveOracle* f, double weight) {
  terms_.emplace_back(f, weight);
  total_ += weight;
}

double AverageOracle::value(const FeasiblePoint& z) const {
  double s = 0.0;
  for (const auto& [f, w] : terms_) s += w * f->value(z);
  return total_ > 0.0 ? s / total_ : 0.0;
}

}  // namespace iglearn
