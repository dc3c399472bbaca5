#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace iglearn {

using Vec = std::vector<double>;
using PayoffVector = std::vector<double>;

// Slack allowed on "payoff >= 0" checks.
inline constexpr double kNonnegTol = 1e-9;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BadSimplexPoint : Error { using Error::Error; };
struct InfeasibleTheta : Error { using Error::Error; };
struct InfeasiblePoint : Error { using Error::Error; };
struct BanditContractViolation : Error { using Error::Error; };
struct FeedWithoutExplore : Error { using Error::Error; };
struct TooLargeToEnumerate : Error { using Error::Error; };
struct LpInfeasible : Error { using Error::Error; };
struct SaddleValuePositive : Error { using Error::Error; };
struct DegenerateFit : Error { using Error::Error; };
struct BadParams : Error { using Error::Error; };

// Seeded, splittable source of randomness. Child streams are derived from the
// parent seed only, so a split never perturbs the parent's sequence.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  Rng split(std::uint64_t stream) const;
  std::uint64_t seed() const { return seed_; }

  std::uint64_t next() { return eng_(); }
  double uniform();  // [0, 1)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  bool bernoulli(double p) { return uniform() < p; }
  int uniform_int(int n);  // [0, n)
  // Index drawn proportionally to nonnegative weights.
  int categorical(std::span<const double> weights);

 private:
  std::uint64_t seed_;
  std::mt19937_64 eng_;
};

std::uint64_t splitmix64(std::uint64_t x);

// θ: probability vector over a finite index set.
class ActionDistribution {
 public:
  static ActionDistribution uniform(int m);
  static ActionDistribution point_mass(int m, int j);

  int size() const { return static_cast<int>(w_.size()); }
  double operator[](int j) const { return w_[j]; }
  const Vec& weights() const { return w_; }
  int sample(Rng& rng) const;
  double dot(std::span<const double> y) const;

  bool operator==(const ActionDistribution&) const = default;

 private:
  friend ActionDistribution validate_distribution(std::span<const double>);
  explicit ActionDistribution(Vec w) : w_(std::move(w)) {}
  Vec w_;
};

// Normalizes nonnegative weights; throws BadSimplexPoint otherwise.
ActionDistribution validate_distribution(std::span<const double> weights);

// l∞ distance of v to the nonnegative orthant.
double payoff_nonneg_slack(std::span<const double> v);

// Payoff_j = θᵀy − y_j.
PayoffVector pure_form_payoff(const ActionDistribution& theta,
                              std::span<const double> y);

enum class AppTag : std::uint8_t {
  monotone_sm = 1,
  ranking = 2,
  reserves = 3,
  nsm = 4,
};

std::string app_name(AppTag tag);
AppTag app_from_name(const std::string& name);

// Every application encodes its points as an index vector: sorted element ids
// (sets), slot contents (rankings) or grid indices (reserves, lattice points).
struct FeasiblePoint {
  AppTag tag = AppTag::monotone_sm;
  std::vector<int> idx;

  // Tag byte followed by 32-bit little-endian indices.
  std::string encode() const;
  std::string hex() const;
  bool operator==(const FeasiblePoint&) const = default;
};

class ObjectiveOracle {
 public:
  virtual ~ObjectiveOracle() = default;
  virtual double value(const FeasiblePoint& z) const = 0;
  virtual std::string tag() const = 0;

  double operator()(const FeasiblePoint& z) const;
};

struct WeightedPoint {
  double prob;
  FeasiblePoint z;
};

struct ExplorationBranch {
  double prob;
  PayoffVector w;
  FeasiblePoint z;
};

struct ExplorationSample {
  PayoffVector w;
  FeasiblePoint z;
};

enum class Responder { proportional, saddle };

// Pure-form exploration: probe j ~ Uniform[m] with weight m(θ_j·1 − e_j).
std::vector<ExplorationBranch> uniform_probe_support(
    const ActionDistribution& theta, std::vector<FeasiblePoint> probes);

// Point mass on the first maximizer of y.
ActionDistribution argmax_point_mass(std::span<const double> y);

// Offline description of an iterative greedy algorithm. Subproblems are
// indexed 0..N-1. The update parameter of subproblem i is a distribution over
// action_count(i) indices, and its local update applies one drawn index.
class GreedyInstance {
 public:
  virtual ~GreedyInstance() = default;

  virtual AppTag tag() const = 0;
  virtual int subproblems() const = 0;
  virtual int action_count(int i) const = 0;
  virtual FeasiblePoint initial_point() const = 0;
  virtual bool is_feasible(const FeasiblePoint& z) const = 0;

  virtual PayoffVector payoff(int i, const ActionDistribution& theta,
                              const FeasiblePoint& z,
                              const ObjectiveOracle& f) const = 0;
  virtual FeasiblePoint apply(int i, const FeasiblePoint& z, int j) const = 0;
  virtual std::vector<WeightedPoint> finalize_support(
      const FeasiblePoint& z) const {
    return {{1.0, z}};
  }
  virtual std::vector<ExplorationBranch> explore_support(
      int i, const ActionDistribution& theta, const FeasiblePoint& z) const = 0;

  // Offline local optimizer: a θ with nonnegative payoff.
  virtual ActionDistribution local_optimum(int i, const FeasiblePoint& z,
                                           const ObjectiveOracle& f) const = 0;

  virtual double payoff_diameter() const = 0;
  virtual double estimator_diameter() const = 0;
  virtual Responder responder() const { return Responder::proportional; }
  virtual double gamma() const = 0;

  // Candidate maximizers for brute-force benchmarks.
  virtual std::vector<FeasiblePoint> enumerate_candidates() const = 0;
};

FeasiblePoint local_update(const GreedyInstance& inst, int i,
                           const ActionDistribution& theta,
                           const FeasiblePoint& z, Rng& rng);
FeasiblePoint finalize(const GreedyInstance& inst, const FeasiblePoint& z,
                       Rng& rng);
ExplorationSample explore_sample(const GreedyInstance& inst, int i,
                                 const ActionDistribution& theta,
                                 const FeasiblePoint& z, Rng& rng);

using LocalOptimizer = std::function<ActionDistribution(
    int i, const FeasiblePoint& z, const ObjectiveOracle& f)>;

struct OfflineStep {
  ActionDistribution theta;
  FeasiblePoint z;
};

struct OfflineRun {
  FeasiblePoint point;
  std::vector<OfflineStep> trace;
};

OfflineRun offline_ig_run(const GreedyInstance& inst, const ObjectiveOracle& f,
                          const LocalOptimizer& optimizer, Rng& rng);
OfflineRun offline_ig_run(const GreedyInstance& inst, const ObjectiveOracle& f,
                          Rng& rng);

// Exact E[f(z)] of an offline run, enumerating every sampled index and every
// finalize outcome.
double expected_offline_value(const GreedyInstance& inst,
                              const ObjectiveOracle& f,
                              const LocalOptimizer& optimizer);
double expected_offline_value(const GreedyInstance& inst,
                              const ObjectiveOracle& f);

// Weighted average of oracles; stays in [0, 1].
class AverageOracle : public ObjectiveOracle {
 public:
  void add(const ObjectiveOracle* f, double weight);
  double value(const FeasiblePoint& z) const override;
  std::string tag() const override { return "average"; }

 private:
  std::vector<std::pair<const ObjectiveOracle*, double>> terms_;
  double total_ = 0.0;
};

}  // namespace iglearn
