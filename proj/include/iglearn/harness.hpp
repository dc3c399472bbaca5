#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "iglearn/core.hpp"

namespace iglearn::harness {

struct ConfigError : Error { using Error::Error; };

enum class Feedback { full, bandit };
enum class AdversaryKind { iid, alternating, phase_shift };
enum class BenchmarkMode { brute_force, proxy };

// JSON schema (README has the full table):
//   app, params, feedback, T, seed, adversary{kind, pool, functions},
//   benchmark, doubling, q, click, reward, output
struct ExperimentConfig {
  AppTag app = AppTag::monotone_sm;
  nlohmann::json params = nlohmann::json::object();
  Feedback feedback = Feedback::full;
  long T = 1;
  std::uint64_t seed = 0;
  AdversaryKind adversary = AdversaryKind::iid;
  int pool = 32;
  nlohmann::json functions;  // optional explicit function list
  BenchmarkMode benchmark = BenchmarkMode::brute_force;
  bool doubling = false;
  std::optional<double> q;
  bool click = false;  // bandit value oracle returns Bernoulli(f) clicks
  // Reward column: f_t(z_t) as played, or its exact expectation over the
  // round's local updates and finalize given the round's θs (exploration
  // rounds always use the played point).
  bool expected_reward = false;
  std::string output;

  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

ExperimentConfig load_config(const std::string& path);

std::unique_ptr<GreedyInstance> make_instance(const ExperimentConfig& cfg);

// f_t = pool[index[t]]; fully materialized before any round is played.
struct AdversaryStream {
  std::vector<std::shared_ptr<const ObjectiveOracle>> pool;
  std::vector<int> index;

  long size() const { return static_cast<long>(index.size()); }
  const ObjectiveOracle& at(long t) const { return *pool[index[t]]; }
  std::vector<long> counts() const;
  // Hash of the index sequence and every pool member's values on the
  // instance's candidate points (or a fixed probe set when too many).
  std::uint64_t fingerprint(const GreedyInstance& inst) const;
};

// Relabels points before evaluating: element ids e → e+shift (mod n) for sets
// and rankings, coordinate rotation for reserves and lattice points.
class PermutedOracle : public ObjectiveOracle {
 public:
  PermutedOracle(std::shared_ptr<const ObjectiveOracle> base, AppTag app,
                 int n, int shift);
  double value(const FeasiblePoint& z) const override;
  std::string tag() const override { return "permuted"; }
  FeasiblePoint relabel(const FeasiblePoint& z) const;

 private:
  std::shared_ptr<const ObjectiveOracle> base_;
  AppTag app_;
  int n_, shift_;
};

// Seeded from cfg.seed alone.
AdversaryStream generate_adversary(const ExperimentConfig& cfg);

struct Benchmark {
  FeasiblePoint z;
  double opt_sum = 0.0;
  bool proxy = false;  // proxy: lower bound on OPT
};

Benchmark compute_benchmark(const AdversaryStream& stream,
                            const GreedyInstance& inst, BenchmarkMode mode,
                            Rng& rng);

struct RunRow {
  long t = 0;
  double reward = 0.0;
  double cum_reward = 0.0;
  double cum_gamma_opt = 0.0;
  double cum_gamma_regret = 0.0;
  int explored_subproblem = -1;
  std::uint64_t seed = 0;

  bool operator==(const RunRow&) const = default;
};

struct RegretReport {
  std::vector<RunRow> rows;
  Benchmark bench;
  double gamma = 1.0;
  long explored_rounds = 0;
  long oracle_calls = 0;  // value-oracle calls in bandit mode

  double final_regret() const { return rows.empty() ? 0.0 : rows.back().cum_gamma_regret; }
};

// Writes cfg.output when non-empty.
RegretReport run_experiment(const ExperimentConfig& cfg);

std::string csv_text(std::span<const RunRow> rows);
std::vector<RunRow> parse_csv(const std::string& text);
void write_csv(const std::string& path, std::span<const RunRow> rows);
std::vector<RunRow> read_csv(const std::string& path);

// Least-squares slope of log regret against log T; at least 4 horizons.
// Strict mode throws DegenerateFit on a nonpositive regret, otherwise
// regrets are clamped at 1e-9.
double fit_slope(std::span<const std::pair<double, double>> points,
                 bool strict = true);

struct HorizonSummary {
  long T = 0;
  int seeds = 0;
  double mean = 0.0;
  double stderr_ = 0.0;
};

// Groups (T, final regret) samples by T, sorted by T.
std::vector<HorizonSummary> summarize(std::span<const std::pair<long, double>> samples);
// Reads every *.csv in dir and summarizes their final rows.
std::vector<HorizonSummary> report_dir(const std::string& dir);

// Runs every (T, seed) with seeds base.seed, base.seed+1, ... on `threads`
// workers. Writes out_dir/run_T<T>_s<seed>.csv when out_dir is nonempty.
// Returns (T, final γ-regret) per run, ordered by T then seed; the runs'
// value-oracle call counts go to `oracle_calls` in the same order.
std::vector<std::pair<long, double>> run_sweep(const ExperimentConfig& base,
                                               std::span<const long> horizons,
                                               int seeds, const std::string& out_dir,
                                               int threads = 0,
                                               std::vector<long>* oracle_calls = nullptr);

// "2^10..2^16" (powers of two), "1024,4096" or a single integer.
std::vector<long> parse_horizons(const std::string& text);

// Output directory: IGLEARN_OUT_DIR when set, else "runs".
std::string default_out_dir();

}  // namespace iglearn::harness
