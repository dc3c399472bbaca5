#include "iglearn/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>
#include <atomic>
#include <exception>
#include <mutex>

#include "iglearn/meta.hpp"
#include "iglearn/nsm.hpp"
#include "iglearn/ranking.hpp"
#include "iglearn/reserves.hpp"
#include "iglearn/sm.hpp"

namespace iglearn::harness {

using nlohmann::json;

namespace {

constexpr const char* kCsvHeader =
    "t,reward,cum_reward,cum_gamma_opt,cum_gamma_regret,explored_subproblem,seed";

template <class E>
E enum_from(const json& j, const char* key, std::initializer_list<std::pair<const char*, E>> names,
            E fallback) {
  if (!j.contains(key)) return fallback;
  const std::string s = j.at(key).get<std::string>();
  for (auto [n, e] : names)
    if (s == n) return e;
  throw ConfigError(std::string("bad value for '") + key + "': " + s);
}

const char* feedback_name(Feedback f) { return f == Feedback::full ? "full" : "bandit"; }

const char* adversary_name(AdversaryKind k) {
  switch (k) {
    case AdversaryKind::iid: return "iid";
    case AdversaryKind::alternating: return "alternating";
    case AdversaryKind::phase_shift: return "phase_shift";
  }
  return "iid";
}

int param_int(const json& p, const char* key) {
  if (!p.contains(key)) throw ConfigError(std::string("missing params.") + key);
  return p.at(key).get<int>();
}

reserves::PriceGrid grid_of(const json& p) {
  if (p.contains("rho")) return reserves::PriceGrid(p.at("rho").get<Vec>());
  const int m = param_int(p, "m");
  const std::string kind = p.value("grid", "even");
  if (kind == "even") return reserves::even_grid(m);
  if (kind == "discretize") return reserves::discretize_reserves(m);
  throw ConfigError("params.grid must be 'even' or 'discretize'");
}

ranking::PopulationParams population_of(const json& p) {
  ranking::PopulationParams pp;
  pp.n = param_int(p, "n");
  pp.users = p.value("users", pp.users);
  pp.max_click = p.value("max_click", pp.max_click);
  pp.universe = p.value("universe", pp.universe);
  pp.density = p.value("density", pp.density);
  return pp;
}

std::shared_ptr<const ObjectiveOracle> random_function(const ExperimentConfig& cfg,
                                                       Rng& rng) {
  const json& p = cfg.params;
  switch (cfg.app) {
    case AppTag::monotone_sm: {
      const int n = param_int(p, "n");
      auto f = std::make_shared<sm::CoverageFunction>(sm::CoverageFunction::random(
          n, p.value("universe", std::min(64, 2 * n)), p.value("density", 0.35), rng));
      return std::make_shared<sm::SetOracle>(std::move(f), "coverage");
    }
    case AppTag::ranking:
      return std::make_shared<ranking::SequentialObjective>(ranking::sample_user_population(
          p.value("model", "ferreira"), population_of(p), rng));
    case AppTag::reserves: {
      Vec v(param_int(p, "n"));
      for (double& x : v) x = rng.uniform();
      return std::make_shared<reserves::AuctionOracle>(std::move(v), grid_of(p));
    }
    case AppTag::nsm: {
      const int n = param_int(p, "n"), m = param_int(p, "m");
      const std::string family = p.value("family", "cut");
      if (family == "cut")
        return std::make_shared<nsm::LatticeTable>(nsm::random_cut_plus_modular(n, m, rng));
      if (family == "coverage")
        return std::make_shared<nsm::LatticeTable>(nsm::random_coverage_complement(n, m, rng));
      throw ConfigError("params.family must be 'cut' or 'coverage'");
    }
  }
  throw ConfigError("unknown app");
}

std::shared_ptr<const ObjectiveOracle> function_from_json(const ExperimentConfig& cfg,
                                                          const json& j) {
  switch (cfg.app) {
    case AppTag::monotone_sm:
      return std::make_shared<sm::SetOracle>(
          std::make_shared<sm::CoverageFunction>(sm::CoverageFunction::from_json(j)),
          "coverage");
    case AppTag::ranking:
      return std::make_shared<ranking::SequentialObjective>(ranking::population_from_json(j));
    case AppTag::reserves:
      return std::make_shared<reserves::AuctionOracle>(j.at("v").get<Vec>(),
                                                       grid_of(cfg.params));
    case AppTag::nsm:
      return std::make_shared<nsm::LatticeTable>(nsm::LatticeTable::from_json(j));
  }
  throw ConfigError("unknown app");
}

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::string fmt(double x) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

template <class T>
T parse_field(std::string_view s) {
  T v{};
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw ConfigError("bad CSV field '" + std::string(s) + "'");
  return v;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  static const std::set<std::string> known = {
      "app", "params", "feedback", "T", "seed", "adversary",
      "benchmark", "doubling", "q", "click", "reward", "output"};
  try {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [k, _] : j.items())
      if (!known.count(k)) throw ConfigError("unknown config key '" + k + "'");
    ExperimentConfig c;
    c.app = app_from_name(j.at("app").get<std::string>());
    c.params = j.value("params", json::object());
    c.feedback = enum_from<Feedback>(j, "feedback",
                                     {{"full", Feedback::full}, {"bandit", Feedback::bandit}},
                                     Feedback::full);
    c.T = j.at("T").get<long>();
    if (c.T < 1) throw ConfigError("T must be ≥ 1");
    c.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("adversary")) {
      const json& a = j.at("adversary");
      c.adversary = enum_from<AdversaryKind>(a, "kind",
                                             {{"iid", AdversaryKind::iid},
                                              {"alternating", AdversaryKind::alternating},
                                              {"phase_shift", AdversaryKind::phase_shift}},
                                             AdversaryKind::iid);
      c.pool = a.value("pool", c.pool);
      if (c.pool < 1) throw ConfigError("adversary.pool must be ≥ 1");
      if (a.contains("functions")) {
        c.functions = a.at("functions");
        if (!c.functions.is_array() || c.functions.empty())
          throw ConfigError("adversary.functions must be a nonempty array");
      }
    }
    c.benchmark = enum_from<BenchmarkMode>(j, "benchmark",
                                           {{"brute_force", BenchmarkMode::brute_force},
                                            {"proxy", BenchmarkMode::proxy}},
                                           BenchmarkMode::brute_force);
    c.doubling = j.value("doubling", false);
    if (j.contains("q")) {
      c.q = j.at("q").get<double>();
      if (!(*c.q >= 0.0 && *c.q <= 1.0)) throw ConfigError("q must lie in [0, 1]");
    }
    c.click = j.value("click", false);
    const std::string reward = j.value("reward", "realized");
    if (reward != "realized" && reward != "expected")
      throw ConfigError("reward must be 'realized' or 'expected'");
    c.expected_reward = reward == "expected";
    c.output = j.value("output", "");
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const BadParams& e) {
    throw ConfigError(e.what());
  }
}

json ExperimentConfig::to_json() const {
  json a = {{"kind", adversary_name(adversary)}, {"pool", pool}};
  if (!functions.is_null()) a["functions"] = functions;
  json j = {{"app", app_name(app)},
            {"params", params},
            {"feedback", feedback_name(feedback)},
            {"T", T},
            {"seed", seed},
            {"adversary", a},
            {"benchmark", benchmark == BenchmarkMode::proxy ? "proxy" : "brute_force"},
            {"doubling", doubling},
            {"click", click},
            {"reward", expected_reward ? "expected" : "realized"}};
  if (q) j["q"] = *q;
  if (!output.empty()) j["output"] = output;
  return j;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  return ExperimentConfig::from_json(j);
}

std::unique_ptr<GreedyInstance> make_instance(const ExperimentConfig& cfg) {
  const json& p = cfg.params;
  try {
    switch (cfg.app) {
      case AppTag::monotone_sm:
        return std::make_unique<sm::CardinalityInstance>(param_int(p, "n"), param_int(p, "k"));
      case AppTag::ranking:
        return std::make_unique<ranking::RankingInstance>(param_int(p, "n"));
      case AppTag::reserves:
        return std::make_unique<reserves::ReservesInstance>(param_int(p, "n"), grid_of(p));
      case AppTag::nsm:
        return std::make_unique<nsm::NsmInstance>(param_int(p, "n"), param_int(p, "m"));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("params: ") + e.what());
  } catch (const BadParams& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("unknown app");
}

std::vector<long> AdversaryStream::counts() const {
  std::vector<long> c(pool.size(), 0);
  for (int i : index) ++c[i];
  return c;
}

std::uint64_t AdversaryStream::fingerprint(const GreedyInstance& inst) const {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (int i : index) h = fnv1a(h, &i, sizeof i);
  std::vector<FeasiblePoint> probes;
  try {
    probes = inst.enumerate_candidates();
  } catch (const TooLargeToEnumerate&) {
    probes = {inst.initial_point()};
  }
  if (probes.size() > 256) probes.resize(256);
  for (const auto& f : pool)
    for (const auto& z : probes) {
      const double v = f->value(z);
      h = fnv1a(h, &v, sizeof v);
    }
  return h;
}

PermutedOracle::PermutedOracle(std::shared_ptr<const ObjectiveOracle> base,
                               AppTag app, int n, int shift)
    : base_(std::move(base)), app_(app), n_(n), shift_(((shift % n) + n) % n) {}

FeasiblePoint PermutedOracle::relabel(const FeasiblePoint& z) const {
  FeasiblePoint out = z;
  switch (app_) {
    case AppTag::monotone_sm:
      for (int& e : out.idx) e = (e + shift_) % n_;
      std::sort(out.idx.begin(), out.idx.end());
      break;
    case AppTag::ranking:
      for (int& s : out.idx)
        if (s > 0) s = (s - 1 + shift_) % n_ + 1;
      break;
    case AppTag::reserves:
    case AppTag::nsm:
      for (int i = 0; i < n_; ++i) out.idx[(i + shift_) % n_] = z.idx[i];
      break;
  }
  return out;
}

double PermutedOracle::value(const FeasiblePoint& z) const {
  return base_->value(relabel(z));
}

AdversaryStream generate_adversary(const ExperimentConfig& cfg) {
  Rng rng = Rng(cfg.seed).split(1);
  AdversaryStream s;
  if (!cfg.functions.is_null()) {
    try {
      for (const auto& fj : cfg.functions) s.pool.push_back(function_from_json(cfg, fj));
    } catch (const json::exception& e) {
      throw ConfigError(std::string("adversary.functions: ") + e.what());
    } catch (const BadParams& e) {
      throw ConfigError(e.what());
    }
  }
  const int n = param_int(cfg.params, "n");
  s.index.resize(cfg.T);
  switch (cfg.adversary) {
    case AdversaryKind::iid: {
      if (s.pool.empty())
        for (int p = 0; p < cfg.pool; ++p) s.pool.push_back(random_function(cfg, rng));
      const int P = static_cast<int>(s.pool.size());
      for (long t = 0; t < cfg.T; ++t) s.index[t] = rng.uniform_int(P);
      break;
    }
    case AdversaryKind::alternating: {
      while (s.pool.size() < 2) s.pool.push_back(random_function(cfg, rng));
      const long P = static_cast<long>(s.pool.size());
      for (long t = 0; t < cfg.T; ++t) s.index[t] = static_cast<int>(t % P);
      break;
    }
    case AdversaryKind::phase_shift: {
      auto base = s.pool.empty() ? random_function(cfg, rng) : s.pool.front();
      s.pool = {base, std::make_shared<PermutedOracle>(base, cfg.app, n, 1)};
      for (long t = 0; t < cfg.T; ++t) s.index[t] = t < cfg.T / 2 ? 0 : 1;
      break;
    }
  }
  return s;
}

Benchmark compute_benchmark(const AdversaryStream& stream,
                            const GreedyInstance& inst, BenchmarkMode mode,
                            Rng& rng) {
  const std::vector<long> counts = stream.counts();
  auto total = [&](const FeasiblePoint& z) {
    double s = 0.0;
    for (std::size_t p = 0; p < counts.size(); ++p)
      if (counts[p] > 0) s += counts[p] * stream.pool[p]->value(z);
    return s;
  };
  Benchmark b;
  if (mode == BenchmarkMode::brute_force) {
    bool first = true;
    for (auto& z : inst.enumerate_candidates()) {
      const double v = total(z);
      if (first || v > b.opt_sum) {
        b.opt_sum = v;
        b.z = std::move(z);
        first = false;
      }
    }
    return b;
  }
  AverageOracle avg;
  for (std::size_t p = 0; p < counts.size(); ++p)
    if (counts[p] > 0) avg.add(stream.pool[p].get(), static_cast<double>(counts[p]));
  OfflineRun run = offline_ig_run(inst, avg, rng);
  b.proxy = true;
  b.z = run.point;
  b.opt_sum = total(run.point);
  if (!run.trace.empty()) {
    const double last = total(run.trace.back().z);
    if (last > b.opt_sum) {
      b.opt_sum = last;
      b.z = run.trace.back().z;
    }
  }
  return b;
}

RegretReport run_experiment(const ExperimentConfig& cfg) {
  const auto inst = make_instance(cfg);
  const AdversaryStream stream = generate_adversary(cfg);
  const Rng root(cfg.seed);
  Rng bench_rng = root.split(2);
  RegretReport rep;
  rep.bench = compute_benchmark(stream, *inst, cfg.benchmark, bench_rng);
  rep.gamma = inst->gamma();

  Vec star(stream.pool.size());
  for (std::size_t p = 0; p < star.size(); ++p) star[p] = stream.pool[p]->value(rep.bench.z);

  Rng play = root.split(4);
  Rng clicks = root.split(5);
  std::unique_ptr<OnlineIg> full;
  std::unique_ptr<BanditIg> bandit;
  if (cfg.feedback == Feedback::full)
    full = std::make_unique<OnlineIg>(*inst, cfg.T);
  else
    bandit = std::make_unique<BanditIg>(*inst, cfg.T, root.split(3),
                                        BanditIgOptions{cfg.doubling, cfg.q});

  rep.rows.reserve(cfg.T);
  double cum_reward = 0.0, cum_opt = 0.0;
  for (long t = 0; t < cfg.T; ++t) {
    const ObjectiveOracle& f = stream.at(t);
    RoundTrace tr;
    if (full) {
      tr = full->round(f, play);
    } else {
      ValueOracle oracle(f, cfg.click ? &clicks : nullptr);
      tr = bandit->round(oracle, play);
      rep.oracle_calls += oracle.calls();
    }
    double reward;
    if (cfg.expected_reward && tr.exploring_subproblem < 0)
      reward = expected_offline_value(
          *inst, f, [&tr](int i, const FeasiblePoint&, const ObjectiveOracle&) {
            return tr.thetas[i];
          });
    else
      reward = f(tr.chosen_point);
    cum_reward += reward;
    cum_opt += rep.gamma * star[stream.index[t]];
    if (tr.exploring_subproblem >= 0) ++rep.explored_rounds;
    rep.rows.push_back({t + 1, reward, cum_reward, cum_opt, cum_opt - cum_reward,
                        tr.exploring_subproblem, cfg.seed});
  }
  if (!cfg.output.empty()) write_csv(cfg.output, rep.rows);
  return rep;
}

std::string csv_text(std::span<const RunRow> rows) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto& r : rows) {
    out += std::to_string(r.t);
    for (double x : {r.reward, r.cum_reward, r.cum_gamma_opt, r.cum_gamma_regret}) {
      out += ',';
      out += fmt(x);
    }
    out += ',';
    out += std::to_string(r.explored_subproblem);
    out += ',';
    out += std::to_string(r.seed);
    out += '\n';
  }
  return out;
}

std::vector<RunRow> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw ConfigError("not a run CSV");
  std::vector<RunRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string_view> f;
    std::string_view rest(line);
    for (std::size_t pos; (pos = rest.find(',')) != std::string_view::npos;) {
      f.push_back(rest.substr(0, pos));
      rest.remove_prefix(pos + 1);
    }
    f.push_back(rest);
    if (f.size() != 7) throw ConfigError("run CSV row has " + std::to_string(f.size()) + " fields");
    rows.push_back({parse_field<long>(f[0]), parse_field<double>(f[1]),
                    parse_field<double>(f[2]), parse_field<double>(f[3]),
                    parse_field<double>(f[4]), parse_field<int>(f[5]),
                    parse_field<std::uint64_t>(f[6])});
  }
  return rows;
}

void write_csv(const std::string& path, std::span<const RunRow> rows) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << csv_text(rows);
}

std::vector<RunRow> read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str());
}

double fit_slope(std::span<const std::pair<double, double>> points, bool strict) {
  if (points.size() < 4) throw DegenerateFit("slope fit needs at least 4 horizons");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto [T, r] : points) {
    if (!(T > 0)) throw DegenerateFit("nonpositive horizon");
    if (r <= 0.0 && strict) throw DegenerateFit("nonpositive regret " + fmt(r) + " at T=" + fmt(T));
    const double x = std::log(T), y = std::log(std::max(r, 1e-9));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(points.size());
  const double den = n * sxx - sx * sx;
  if (den <= 0.0) throw DegenerateFit("horizons must differ");
  return (n * sxy - sx * sy) / den;
}

std::vector<HorizonSummary> summarize(std::span<const std::pair<long, double>> samples) {
  std::map<long, Vec> by;
  for (auto [T, r] : samples) by[T].push_back(r);
  std::vector<HorizonSummary> out;
  for (const auto& [T, v] : by) {
    HorizonSummary h{T, static_cast<int>(v.size()), 0.0, 0.0};
    for (double x : v) h.mean += x;
    h.mean /= v.size();
    if (v.size() > 1) {
      double ss = 0.0;
      for (double x : v) ss += (x - h.mean) * (x - h.mean);
      h.stderr_ = std::sqrt(ss / (v.size() - 1) / v.size());
    }
    out.push_back(h);
  }
  return out;
}

std::vector<HorizonSummary> report_dir(const std::string& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<std::pair<long, double>> samples;
  for (const auto& f : files) {
    std::vector<RunRow> rows;
    try {
      rows = read_csv(f.string());
    } catch (const ConfigError&) {
      continue;  // not a run record
    }
    if (!rows.empty()) samples.emplace_back(rows.back().t, rows.back().cum_gamma_regret);
  }
  return summarize(samples);
}

std::vector<std::pair<long, double>> run_sweep(const ExperimentConfig& base,
                                               std::span<const long> horizons,
                                               int seeds, const std::string& out_dir,
                                               int threads, std::vector<long>* oracle_calls) {
  std::vector<ExperimentConfig> jobs;
  for (long T : horizons)
    for (int s = 0; s < seeds; ++s) {
      ExperimentConfig c = base;
      c.T = T;
      c.seed = base.seed + s;
      c.output = out_dir.empty() ? "" : out_dir + "/run_T" + std::to_string(T) + "_s" +
                                            std::to_string(c.seed) + ".csv";
      jobs.push_back(std::move(c));
    }
  std::vector<std::pair<long, double>> out(jobs.size());
  std::vector<long> calls(jobs.size(), 0);
  if (threads <= 0) threads = std::max(1u, std::thread::hardware_concurrency());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  auto worker = [&] {
    for (std::size_t k; (k = next++) < jobs.size();) {
      try {
        const RegretReport rep = run_experiment(jobs[k]);
        out[k] = {jobs[k].T, rep.final_regret()};
        calls[k] = rep.oracle_calls;
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < std::min<int>(threads, static_cast<int>(jobs.size())); ++w)
    pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  if (oracle_calls) *oracle_calls = std::move(calls);
  return out;
}

std::vector<long> parse_horizons(const std::string& text) {
  auto number = [](std::string s) -> long {
    const auto caret = s.find('^');
    try {
      if (caret == std::string::npos) return std::stol(s);
      const long base = std::stol(s.substr(0, caret));
      const int e = std::stoi(s.substr(caret + 1));
      long v = 1;
      for (int i = 0; i < e; ++i) v *= base;
      return v;
    } catch (const std::logic_error&) {
      throw ConfigError("bad horizon '" + s + "'");
    }
  };
  std::vector<long> out;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const long lo = number(text.substr(0, dots)), hi = number(text.substr(dots + 2));
    if (lo < 1 || hi < lo) throw ConfigError("bad horizon range " + text);
    for (long T = lo; T <= hi; T *= 2) out.push_back(T);
  } else {
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) out.push_back(number(item));
  }
  for (long T : out)
    if (T < 1) throw ConfigError("horizons must be ≥ 1");
  if (out.empty()) throw ConfigError("no horizons");
  return out;
}

std::string default_out_dir() {
  const char* env = std::getenv("IGLEARN_OUT_DIR");
  return env && *env ? env : "runs";
}

}  // namespace iglearn::harness
