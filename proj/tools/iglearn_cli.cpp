#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "iglearn/harness.hpp"

namespace h = iglearn::harness;

namespace {

void print_summary(const std::vector<h::HorizonSummary>& rows) {
  std::printf("%10s %6s %14s %12s\n", "T", "seeds", "mean_regret", "stderr");
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : rows) {
    std::printf("%10ld %6d %14.6g %12.4g\n", r.T, r.seeds, r.mean, r.stderr_);
    pts.emplace_back(static_cast<double>(r.T), r.mean);
  }
  if (pts.size() < 4) return;
  try {
    std::printf("slope %.4f\n", h::fit_slope(pts));
  } catch (const iglearn::DegenerateFit& e) {
    std::printf("slope undefined: %s\n", e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online iterative-greedy learners: runs, sweeps and regret reports"};
  app.require_subcommand(1);

  std::string config, out, horizons = "2^10..2^16", in_dir, out_dir;
  int seeds = 10, threads = 0;

  auto* run = app.add_subcommand("run", "Play one configured experiment");
  run->add_option("--config", config, "JSON config")->required();
  run->add_option("--out", out, "CSV path (default: config output, else $IGLEARN_OUT_DIR)");

  auto* sweep = app.add_subcommand("sweep", "Run a (horizon, seed) grid in parallel");
  sweep->add_option("--config", config, "JSON config")->required();
  sweep->add_option("--horizons", horizons, "2^a..2^b or a comma list");
  sweep->add_option("--seeds", seeds, "seeds per horizon")->check(CLI::PositiveNumber);
  sweep->add_option("--out-dir", out_dir, "directory for run CSVs");
  sweep->add_option("--threads", threads, "worker threads (0 = hardware)");

  auto* report = app.add_subcommand("report", "Aggregate run CSVs by horizon");
  report->add_option("--in", in_dir, "directory of run CSVs")->required();
  report->add_option("--out", out, "summary CSV")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      h::ExperimentConfig cfg = h::load_config(config);
      if (!out.empty())
        cfg.output = out;
      else if (cfg.output.empty())
        cfg.output = h::default_out_dir() + "/run_T" + std::to_string(cfg.T) + "_s" +
                     std::to_string(cfg.seed) + ".csv";
      const h::RegretReport rep = h::run_experiment(cfg);
      std::printf("%s T=%ld seed=%llu gamma=%.6g opt_sum=%.6g%s reward=%.6g regret=%.6g explored=%ld\n",
                  cfg.output.c_str(), cfg.T, static_cast<unsigned long long>(cfg.seed), rep.gamma,
                  rep.bench.opt_sum, rep.bench.proxy ? " (proxy, lower bound on OPT)" : "",
                  rep.rows.back().cum_reward, rep.final_regret(), rep.explored_rounds);
    } else if (*sweep) {
      const h::ExperimentConfig cfg = h::load_config(config);
      if (out_dir.empty()) out_dir = h::default_out_dir();
      const auto T = h::parse_horizons(horizons);
      print_summary(h::summarize(h::run_sweep(cfg, T, seeds, out_dir, threads)));
    } else if (*report) {
      const auto rows = h::report_dir(in_dir);
      std::ofstream f(out);
      if (!f) throw iglearn::Error("cannot write " + out);
      f << "T,seeds,mean_regret,stderr\n";
      for (const auto& r : rows) f << r.T << ',' << r.seeds << ',' << r.mean << ',' << r.stderr_ << '\n';
      print_summary(rows);
    }
  } catch (const h::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const iglearn::BadParams& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const iglearn::BanditContractViolation& e) {
    std::fprintf(stderr, "contract violation: %s\n", e.what());
    return 3;
  } catch (const iglearn::FeedWithoutExplore& e) {
    std::fprintf(stderr, "contract violation: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
