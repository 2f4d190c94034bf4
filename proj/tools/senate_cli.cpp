#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "senate/config.hpp"
#include "senate/error.hpp"
#include "senate/geometry.hpp"
#include "senate/harness.hpp"
#include "senate/sortition.hpp"

namespace {

constexpr int kConfigExit = 2;

senate::ScenarioConfig load(const std::string& path, const std::vector<std::string>& overrides) {
  senate::ScenarioConfig config = path.empty() ? senate::ScenarioConfig{} : senate::load_config(path);
  for (const auto& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw senate::Error(senate::ErrorCode::Config, "--set expects key=value, got '" + kv + "'");
    senate::apply_setting(config, kv.substr(0, eq), kv.substr(eq + 1));
  }
  config.validate();
  return config;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw senate::Error(senate::ErrorCode::Config, "cannot write " + path);
  return out;
}

struct SweepArgs {
  std::string config;
  std::vector<std::string> overrides;
  std::vector<int> faulty;
  int episodes = 0;
  std::string out;
  int workers = 0;
  bool sybil = false;
};

void add_sweep_options(CLI::App* cmd, SweepArgs& a) {
  cmd->add_option("--config", a.config, "scenario file");
  cmd->add_option("--set", a.overrides, "override a config key (key=value)");
  cmd->add_option("--faulty", a.faulty, "faulty counts, comma separated")->delimiter(',')->required();
  cmd->add_option("--episodes", a.episodes, "episodes per faulty count (default: config episodes)");
  cmd->add_option("--out", a.out, "CSV path (default: stdout)");
  cmd->add_option("--workers", a.workers, "worker threads (0: all cores)");
}

void run_sweep_command(const SweepArgs& a, senate::SweepArm arm) {
  const auto config = load(a.config, a.overrides);
  const int episodes = a.episodes > 0 ? a.episodes : config.episodes;
  const auto rows = senate::run_sweep(config, a.faulty, episodes, {arm, a.workers});
  if (a.out.empty()) {
    senate::write_sweep_csv(std::cout, rows);
  } else {
    auto out = open_out(a.out);
    senate::write_sweep_csv(out, rows);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Seeded simulator for sortition, senator selection and byzantine agreement"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::uint64_t seed = 1;
  bool seed_given = false;
  std::string trace_wnc, trace_ba;
  auto* episode = app.add_subcommand("episode", "run one episode and print it as JSON");
  episode->add_option("--config", config_path, "scenario file");
  episode->add_option("--set", overrides, "override a config key (key=value)");
  auto* seed_opt = episode->add_option("--seed", seed, "episode seed (default: config seed)");
  episode->add_option("--trace-wnc", trace_wnc, "write the WNC trace CSV here")
      ->expected(0, 1)
      ->default_str("trace_wnc.csv");
  episode->add_option("--trace-ba", trace_ba, "write the agreement trace CSV here")
      ->expected(0, 1)
      ->default_str("trace_ba.csv");

  SweepArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "sweep faulty counts and write the summary CSV");
  add_sweep_options(sweep, sweep_args);

  SweepArgs baseline_args;
  auto* baseline = app.add_subcommand("baseline", "same sweep with all nodes running agreement directly");
  add_sweep_options(baseline, baseline_args);
  baseline->add_flag("--sybil", baseline_args.sybil, "faulty nodes enter attack.sybil_seats identities");

  senate::LeakageParams leak;
  int trials = 10000;
  std::uint64_t mc_seed = 1;
  int mc_workers = 0;
  auto* mc = app.add_subcommand("seesaw-mc", "Monte-Carlo check of the seesaw leakage");
  mc->add_option("--m", leak.m_good, "good nodes M");
  mc->add_option("--sigma2", leak.sigma2, "coordinate variance");
  mc->add_option("--varsigma2", leak.varsigma2, "attacker offset variance");
  mc->add_option("--dim", leak.dim, "embedding dimension L");
  mc->add_option("--trials", trials, "trials");
  mc->add_option("--seed", mc_seed, "seed");
  mc->add_option("--workers", mc_workers, "worker threads (0: all cores)");

  std::vector<double> costs;
  int n_max = 50;
  auto* nash = app.add_subcommand("nash-check", "equilibrium probability and payoff grid");
  nash->add_option("--cost", costs, "transmission costs (default 0.05..0.95)")->delimiter(',');
  nash->add_option("--n-max", n_max, "largest player count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kConfigExit;
  }
  seed_given = seed_opt->count() > 0;

  try {
    if (*episode) {
      const auto config = load(config_path, overrides);
      const std::uint64_t s = seed_given ? seed : config.seed;
      const bool want_wnc = episode->get_option("--trace-wnc")->count() > 0;
      const bool want_ba = episode->get_option("--trace-ba")->count() > 0;
      senate::EpisodeTrace trace;
      const auto result = senate::run_episode(config, s, (want_wnc || want_ba) ? &trace : nullptr);
      std::cout << result.to_json() << '\n';
      if (want_wnc) {
        auto out = open_out(trace_wnc.empty() ? "trace_wnc.csv" : trace_wnc);
        senate::write_wnc_trace(out, trace.wnc);
      }
      if (want_ba) {
        auto out = open_out(trace_ba.empty() ? "trace_ba.csv" : trace_ba);
        if (trace.agreement) senate::write_ba_trace(out, *trace.agreement);
      }
    } else if (*sweep) {
      run_sweep_command(sweep_args, senate::SweepArm::Senate);
    } else if (*baseline) {
      run_sweep_command(baseline_args,
                        baseline_args.sybil ? senate::SweepArm::BaselineSybil : senate::SweepArm::Baseline);
    } else if (*mc) {
      const auto est = senate::seesaw_leakage_mc(leak, trials, mc_seed, static_cast<unsigned>(std::max(0, mc_workers)));
      std::printf("m,sigma2,varsigma2,dim,trials,theory,gram_schmidt,gram_schmidt_se,eigen,eigen_se\n");
      std::printf("%d,%.17g,%.17g,%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", leak.m_good, leak.sigma2,
                  leak.varsigma2, leak.dim, trials, est.theory, est.gram_schmidt, est.gram_schmidt_se,
                  est.eigen, est.eigen_se);
    } else if (*nash) {
      if (costs.empty())
        for (int i = 1; i <= 19; ++i) costs.push_back(0.05 * i);
      std::printf("c,n,p,payoff\n");
      for (const double c : costs) {
        for (int n = 2; n <= n_max; ++n) {
          const double p = senate::nash_probability(c, n);
          std::printf("%.2f,%d,%.17g,%.3g\n", c, n, p, senate::transmit_payoff(1.0, p, n, c));
        }
      }
    }
  } catch (const senate::Error& e) {
    std::cerr << "error (" << senate::error_code_name(e.code()) << "): " << e.what() << '\n';
    return kConfigExit;
  }
  return 0;
}
