#include <CLI11.hpp>

#include <exception>
#include <functional>
#include <iostream>
#include <map>

#include "cli_commands.hpp"

using urnlab::cli::RunConfig;

namespace {

struct RawFlags {
  int n = 0;
  int k = 0;
  int x0 = 0;
  int y0 = 0;
  std::int64_t reps = 0;
  std::int64_t t_max = 0;
};

struct Bound {
  CLI::Option* n = nullptr;
  CLI::Option* k = nullptr;
  CLI::Option* x0 = nullptr;
  CLI::Option* y0 = nullptr;
  CLI::Option* reps = nullptr;
  CLI::Option* t_max = nullptr;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact kernels, mixing scans, coupling experiments and verification suites for the "
               "(n, k) Bernoulli-Laplace urn chain."};
  app.require_subcommand(1);
  app.set_version_flag("--version", "urnlab 1.0.0");

  RunConfig cfg;
  RawFlags raw;
  std::map<CLI::App*, Bound> bound;

  auto common = [&](CLI::App* sub, std::initializer_list<std::string> flags) {
    Bound b;
    for (const auto& f : flags) {
      if (f == "n") b.n = sub->add_option("--n", raw.n, "urn size (n_max for verify exact)");
      if (f == "k") b.k = sub->add_option("--k", raw.k, "swap size");
      if (f == "x0") b.x0 = sub->add_option("--x0", raw.x0, "start of X");
      if (f == "y0") b.y0 = sub->add_option("--y0", raw.y0, "start of Y");
      if (f == "reps") b.reps = sub->add_option("--reps", raw.reps, "replicas");
      if (f == "t-max") b.t_max = sub->add_option("--t-max", raw.t_max, "time horizon");
      if (f == "eps") sub->add_option("--eps", cfg.eps, "TV threshold")->capture_default_str();
      if (f == "mode") sub->add_option("--mode", cfg.mode, "monotone | independent | decomposed")->capture_default_str();
      if (f == "gamma1") sub->add_option("--gamma1", cfg.gamma1, "phase B budget constant")->capture_default_str();
      if (f == "seed") sub->add_option("--seed", cfg.seed, "master seed")->capture_default_str();
      if (f == "policy") sub->add_option("--policy", cfg.policy, "all-states | extremes")->capture_default_str();
      if (f == "ladder") sub->add_option("--ladder", cfg.ladder, "comma list of n:k");
    }
    sub->add_option("--out", cfg.out, "output file (default: stdout or $URNLAB_OUT_DIR)");
    sub->add_option("--format", cfg.format, "csv | json");
    sub->add_option("--jobs", cfg.jobs, "worker threads (default: available cores)");
    bound[sub] = b;
  };

  using Runner = std::function<int(const RunConfig&)>;
  std::map<CLI::App*, Runner> runners;

  auto* dump = app.add_subcommand("kernel-dump", "write the banded kernel as i,j,p");
  common(dump, {"n", "k"});
  runners[dump] = urnlab::cli::run_kernel_dump;

  auto* mix = app.add_subcommand("mix", "exact d(t) profile and t_mix(eps)");
  common(mix, {"n", "k", "eps", "policy", "t-max"});
  runners[mix] = urnlab::cli::run_mix;

  auto* scan = app.add_subcommand("cutoff-scan", "t_mix along a ladder of (n, k)");
  common(scan, {"ladder", "eps", "policy"});
  runners[scan] = urnlab::cli::run_cutoff_scan;

  auto* couple = app.add_subcommand("couple", "gap trajectories of a coupled pair");
  common(couple, {"n", "k", "x0", "y0", "mode", "reps", "t-max", "seed"});
  runners[couple] = urnlab::cli::run_couple;

  auto* four = app.add_subcommand("four-phase", "four-phase coupling records");
  common(four, {"n", "k", "x0", "gamma1", "reps", "seed"});
  runners[four] = urnlab::cli::run_four_phase;

  auto* verify = app.add_subcommand("verify", "run verification suites, JSON report");
  verify->add_option("suite", cfg.suite, "exact | stochastic | mgf | all")->capture_default_str();
  common(verify, {"n", "reps", "seed"});
  runners[verify] = urnlab::cli::run_verify;

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return urnlab::cli::kConfigError;
  }

  CLI::App* chosen = app.get_subcommands().front();
  const Bound& b = bound[chosen];
  cfg.command = chosen->get_name();
  if (b.n && b.n->count()) cfg.n = raw.n;
  if (b.k && b.k->count()) cfg.k = raw.k;
  if (b.x0 && b.x0->count()) cfg.x0 = raw.x0;
  if (b.y0 && b.y0->count()) cfg.y0 = raw.y0;
  if (b.reps && b.reps->count()) cfg.reps = raw.reps;
  if (b.t_max && b.t_max->count()) cfg.t_max = raw.t_max;
  if (cfg.format.empty()) cfg.format = chosen == verify ? "json" : "csv";

  try {
    return runners[chosen](cfg);
  } catch (const urnlab::cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return urnlab::cli::kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return urnlab::cli::kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return urnlab::cli::kConfigError;
  }
}
