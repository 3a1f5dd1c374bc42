#include "cli_commands.hpp"

#include <fmt/format.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "urnlab/chain_kernel.hpp"
#include "urnlab/couplings.hpp"
#include "urnlab/mixing.hpp"
#include "urnlab/parallel.hpp"
#include "urnlab/random.hpp"
#include "urnlab/replicas.hpp"
#include "urnlab/report_io.hpp"
#include "urnlab/spectral.hpp"
#include "urnlab/verification.hpp"

namespace urnlab::cli {

namespace {

constexpr int kDenseDumpLimit = 5000;

int jobs_of(const RunConfig& cfg) { return cfg.jobs > 0 ? cfg.jobs : default_jobs(); }

ChainParams require_params(const RunConfig& cfg) {
  if (!cfg.n) throw ConfigError("--n is required");
  if (!cfg.k) throw ConfigError("--k is required");
  if (*cfg.n < 1) throw ConfigError(fmt::format("--n must be >= 1 (got {})", *cfg.n));
  if (*cfg.k < 0 || *cfg.k > *cfg.n) {
    throw ConfigError(fmt::format("--k must lie in [0, n] (got {} with n = {})", *cfg.k, *cfg.n));
  }
  return ChainParams{*cfg.n, *cfg.k};
}

void require_ergodic(const ChainParams& p) {
  if (!p.ergodic()) {
    throw ConfigError(fmt::format("--k: parameters (n={}, k={}) are not ergodic; need 0 < k < n",
                                  p.n, p.k));
  }
}

int require_state(const std::optional<int>& v, int fallback, int n, const char* flag) {
  const int x = v.value_or(fallback);
  if (x < 0 || x > n) throw ConfigError(fmt::format("{} must lie in [0, {}] (got {})", flag, n, x));
  return x;
}

void require_eps(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw ConfigError(fmt::format("--eps must lie in (0, 1) (got {})", eps));
}

void require_format(const RunConfig& cfg) {
  if (cfg.format != "csv" && cfg.format != "json") {
    throw ConfigError("--format must be csv or json (got " + cfg.format + ")");
  }
}

std::int64_t require_positive(const std::optional<std::int64_t>& v, std::int64_t fallback,
                              const char* flag) {
  const std::int64_t x = v.value_or(fallback);
  if (x < 1) throw ConfigError(fmt::format("{} must be >= 1 (got {})", flag, x));
  return x;
}

Metadata base_metadata(const RunConfig& cfg) {
  return {{"artifact", std::string(kArtifactVersion)}, {"command", cfg.command}};
}

std::string output_path(const RunConfig& cfg, const std::string& stem) {
  if (!cfg.out.empty()) return cfg.out;
  if (const char* dir = std::getenv("URNLAB_OUT_DIR"); dir != nullptr && *dir != '\0') {
    return (std::filesystem::path(dir) / (stem + "." + cfg.format)).string();
  }
  return {};
}

void emit(const RunConfig& cfg, const std::string& stem, const Table& table, const Metadata& meta) {
  const std::string path = output_path(cfg, stem);
  if (path.empty()) {
    if (cfg.format == "json") {
      for (const auto& [key, value] : meta) std::cerr << "# " << key << ": " << value << '\n';
      write_json(std::cout, table);
    } else {
      write_csv(std::cout, table, meta);
    }
    std::cout.flush();
    return;
  }
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream os(p, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open output file " + path);
  if (cfg.format == "json") {
    write_json(os, table);
    std::ofstream meta_os(path + ".meta.json", std::ios::binary);
    write_metadata_json(meta_os, meta);
  } else {
    write_csv(os, table, meta);
  }
}

std::vector<ChainParams> parse_ladder(const std::string& spec) {
  std::vector<ChainParams> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw ConfigError("--ladder entries must look like n:k (got '" + item + "')");
    }
    ChainParams p{};
    try {
      std::size_t used_n = 0;
      std::size_t used_k = 0;
      p.n = std::stoi(item.substr(0, colon), &used_n);
      p.k = std::stoi(item.substr(colon + 1), &used_k);
      if (used_n != colon || used_k != item.size() - colon - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ConfigError("--ladder entry '" + item + "' is not n:k with integers");
    }
    if (p.n < 2 || p.k < 1 || p.k >= p.n) {
      throw ConfigError("--ladder entry '" + item + "' needs 0 < k < n");
    }
    out.push_back(p);
  }
  if (out.empty()) throw ConfigError("--ladder is empty");
  return out;
}

StartPolicy policy_of(const RunConfig& cfg) {
  try {
    return parse_start_policy(cfg.policy);
  } catch (const std::invalid_argument&) {
    throw ConfigError("--policy must be all-states or extremes (got " + cfg.policy + ")");
  }
}

}  // namespace

int run_kernel_dump(const RunConfig& cfg) {
  const ChainParams p = require_params(cfg);
  require_format(cfg);
  if (p.n > kDenseDumpLimit) {
    throw ConfigError(fmt::format("--n: dump limited to n <= {} (got {})", kDenseDumpLimit, p.n));
  }
  const BandedKernel kernel = build_kernel(p);
  Metadata meta = base_metadata(cfg);
  meta.emplace_back("n", std::to_string(p.n));
  meta.emplace_back("k", std::to_string(p.k));
  emit(cfg, "kernel", kernel_table(kernel), meta);
  return kSuccess;
}

int run_mix(const RunConfig& cfg) {
  const ChainParams p = require_params(cfg);
  require_ergodic(p);
  require_eps(cfg.eps);
  require_format(cfg);
  const StartPolicy policy = policy_of(cfg);
  if (cfg.t_max && *cfg.t_max < 0) throw ConfigError("--t-max must be >= 0");
  const BandedKernel kernel = build_kernel(p);
  const auto t_mix = mixing_time(kernel, cfg.eps, policy);
  const MixingProfile profile = cfg.t_max ? mixing_profile(kernel, *cfg.t_max, policy)
                                          : mixing_profile_until(kernel, cfg.eps, policy);
  Metadata meta = base_metadata(cfg);
  meta.emplace_back("n", std::to_string(p.n));
  meta.emplace_back("k", std::to_string(p.k));
  meta.emplace_back("eps", format_double(cfg.eps));
  meta.emplace_back("policy", std::string(to_string(policy)));
  if (cfg.t_max) meta.emplace_back("t_max", std::to_string(*cfg.t_max));
  meta.emplace_back("t_mix", t_mix ? std::to_string(*t_mix) : "NA");
  meta.emplace_back("nw_upper", std::to_string(nw_upper_bound(p, cfg.eps)));
  emit(cfg, "mix", profile_table(profile), meta);
  std::cerr << "t_mix(" << format_double(cfg.eps) << ") = " << (t_mix ? std::to_string(*t_mix) : "NA")
            << '\n';
  return kSuccess;
}

int run_cutoff_scan(const RunConfig& cfg) {
  require_eps(cfg.eps);
  require_format(cfg);
  const StartPolicy policy = policy_of(cfg);
  const std::string ladder_spec =
      cfg.ladder.empty() ? "250:5,500:5,1000:5,2000:5,4000:5" : cfg.ladder;
  const auto ladder = parse_ladder(ladder_spec);
  const auto records = window_diagnostic(ladder, cfg.eps, policy, jobs_of(cfg));
  Metadata meta = base_metadata(cfg);
  meta.emplace_back("ladder", ladder_spec);
  meta.emplace_back("eps", format_double(cfg.eps));
  meta.emplace_back("policy", std::string(to_string(policy)));
  emit(cfg, "cutoff_scan", cutoff_table(records), meta);
  return kSuccess;
}

int run_couple(const RunConfig& cfg) {
  const ChainParams p = require_params(cfg);
  require_format(cfg);
  CouplingMode mode{};
  try {
    mode = parse_coupling_mode(cfg.mode);
  } catch (const std::invalid_argument&) {
    throw ConfigError("--mode must be monotone, independent or decomposed (got " + cfg.mode + ")");
  }
  if (mode == CouplingMode::Decomposed && p.k < 1) throw ConfigError("--k must be >= 1 in decomposed mode");
  const int x0 = require_state(cfg.x0, 0, p.n, "--x0");
  const int y0 = require_state(cfg.y0, p.n, p.n, "--y0");
  const std::int64_t reps = require_positive(cfg.reps, 100, "--reps");
  const std::int64_t t_max = cfg.t_max.value_or(100);
  if (t_max < 0) throw ConfigError("--t-max must be >= 0");

  const auto gaps = map_replicas<std::vector<int>>(
      reps, cfg.seed, jobs_of(cfg), [&](std::int64_t, Rng& rng) {
        std::vector<int> g;
        g.reserve(static_cast<std::size_t>(t_max) + 1);
        if (mode == CouplingMode::Decomposed) {
          DecomposedState xs = DecomposedState::start(p.n, x0);
          DecomposedState ys = DecomposedState::start(p.n, y0);
          g.push_back(std::abs(xs.xleft - ys.xleft));
          for (std::int64_t t = 1; t <= t_max; ++t) {
            for (int s = 0; s < 2 * p.k; ++s) {
              xs = decomposed_step(xs, p, rng);
              ys = decomposed_step(ys, p, rng);
            }
            g.push_back(std::abs(xs.xleft - ys.xleft));
          }
          return g;
        }
        CoupledPair pair{x0, y0};
        g.push_back(pair.gap());
        for (std::int64_t t = 1; t <= t_max; ++t) {
          pair = mode == CouplingMode::Monotone ? monotone_step(pair, p, rng)
                                                : independent_step(pair, p, rng);
          g.push_back(pair.gap());
        }
        return g;
      });
  Metadata meta = base_metadata(cfg);
  meta.emplace_back("n", std::to_string(p.n));
  meta.emplace_back("k", std::to_string(p.k));
  meta.emplace_back("x0", std::to_string(x0));
  meta.emplace_back("y0", std::to_string(y0));
  meta.emplace_back("mode", std::string(to_string(mode)));
  meta.emplace_back("reps", std::to_string(reps));
  meta.emplace_back("t_max", std::to_string(t_max));
  meta.emplace_back("seed", std::to_string(cfg.seed));
  emit(cfg, "couple", couple_table(cfg.seed, gaps), meta);
  return kSuccess;
}

int run_four_phase(const RunConfig& cfg) {
  const ChainParams p = require_params(cfg);
  require_format(cfg);
  if (p.k < 1 || 2 * p.k > p.n) throw ConfigError("--k must satisfy 0 < k <= n/2");
  if (!(cfg.gamma1 > 0.0)) throw ConfigError("--gamma1 must be positive");
  const int x0 = require_state(cfg.x0, 0, p.n, "--x0");
  const std::int64_t reps = require_positive(cfg.reps, 100, "--reps");
  FourPhaseConfig fp;
  fp.gamma1 = cfg.gamma1;
  const auto records = map_replicas<FourPhaseRecord>(
      reps, cfg.seed, jobs_of(cfg),
      [&](std::int64_t, Rng& rng) { return four_phase_run(p, x0, fp, rng); });
  const auto uncensored = std::count_if(records.begin(), records.end(),
                                        [](const FourPhaseRecord& r) { return r.uncensored(); });
  const double fraction = static_cast<double>(uncensored) / static_cast<double>(reps);
  const Kappas kap = fp.resolve();
  Metadata meta = base_metadata(cfg);
  meta.emplace_back("n", std::to_string(p.n));
  meta.emplace_back("k", std::to_string(p.k));
  meta.emplace_back("x0", std::to_string(x0));
  meta.emplace_back("gamma1", format_double(cfg.gamma1));
  meta.emplace_back("kappas", fmt::format("{},{},{},{}", format_double(kap.k1), format_double(kap.k2),
                                          format_double(kap.k3), format_double(kap.k4)));
  meta.emplace_back("reps", std::to_string(reps));
  meta.emplace_back("seed", std::to_string(cfg.seed));
  meta.emplace_back("uncensored_fraction", format_double(fraction));
  emit(cfg, "four_phase", four_phase_table(cfg.seed, records), meta);
  std::cerr << "uncensored fraction = " << format_double(fraction) << '\n';
  return kSuccess;
}

int run_verify(const RunConfig& cfg) {
  const std::string suite = cfg.suite.empty() ? "all" : cfg.suite;
  if (suite != "exact" && suite != "stochastic" && suite != "mgf" && suite != "all") {
    throw ConfigError("suite must be exact, stochastic, mgf or all (got " + suite + ")");
  }
  require_format(cfg);
  const int n_max = cfg.n.value_or(60);
  if (n_max < 2 || n_max > 300) throw ConfigError(fmt::format("--n must lie in [2, 300] (got {})", n_max));
  const std::int64_t reps = cfg.reps.value_or(10000);
  if (reps < 10000) throw ConfigError(fmt::format("--reps must be >= 10000 (got {})", reps));

  std::vector<CheckReport> reports;
  Metadata meta = base_metadata(cfg);
  meta.emplace_back("suite", suite);
  meta.emplace_back("seed", std::to_string(cfg.seed));
  if (suite == "exact" || suite == "all") {
    meta.emplace_back("n_max", std::to_string(n_max));
    const auto r = run_exact_suite(n_max, 1e-12, jobs_of(cfg));
    reports.insert(reports.end(), r.begin(), r.end());
  }
  if (suite == "stochastic" || suite == "all") {
    StochasticOptions o;
    o.reps = reps;
    o.seed = cfg.seed;
    o.jobs = jobs_of(cfg);
    meta.emplace_back("reps", std::to_string(reps));
    const auto r = run_stochastic_suite(o);
    reports.insert(reports.end(), r.begin(), r.end());
  }
  if (suite == "mgf" || suite == "all") {
    const MgfProbeResult m = mgf_constant_probe(default_mgf_populations(), default_mgf_h_grid());
    reports.insert(reports.end(), m.reports.begin(), m.reports.end());
    meta.emplace_back("mgf_min_constant", format_double(m.min_constant));
    meta.emplace_back("mgf_constant_16_holds", m.sixteen_holds ? "true" : "false");
    std::cerr << "mgf: min c = " << format_double(m.min_constant)
              << ", c >= 16 holds: " << (m.sixteen_holds ? "true" : "false") << '\n';
  }
  emit(cfg, "verify_" + suite, report_table(reports), meta);
  std::size_t failed = 0;
  for (const auto& r : reports) {
    if (!r.passed) {
      ++failed;
      std::cerr << "FAILED " << r.name << " (n=" << r.n << ", k=" << r.k
                << ") statistic=" << format_double(r.statistic) << " " << r.direction << " "
                << format_double(r.bound) << " tol=" << format_double(r.tolerance) << '\n';
    }
  }
  std::cerr << reports.size() - failed << "/" << reports.size() << " checks passed\n";
  return failed == 0 ? kSuccess : kCheckFailure;
}

}  // namespace urnlab::cli
