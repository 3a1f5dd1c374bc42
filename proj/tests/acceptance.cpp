#include <fmt/format.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "urnlab/chain_kernel.hpp"
#include "urnlab/combinatorics.hpp"
#include "urnlab/couplings.hpp"
#include "urnlab/mixing.hpp"
#include "urnlab/spectral.hpp"
#include "urnlab/verification.hpp"

using namespace urnlab;
namespace fs = std::filesystem;

namespace {

// Tolerances and sizes.
constexpr double kOracleTol = 1e-13;
constexpr double kRowTol = 1e-12;
constexpr double kEigenTol = 1e-10;
constexpr double kMomentTol = 1e-9;
constexpr double kCrossingTol = 1e-14;
constexpr double kDecompositionTv = 0.005;
constexpr double kEndpointTv = 0.06;
constexpr double kRatioLo = 0.75;
constexpr double kRatioHi = 1.75;
constexpr double kLateDistance = 0.1;
constexpr double kGapOneTv = 0.1;
constexpr std::int64_t kContractionReps = 1000000;
constexpr std::int64_t kMonotoneSteps = 10000000;
constexpr std::int64_t kDecompositionReps = 1000000;
constexpr std::int64_t kBoundReps = 10000;

struct Outcome {
  bool passed = true;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    if (!ok) passed = false;
    notes.push_back((ok ? "" : "FAILED ") + what);
  }
  void report(const CheckReport& r) {
    require(r.passed, fmt::format("{} (n={}, k={}) {:.6g} {} {:.6g}", r.name, r.n, r.k, r.statistic,
                                  r.direction, r.bound));
  }
};

struct Options {
  std::string cli;
  std::uint64_t seed = 20240601;
  int jobs = 0;
  std::vector<int> expect_fail;
  bool verbose = false;
};

std::vector<ChainParams> default_grid() { return StochasticOptions{}.grid; }

Outcome kernel_exactness(const Options&) {
  Outcome o;
  o.report(check_kernel_vs_oracle(12, kOracleTol));
  o.report(check_row_sums(60, kRowTol));
  o.report(check_detailed_balance(60, kRowTol));
  return o;
}

Outcome spectral_identities(const Options&) {
  Outcome o;
  const SpectralChecks s = check_spectral(200, kEigenTol);
  o.report(s.eigen_f1);
  o.report(s.eigen_f2);
  std::vector<int> ns;
  for (int n = 2; n <= 60; ++n) ns.push_back(n);
  for (int n : {80, 100, 150, 200}) ns.push_back(n);
  const MomentChecks m = check_moment_propagation(ns, 200, kMomentTol);
  o.report(m.mean);
  o.report(m.variance);
  return o;
}

Outcome contraction(const Options& opt) {
  Outcome o;
  o.report(check_contraction_enumeration(12));
  o.report(check_contraction_monte_carlo({100, 10}, kContractionReps, opt.seed + 3, opt.jobs));
  return o;
}

Outcome monotonicity(const Options& opt) {
  Outcome o;
  const auto r = check_monotonicity(default_grid(), kMonotoneSteps, opt.seed + 4, opt.jobs);
  o.report(r);
  o.require(r.replicas >= kMonotoneSteps, fmt::format("coupled steps {} >= {}", r.replicas, kMonotoneSteps));
  return o;
}

Outcome decomposition(const Options& opt) {
  Outcome o;
  for (const auto& r : check_decomposition({100, 10}, 30, {1, 2, 5}, kDecompositionReps, opt.seed + 5, opt.jobs)) {
    o.report(r);
    o.require(r.bound == kDecompositionTv, "threshold 0.005");
  }
  return o;
}

Outcome bound_compliance(const Options& opt) {
  Outcome o;
  std::uint64_t s = opt.seed + 600;
  for (const auto& p : default_grid()) {
    const auto surv = check_tau_couple_survival(p, kBoundReps, ++s, opt.jobs);
    o.report(surv.front());
    o.report(check_doob_window(p, kBoundReps, ++s, opt.jobs));
    const auto hit = check_hitting_lemma(p, kBoundReps, ++s, opt.jobs);
    o.report(hit.front());
  }
  o.report(check_doob_single_time({100, 5}, 10 * kBoundReps, ++s, opt.jobs));
  return o;
}

Outcome tv_lemmas(const Options& opt) {
  Outcome o;
  o.report(check_hyper_binom_bound(500, opt.jobs));
  o.report(check_shifted_binom_crossing(2000, kCrossingTol, opt.jobs));
  double worst_crossing = 0.0;
  double previous = 2.0;
  double worst_increase = -1.0;
  int worst_k = 0;
  std::string ladder;
  for (int e = 4; e <= 16; ++e) {
    const int k = 1 << e;
    const int g = static_cast<int>(std::floor(std::pow(static_cast<double>(k), 0.25)));
    const ShiftedBinomTV t = shifted_binom_tv(k, g);
    worst_crossing = std::max(worst_crossing, std::abs(t.tv - t.crossing_tv));
    if (t.tv - previous > worst_increase) {
      worst_increase = t.tv - previous;
      worst_k = k;
    }
    previous = t.tv;
    ladder += fmt::format("{}{}:{:.5f}", ladder.empty() ? "" : " ", k, t.tv);
  }
  o.require(worst_crossing <= kCrossingTol,
            fmt::format("ladder crossing formula max error {:.3g} <= {:.0e}", worst_crossing, kCrossingTol));
  o.require(worst_increase <= 0.0,
            fmt::format("ladder decreasing: largest step change {:+.5f} at k={} [{}]", worst_increase,
                        worst_k, ladder));
  const CheckReport end = check_shifted_binom_endpoint();
  o.report(end);
  o.require(end.bound == kEndpointTv, "endpoint threshold 0.06");
  return o;
}

Outcome cutoff(const Options& opt) {
  Outcome o;
  // Extremes policy against every start: exhaustive grid to 60, sampled to 300.
  o.report(check_start_policies(full_half_grid(2, 60), 0.01, {0.25, 0.1}, 1e-12, opt.jobs).extremes_agreement);
  std::vector<ChainParams> sampled;
  for (int n : {75, 100, 150, 200, 250, 300}) {
    std::set<int> ks{1, 2, 5, n / 10, n / 4, n / 3, n / 2};
    for (int k : ks) sampled.push_back({n, k});
  }
  const PolicyChecks pc = check_start_policies(sampled, 0.25, {0.25}, 1e-12, opt.jobs);
  o.report(pc.extremes_agreement);
  o.report(pc.nw_sandwich);

  std::vector<ChainParams> ladder;
  for (int n : {250, 500, 1000, 2000, 4000}) ladder.push_back({n, 5});
  const auto recs = window_diagnostic(ladder, 0.25, StartPolicy::Extremes, opt.jobs);
  std::string ratios;
  bool decreasing = true;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const auto& r = recs[i];
    o.require(r.t_mix && r.nw_ok,
              fmt::format("(a) n={} t_mix={} <= {}", r.n, r.t_mix ? std::to_string(*r.t_mix) : "NA", r.nw_upper));
    ratios += fmt::format("{}{:.4f}", i ? " " : "", r.ratio);
    if (i > 0 && !(r.ratio < recs[i - 1].ratio)) decreasing = false;
  }
  o.require(decreasing, "(b) ratio strictly decreasing: " + ratios);
  const double last = recs.back().ratio;
  o.require(last >= kRatioLo && last <= kRatioHi,
            fmt::format("(b) ratio at n=4000 {:.4f} in [{}, {}]", last, kRatioLo, kRatioHi));
  const auto t2 = static_cast<std::int64_t>(std::ceil(2.0 * 4000.0 / 20.0 * std::log(4000.0)));
  const double d = worst_distance(build_kernel({4000, 5}), t2, StartPolicy::Extremes);
  o.require(d <= kLateDistance, fmt::format("(c) d({}) = {:.5f} <= {}", t2, d, kLateDistance));
  return o;
}

Outcome last_step(const Options&) {
  Outcome o;
  const ChainParams p{10000, 400};
  const int mid = 5000;
  o.require(last_step_tv(p, mid, mid) == 0.0, "gap 0 gives 0");
  const int band = static_cast<int>(std::ceil(2.0 * std::sqrt(10000.0)));
  double worst_drop = 0.0;
  for (int y = mid - band; y <= mid + band; y += 10) {
    double prev = 0.0;
    for (int gap = 0; gap <= 20; ++gap) {
      const double d = last_step_tv(p, y + gap, y);
      worst_drop = std::max(worst_drop, prev - d);
      prev = d;
    }
  }
  o.require(worst_drop <= 1e-14, fmt::format("non-decreasing in gap, largest drop {:.3g}", worst_drop));
  const double one = last_step_tv(p, mid + 1, mid);
  o.require(one <= kGapOneTv, fmt::format("gap 1 TV {:.5f} <= {}", one, kGapOneTv));
  return o;
}

int run_cli(const std::string& cli, const std::string& args, const fs::path& out) {
  const std::string cmd = fmt::format("env -u URNLAB_OUT_DIR {} {} > {} 2> /dev/null", cli, args, out.string());
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

Outcome reproducibility(const Options& opt) {
  Outcome o;
  if (opt.cli.empty()) {
    o.require(false, "no --cli given");
    return o;
  }
  const fs::path dir = fs::temp_directory_path() / fmt::format("urnlab_accept_{}", ::getpid());
  fs::create_directories(dir);
  const std::string base = fmt::format("verify stochastic --seed {}", opt.seed);
  const int c1 = run_cli(opt.cli, base + " --jobs 1", dir / "a.json");
  const int c2 = run_cli(opt.cli, base + " --jobs 1", dir / "b.json");
  const int c3 = run_cli(opt.cli, base + " --jobs 3", dir / "c.json");
  const std::string a = slurp(dir / "a.json");
  o.require(!a.empty() && a.front() == '[', fmt::format("JSON report written ({} bytes)", a.size()));
  o.require(a == slurp(dir / "b.json"), "two runs byte-identical");
  o.require(a == slurp(dir / "c.json"), "jobs 1 and jobs 3 byte-identical");
  o.require(c1 == c2 && c2 == c3, fmt::format("exit codes {} {} {}", c1, c2, c3));
  fs::remove_all(dir);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  Options opt;
  app.add_option("--cli", opt.cli, "path to the urnlab binary");
  app.add_option("--seed", opt.seed, "master seed")->capture_default_str();
  app.add_option("--jobs", opt.jobs, "worker threads (0: all cores)");
  app.add_option("--expect-fail", opt.expect_fail, "criteria expected to fail");
  app.add_flag("-v,--verbose", opt.verbose, "print every sub-check");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome(const Options&)>>> criteria{
      {"kernel exactness", kernel_exactness},
      {"spectral identities", spectral_identities},
      {"contraction constant", contraction},
      {"monotonicity", monotonicity},
      {"decomposition", decomposition},
      {"bound compliance", bound_compliance},
      {"hypergeometric and shifted-binomial TV", tv_lemmas},
      {"cutoff evidence", cutoff},
      {"last-step smoothing", last_step},
      {"reproducibility", reproducibility},
  };

  std::set<int> failed;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second(opt);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const int id = static_cast<int>(i) + 1;
    std::string reason;
    for (const auto& n : o.notes) {
      if (n.rfind("FAILED ", 0) == 0) reason += (reason.empty() ? "" : "; ") + n.substr(7);
    }
    std::cout << fmt::format("{} {:2d} {} ({:.1f}s){}\n", o.passed ? "PASS" : "FAIL", id, criteria[i].first,
                             secs, o.passed ? "" : ": " + reason);
    if (opt.verbose) {
      for (const auto& n : o.notes) std::cout << "       " << n << '\n';
    }
    std::cout.flush();
    if (!o.passed) failed.insert(id);
  }
  const std::set<int> expected(opt.expect_fail.begin(), opt.expect_fail.end());
  std::cout << fmt::format("{}/{} criteria passed\n", criteria.size() - failed.size(), criteria.size());
  if (failed != expected) {
    std::cout << "failing set differs from the expected one\n";
    return 1;
  }
  return 0;
}
