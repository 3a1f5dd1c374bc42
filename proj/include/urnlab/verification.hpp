#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "urnlab/chain_kernel.hpp"

namespace urnlab {

/// Outcome of one numerical check. `direction` is "<=", "==" or ">=" and
/// `passed` records whether statistic <direction> bound holds within
/// `tolerance`. `replicas` is 0 for exact checks.
struct CheckReport {
  std::string name;
  int n = 0;
  int k = 0;
  double statistic = 0.0;
  double bound = 0.0;
  std::string direction = "<=";
  double tolerance = 0.0;
  bool passed = false;
  std::int64_t replicas = 0;
  std::uint64_t seed = 0;
};

CheckReport make_report(std::string name, int n, int k, double statistic, double bound,
                        std::string direction, double tolerance, std::int64_t replicas = 0,
                        std::uint64_t seed = 0);

bool all_passed(const std::vector<CheckReport>& reports);

// ---------------------------------------------------------------------------
// Exact checks. Each sweeps its own grid capped by the arguments and reports
// the worst case it found together with that case's (n, k).

CheckReport check_kernel_vs_oracle(int n_max, double tolerance);
CheckReport check_stationary_vs_oracle(int n_max, double tolerance);
CheckReport check_row_sums(int n_max, double tolerance);
CheckReport check_detailed_balance(int n_max, double tolerance);
CheckReport check_transition_prob_vs_rows(int n_max, double tolerance);
CheckReport check_stationary_moments(int n_max, double tolerance);
/// f1(x)^2 = 1/(2n-1) + (2n-2)/(2n-1) f2(x) for 2 <= n <= n_max.
CheckReport check_f1_f2_identity(int n_max, double tolerance);

struct SpectralChecks {
  CheckReport eigen_f1;
  CheckReport eigen_f2;
  CheckReport martingale;
};

/// Eigen residuals of f1, f2 and the one-step martingale identity (scaled by
/// (1-2k/n)^(t+1), t in {0, 1, 10}) for n <= n_max and k <= n/2.
SpectralChecks check_spectral(int n_max, double tolerance);

struct MomentChecks {
  CheckReport mean;
  CheckReport variance;
  CheckReport f1_second_moment;
};

/// Closed-form E X_t, Var X_t and E f1(X_t)^2 against moments of
/// delta_{x0} P^t for x0 in {0, n/4, n/2}, t <= t_max and every k <= n/2.
/// Errors are relative to max(|exact|, 1).
MomentChecks check_moment_propagation(const std::vector<int>& ns, int t_max, double tolerance);

CheckReport check_hypergeometric_dist_vs_pmf(int N_max, double tolerance);
CheckReport check_hyper_binom_bound(int N_max, int jobs = 1);
CheckReport check_shifted_binom_crossing(int k_max, double tolerance, int jobs = 1);
CheckReport check_shifted_binom_endpoint();

/// Max increase of shifted_binom_tv(k, floor(k^(1/4))) between consecutive
/// ladder entries k = 2^e_first, 2^(e_first+step), ... up to 2^16.
CheckReport check_shifted_binom_ladder(int e_first, int step);

CheckReport check_contraction_enumeration(int n_max);
CheckReport check_monotone_law_vs_enumeration(int n_max, double tolerance);
CheckReport check_micro_drift_enumeration(int n_max, double tolerance);

struct PolicyChecks {
  CheckReport extremes_agreement;
  CheckReport profile_monotone;
  CheckReport nw_sandwich;
};

/// One all-states sweep per (n, k <= n/2) down to d(t) <= eps_floor;
/// compares start policies, checks that d(t) never increases and that
/// t_mix(e) <= ceil((n/2k) ln(n/e)) for every e in nw_eps (each e must be
/// >= eps_floor).
PolicyChecks check_start_policies(const std::vector<ChainParams>& grid, double eps_floor,
                                  const std::vector<double>& nw_eps, double tolerance,
                                  int jobs = 1);

/// Every (n, k) with 2 <= n <= n_max and 1 <= k <= n/2.
std::vector<ChainParams> full_half_grid(int n_min, int n_max);

CheckReport check_complement_symmetry(int n_max, int t_max, double tolerance);

/// Runs every exact check on grids capped at n_max (<= 300). Deterministic.
std::vector<CheckReport> run_exact_suite(int n_max = 60, double tolerance = 1e-12, int jobs = 1);

// ---------------------------------------------------------------------------
// Statistical checks (3 sigma acceptance).

struct StochasticOptions {
  std::vector<ChainParams> grid{{100, 10}, {400, 10}, {1000, 25}, {2000, 50}};
  std::int64_t reps = 10000;
  std::int64_t distribution_reps = 1000000;
  std::int64_t monotone_steps = 10000000;
  std::uint64_t seed = 1;
  int jobs = 1;
};

/// Proportion check: passes iff p_hat <= bound + 3 se with
/// se = sqrt(p_hat (1 - p_hat) / reps).
CheckReport proportion_report(std::string name, const ChainParams& params, double p_hat,
                              double bound, std::int64_t reps, std::uint64_t seed);

/// Worst index of a curve of proportions against pointwise bounds.
CheckReport curve_report(std::string name, const ChainParams& params,
                         const std::vector<double>& p_hat, const std::vector<double>& bound,
                         std::int64_t reps, std::uint64_t seed);

/// Samplers and one-step laws against exact pmfs (empirical TV <= 0.005).
CheckReport check_hypergeometric_sampler(std::int64_t samples, std::uint64_t seed, int jobs);
CheckReport check_step_sample_row(std::int64_t samples, std::uint64_t seed, int jobs);
CheckReport check_contraction_monte_carlo(const ChainParams& params, std::int64_t reps,
                                          std::uint64_t seed, int jobs);
std::vector<CheckReport> check_monotone_marginals(const ChainParams& params, std::int64_t reps,
                                                  std::uint64_t seed, int jobs);
CheckReport check_monotonicity(const std::vector<ChainParams>& grid, std::int64_t total_steps,
                               std::uint64_t seed, int jobs);
std::vector<CheckReport> check_decomposition(const ChainParams& params, int x0,
                                             const std::vector<int>& t_macro, std::int64_t reps,
                                             std::uint64_t seed, int jobs);
/// Survival curve against the bound, then the censored fraction at t_max
/// reported on its own.
std::vector<CheckReport> check_tau_couple_survival(const ChainParams& params, std::int64_t reps,
                                                   std::uint64_t seed, int jobs);
CheckReport check_doob_window(const ChainParams& params, std::int64_t reps, std::uint64_t seed,
                              int jobs);
CheckReport check_doob_single_time(const ChainParams& params, std::int64_t reps,
                                   std::uint64_t seed, int jobs);
CheckReport check_chebyshev_window(const ChainParams& params, std::int64_t reps,
                                   std::uint64_t seed, int jobs);
/// Survival of the matching time on a power-of-two grid up to 2^14 micro
/// steps, then the censored fraction reported on its own.
std::vector<CheckReport> check_hitting_lemma(const ChainParams& params, std::int64_t reps,
                                             std::uint64_t seed, int jobs);
CheckReport check_matched_drift(const ChainParams& params, std::int64_t reps, std::uint64_t seed,
                                int jobs);

std::vector<CheckReport> run_stochastic_suite(const StochasticOptions& options);

// ---------------------------------------------------------------------------
// Exponential moment constant.

struct MgfProbeResult {
  std::vector<CheckReport> reports;  // one per population size, asserting c >= 8
  double min_constant = 0.0;         // smallest measured c over the grid
  bool sixteen_holds = false;        // min_constant >= 16 (reported only)
};

/// For each N, K = floor(N/2), 1 <= r <= N/10 and h in h_grid, measures
/// c = h^2 r / ln E exp(h(H - EH)) and asserts c >= 8.
MgfProbeResult mgf_constant_probe(const std::vector<int>& populations,
                                  const std::vector<double>& h_grid);
std::vector<int> default_mgf_populations();
std::vector<double> default_mgf_h_grid();

}  // namespace urnlab
